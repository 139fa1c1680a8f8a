#pragma once

#include "sfos/types.hpp"

// Fractional-order positive definite matrices:
//   P = sin(alpha*pi/2) X + cos(alpha*pi/2) Y  with  [[X, Y], [-Y, X]] > 0,
// X symmetric and Y skew-symmetric, alpha in (0, 1].

namespace sfos {

// Smallest block eigenvalue must exceed this fraction of the largest.
inline constexpr double kMembershipRelTol = 1e-9;

struct FpdmParam {
    Matrix X;
    Matrix Y;
    double alpha = 1.0;

    int size() const { return static_cast<int>(X.rows()); }
};

// Throws InputError unless X is symmetric, Y skew-symmetric (to 1e-12 relative) and alpha in (0, 1].
void validate(const FpdmParam& param);

// [[X, Y], [-Y, X]]
Matrix fpdm_block(const FpdmParam& param);

// Smallest eigenvalue of the block matrix.
double membership_margin(const FpdmParam& param);

bool is_member(const FpdmParam& param, double rel_tol = kMembershipRelTol);

// P = sin(alpha*pi/2) X + cos(alpha*pi/2) Y. Rejects non-members, quoting the smallest eigenvalue.
Matrix materialize(const FpdmParam& param);

// (M^T X M, M^T Y M) for a full-column-rank M. Membership is preserved.
FpdmParam congruence(const FpdmParam& param, const Matrix& M);

} // namespace sfos
