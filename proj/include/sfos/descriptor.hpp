#pragma once

#include <vector>

#include "sfos/types.hpp"

// Singular fractional-order plants  E D^alpha x = A x + B u,  y = C x,
// and direct pencil analysis of regularity, impulse-freeness and stability.

namespace sfos {

inline constexpr double kDefaultRankTol = 1e-9;

// Finite eigenvalues closer than this (in radians) to the sector boundary
// |arg| = alpha*pi/2 are classified unstable.
inline constexpr double kBoundaryTol = 1e-9;

class DescriptorSystem {
  public:
    DescriptorSystem(Matrix E, Matrix A, Matrix B, Matrix C, double alpha, double rank_tol = kDefaultRankTol);

    const Matrix& E() const { return E_; }
    const Matrix& A() const { return A_; }
    const Matrix& B() const { return B_; }
    const Matrix& C() const { return C_; }
    double alpha() const { return alpha_; }
    double rank_tol() const { return rank_tol_; }

    int n() const { return static_cast<int>(E_.rows()); }
    int m() const { return static_cast<int>(B_.cols()); }
    int p() const { return static_cast<int>(C_.rows()); }
    // Numerical rank of E, cached at construction.
    int rank() const { return rank_; }
    bool singular() const { return rank_ < n(); }

    DescriptorSystem with_order(double alpha) const;
    DescriptorSystem with_dynamics(Matrix A) const;

  private:
    Matrix E_, A_, B_, C_;
    double alpha_;
    double rank_tol_;
    int rank_;
};

// Bases of the right and left null spaces of a singular E.
struct AnnihilatorPair {
    Matrix right; // n x (n-r), E * right = 0
    Matrix left;  // (n-r) x n, left * E = 0
};

// E = M diag(I_r, 0) N,  A = M [[A1, A2], [A3, A4]] N,  [B1; B2] = M^-1 B.
// Slow states x_a follow D^alpha x_a = Aa x_a + Ba u, fast states x_b = Ab x_a + Bb u.
struct Decomposition {
    int rank = 0;
    Matrix M, N, M_inv, N_inv;
    Matrix A1, A2, A3, A4;
    Matrix B1, B2;
    Matrix Aa, Ab, Ba, Bb;
    double a4_condition = 1.0;
};

struct PencilPolynomial {
    // Ascending powers of s; empty when det(sE - A) vanishes identically.
    Vector coefficients;
    int degree = -1;

    bool identically_zero() const { return degree < 0; }
    Complex evaluate(Complex s) const;
};

struct AdmissibilityReport {
    bool regular = false;
    bool impulse_free = false;
    bool stable = false;
    bool admissible = false;
    std::vector<Complex> finite_eigenvalues;
    // min over finite eigenvalues of |arg(lambda)| - alpha*pi/2; NaN when not regular.
    double min_angle_margin = 0.0;
    int pencil_degree = -1;
    int rank_E = 0;
    double alpha = 0.0;
    // Largest mismatch between finite_eigenvalues and the pencil roots; negative when not computed.
    double eigen_cross_check = -1.0;
};

int numerical_rank(const Matrix& M, double tol = kDefaultRankTol);

AnnihilatorPair annihilators(const Matrix& E, int rank);

PencilPolynomial pencil_polynomial(const Matrix& E, const Matrix& A);

ComplexVector polynomial_roots(const Vector& ascending_coefficients);

Decomposition decompose(const Matrix& E, const Matrix& A, const Matrix& B, double rank_tol = kDefaultRankTol);
Decomposition decompose(const DescriptorSystem& sys);

// |arg(lambda)| - alpha*pi/2, with lambda = 0 mapped to -alpha*pi/2.
double angle_margin(Complex lambda, double alpha, double zero_tol = 0.0);

AdmissibilityReport analyze(const Matrix& E, const Matrix& A, double alpha, double rank_tol = kDefaultRankTol);
AdmissibilityReport analyze(const DescriptorSystem& sys);

// Greedy nearest-neighbour pairing distance between two eigenvalue multisets,
// relative to max(1, |lambda|). Infinity when the sizes differ.
double spectrum_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

} // namespace sfos
