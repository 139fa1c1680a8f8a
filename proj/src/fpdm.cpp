#include "sfos/fpdm.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sfos/descriptor.hpp"

namespace sfos {

void validate(const FpdmParam& param) {
    const auto n = param.X.rows();
    require(param.X.cols() == n && param.Y.rows() == n && param.Y.cols() == n, "X and Y must be square and equal size");
    require(param.alpha > 0.0 && param.alpha <= 1.0, "fpdm order must lie in (0, 1]");
    require(all_finite(param.X) && all_finite(param.Y), "X and Y must be finite");
    const double scale = std::max({1.0, param.X.norm(), param.Y.norm()});
    require((param.X - param.X.transpose()).norm() <= 1e-12 * scale, "X must be symmetric");
    require((param.Y + param.Y.transpose()).norm() <= 1e-12 * scale, "Y must be skew-symmetric");
}

Matrix fpdm_block(const FpdmParam& param) {
    const auto n = param.X.rows();
    Matrix block(2 * n, 2 * n);
    block << param.X, param.Y, -param.Y, param.X;
    return block;
}

double membership_margin(const FpdmParam& param) {
    validate(param);
    if (param.size() == 0) {
        return 0.0;
    }
    Matrix block = fpdm_block(param);
    block = 0.5 * (block + block.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(block, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

bool is_member(const FpdmParam& param, double rel_tol) {
    validate(param);
    if (param.size() == 0) {
        return false;
    }
    Matrix block = fpdm_block(param);
    block = 0.5 * (block + block.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(block, Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    return ev(0) > 0.0 && ev(0) > rel_tol * ev(ev.size() - 1);
}

Matrix materialize(const FpdmParam& param) {
    if (!is_member(param)) {
        std::ostringstream os;
        os << "not a fractional-order positive definite parameter: smallest block eigenvalue "
           << membership_margin(param);
        throw InputError(os.str());
    }
    const double angle = param.alpha * std::numbers::pi / 2.0;
    return std::sin(angle) * param.X + std::cos(angle) * param.Y;
}

FpdmParam congruence(const FpdmParam& param, const Matrix& M) {
    validate(param);
    require(M.rows() == param.X.rows(), "congruence matrix must have n rows");
    require(M.cols() > 0 && M.cols() <= M.rows(), "congruence matrix must have 1..n columns");
    if (numerical_rank(M) < M.cols()) {
        throw InputError("congruence matrix is rank deficient");
    }
    FpdmParam out;
    out.alpha = param.alpha;
    out.X = M.transpose() * param.X * M;
    out.Y = M.transpose() * param.Y * M;
    // Restore exact symmetry lost to rounding.
    out.X = 0.5 * (out.X + out.X.transpose()).eval();
    out.Y = 0.5 * (out.Y - out.Y.transpose()).eval();
    return out;
}

} // namespace sfos
