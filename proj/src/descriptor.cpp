#include "sfos/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace sfos {

namespace {

constexpr double kSingularPencilTol = 1e-12;
constexpr double kDegreeTrimTol = 1e-9;
constexpr double kA4SingularTol = 1e-12;

void check_finite(const Matrix& m, const char* name) {
    if (!all_finite(m)) {
        throw InputError(std::string(name) + " has non-finite entries");
    }
}

// Flip paired columns so the largest-magnitude entry of each column of V is positive.
void canonicalize_signs(Matrix& U, Matrix& V) {
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
        Eigen::Index pivot = 0;
        V.col(j).cwiseAbs().maxCoeff(&pivot);
        if (V(pivot, j) < 0.0) {
            V.col(j) *= -1.0;
            U.col(j) *= -1.0;
        }
    }
}

std::vector<Complex> to_std(const ComplexVector& v) { return {v.data(), v.data() + v.size()}; }

} // namespace

DescriptorSystem::DescriptorSystem(Matrix E, Matrix A, Matrix B, Matrix C, double alpha, double rank_tol)
    : E_(std::move(E)), A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), alpha_(alpha), rank_tol_(rank_tol) {
    require(E_.rows() > 0 && E_.rows() == E_.cols(), "E must be square and non-empty");
    require(A_.rows() == E_.rows() && A_.cols() == E_.cols(), "A must match the dimensions of E");
    require(B_.rows() == E_.rows() && B_.cols() > 0, "B must have n rows and at least one column");
    require(C_.cols() == E_.cols() && C_.rows() > 0, "C must have n columns and at least one row");
    require(alpha_ > 0.0 && alpha_ < 2.0, "alpha must lie in (0, 2)");
    require(rank_tol_ > 0.0, "rank tolerance must be positive");
    check_finite(E_, "E");
    check_finite(A_, "A");
    check_finite(B_, "B");
    check_finite(C_, "C");
    rank_ = numerical_rank(E_, rank_tol_);
}

DescriptorSystem DescriptorSystem::with_order(double alpha) const { return {E_, A_, B_, C_, alpha, rank_tol_}; }

DescriptorSystem DescriptorSystem::with_dynamics(Matrix A) const { return {E_, std::move(A), B_, C_, alpha_, rank_tol_}; }

int numerical_rank(const Matrix& M, double tol) {
    require(tol > 0.0, "rank tolerance must be positive");
    check_finite(M, "matrix");
    if (M.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<Matrix> svd(M);
    const Vector& s = svd.singularValues();
    const double largest = s.size() > 0 ? s(0) : 0.0;
    if (largest == 0.0) {
        return 0;
    }
    return static_cast<int>((s.array() > tol * largest).count());
}

AnnihilatorPair annihilators(const Matrix& E, int rank) {
    const auto n = E.rows();
    require(E.rows() == E.cols(), "E must be square");
    if (rank >= n) {
        throw InputError("E nonsingular; use standard FOS path");
    }
    require(rank >= 0, "rank must be non-negative");
    Eigen::JacobiSVD<Matrix> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix U = svd.matrixU();
    Matrix V = svd.matrixV();
    canonicalize_signs(U, V);
    const auto k = n - rank;
    // Null-space columns are independent of each other; canonicalize U's own signs too.
    Matrix left = U.rightCols(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::Index pivot = 0;
        left.col(j).cwiseAbs().maxCoeff(&pivot);
        if (left(pivot, j) < 0.0) {
            left.col(j) *= -1.0;
        }
    }
    return {V.rightCols(k), left.transpose()};
}

Complex PencilPolynomial::evaluate(Complex s) const {
    Complex acc = 0.0;
    for (Eigen::Index i = coefficients.size() - 1; i >= 0; --i) {
        acc = acc * s + coefficients(i);
    }
    return acc;
}

// det(sE - A) is interpolated from n+1 samples on a circle of radius 1 + |A|/|E|.
// The samples are rotated half a step off the real axis, and the interpolation
// is a discrete Fourier transform, so it is exact for degree <= n.
PencilPolynomial pencil_polynomial(const Matrix& E, const Matrix& A) {
    require(E.rows() == E.cols() && A.rows() == A.cols() && E.rows() == A.rows(),
            "pencil matrices must be square and of equal size");
    check_finite(E, "E");
    check_finite(A, "A");
    const auto n = E.rows();
    PencilPolynomial poly;
    if (n == 0) {
        poly.coefficients = Vector::Ones(1);
        poly.degree = 0;
        return poly;
    }

    const double norm_e = E.norm();
    const double norm_a = A.norm();
    const double radius = norm_e > 0.0 ? 1.0 + norm_a / norm_e : 1.0;
    const auto samples = n + 1;
    const double pi = std::numbers::pi;

    // A singular pencil is rank deficient at every s; a regular one is invertible at all
    // but finitely many, so one well-conditioned sample suffices.
    std::vector<Complex> values(samples);
    double best_ratio = 0.0;
    for (Eigen::Index j = 0; j < samples; ++j) {
        const Complex s = std::polar(radius, pi * (2.0 * j + 1.0) / static_cast<double>(samples));
        ComplexMatrix pencil = s * E.cast<Complex>() - A.cast<Complex>();
        values[j] = pencil.partialPivLu().determinant();
        const auto sv = Eigen::JacobiSVD<ComplexMatrix>(pencil).singularValues();
        if (sv(0) > 0.0) {
            best_ratio = std::max(best_ratio, sv(sv.size() - 1) / sv(0));
        }
    }
    if (best_ratio <= kSingularPencilTol) {
        return poly; // identically zero
    }

    // scaled(m) = c_m * radius^m
    ComplexVector scaled(samples);
    for (Eigen::Index m = 0; m < samples; ++m) {
        Complex acc = 0.0;
        for (Eigen::Index j = 0; j < samples; ++j) {
            acc += values[j] * std::polar(1.0, -pi * (2.0 * j + 1.0) * static_cast<double>(m) / samples);
        }
        scaled(m) = acc / static_cast<double>(samples);
    }
    const double peak = scaled.cwiseAbs().maxCoeff();
    int degree = 0;
    for (Eigen::Index m = samples - 1; m >= 0; --m) {
        if (std::abs(scaled(m)) > kDegreeTrimTol * peak) {
            degree = static_cast<int>(m);
            break;
        }
    }
    poly.degree = degree;
    poly.coefficients.resize(degree + 1);
    for (int m = 0; m <= degree; ++m) {
        poly.coefficients(m) = scaled(m).real() / std::pow(radius, m);
    }
    return poly;
}

ComplexVector polynomial_roots(const Vector& c) {
    const auto degree = c.size() - 1;
    if (degree <= 0) {
        return {};
    }
    require(c(degree) != 0.0, "leading coefficient must be non-zero");
    Matrix companion = Matrix::Zero(degree, degree);
    companion.block(1, 0, degree - 1, degree - 1).setIdentity();
    companion.col(degree - 1) = -c.head(degree) / c(degree);
    Eigen::EigenSolver<Matrix> es(companion, false);
    ComplexVector roots = es.eigenvalues();

    // Two Newton polishing steps on the original polynomial.
    auto eval = [&](Complex s, Complex& derivative) {
        Complex value = 0.0;
        derivative = 0.0;
        for (Eigen::Index i = degree; i >= 0; --i) {
            derivative = derivative * s + value;
            value = value * s + c(i);
        }
        return value;
    };
    for (auto& root : roots) {
        for (int it = 0; it < 2; ++it) {
            Complex d;
            const Complex v = eval(root, d);
            if (std::abs(d) == 0.0) {
                break;
            }
            const Complex next = root - v / d;
            Complex d_next;
            if (std::abs(eval(next, d_next)) < std::abs(v)) {
                root = next;
            }
        }
        if (std::abs(root.imag()) <= 1e-14 * std::max(1.0, std::abs(root))) {
            root = root.real();
        }
    }
    return roots;
}

// Rank-revealing SVD of E gives the slow/fast split; a second SVD of the fast
// pivot block rotates it to diagonal form so its conditioning is explicit.
Decomposition decompose(const Matrix& E, const Matrix& A, const Matrix& B, double rank_tol) {
    require(E.rows() == E.cols() && A.rows() == E.rows() && A.cols() == E.cols(), "E and A must be square and equal size");
    require(B.rows() == E.rows(), "B must have n rows");
    check_finite(E, "E");
    check_finite(A, "A");
    check_finite(B, "B");
    const auto n = E.rows();
    const int r = numerical_rank(E, rank_tol);
    const auto f = n - r;

    Eigen::JacobiSVD<Matrix> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix U = svd.matrixU();
    Matrix V = svd.matrixV();
    canonicalize_signs(U, V);
    const Vector root_s = svd.singularValues().head(r).cwiseSqrt();

    Matrix U1 = U.leftCols(r), V1 = V.leftCols(r);
    Matrix U2 = U.rightCols(f), V2 = V.rightCols(f);

    Decomposition d;
    d.rank = r;
    if (f > 0) {
        Matrix a4 = U2.transpose() * A * V2;
        Eigen::JacobiSVD<Matrix> svd4(a4, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vector& sigma = svd4.singularValues();
        const double smallest = sigma(f - 1);
        const double norm_a = std::max(A.norm(), std::numeric_limits<double>::min());
        if (!(smallest > kA4SingularTol * norm_a)) {
            throw NumericalError("not impulse-free; reduction undefined (A4 singular)");
        }
        d.a4_condition = sigma(0) / smallest;
        U2 = U2 * svd4.matrixU();
        V2 = V2 * svd4.matrixV();
    }

    d.M.resize(n, n);
    d.M << U1 * root_s.asDiagonal(), U2;
    d.N.resize(n, n);
    d.N << root_s.asDiagonal() * V1.transpose(), V2.transpose();
    d.M_inv.resize(n, n);
    d.M_inv << root_s.cwiseInverse().asDiagonal() * U1.transpose(), U2.transpose();
    d.N_inv.resize(n, n);
    d.N_inv << V1 * root_s.cwiseInverse().asDiagonal(), V2;

    const Matrix blocks = d.M_inv * A * d.N_inv;
    const Matrix b_tilde = d.M_inv * B;
    d.A1 = blocks.topLeftCorner(r, r);
    d.A2 = blocks.topRightCorner(r, f);
    d.A3 = blocks.bottomLeftCorner(f, r);
    d.A4 = blocks.bottomRightCorner(f, f);
    d.B1 = b_tilde.topRows(r);
    d.B2 = b_tilde.bottomRows(f);

    if (f > 0) {
        const auto lu = d.A4.partialPivLu();
        d.Ab = -lu.solve(d.A3);
        d.Bb = -lu.solve(d.B2);
    } else {
        d.Ab = Matrix::Zero(0, r);
        d.Bb = Matrix::Zero(0, B.cols());
    }
    d.Aa = d.A1 + d.A2 * d.Ab;
    d.Ba = d.B1 + d.A2 * d.Bb;
    return d;
}

Decomposition decompose(const DescriptorSystem& sys) { return decompose(sys.E(), sys.A(), sys.B(), sys.rank_tol()); }

double angle_margin(Complex lambda, double alpha, double zero_tol) {
    const double boundary = alpha * std::numbers::pi / 2.0;
    if (std::abs(lambda) <= zero_tol || lambda == Complex(0.0, 0.0)) {
        return -boundary;
    }
    return std::abs(std::arg(lambda)) - boundary;
}

double spectrum_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const auto& x : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && std::abs(x - b[j]) < best) {
                best = std::abs(x - b[j]);
                best_idx = j;
            }
        }
        used[best_idx] = true;
        worst = std::max(worst, best / std::max(1.0, std::abs(x)));
    }
    return worst;
}

namespace {

// QZ eigenvalues of (A, E); the `count` with the largest |beta| / |alpha| are the finite
// ones. Polynomial roots lose accuracy quickly once the degree passes a handful.
std::vector<Complex> finite_generalized_eigenvalues(const Matrix& E, const Matrix& A, int count) {
    Eigen::GeneralizedEigenSolver<Matrix> qz(A, E, false);
    if (qz.info() != Eigen::Success) {
        throw NumericalError("QZ iteration did not converge");
    }
    const auto& alphas = qz.alphas();
    const auto& betas = qz.betas();
    std::vector<std::pair<double, Complex>> ranked;
    for (Eigen::Index i = 0; i < alphas.size(); ++i) {
        const double a = std::abs(alphas(i));
        const double b = std::abs(betas(i));
        const double finiteness = b / std::max(a + b, std::numeric_limits<double>::min());
        const Complex value = b > 0.0 ? alphas(i) / betas(i) : Complex(std::numeric_limits<double>::infinity(), 0.0);
        ranked.emplace_back(finiteness, value);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    std::vector<Complex> out;
    for (int i = 0; i < count && i < static_cast<int>(ranked.size()); ++i) {
        Complex v = ranked[static_cast<std::size_t>(i)].second;
        if (std::abs(v.imag()) <= 1e-14 * std::max(1.0, std::abs(v))) {
            v = v.real();
        }
        out.push_back(v);
    }
    return out;
}

} // namespace

AdmissibilityReport analyze(const Matrix& E, const Matrix& A, double alpha, double rank_tol) {
    require(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
    AdmissibilityReport report;
    report.alpha = alpha;
    report.rank_E = numerical_rank(E, rank_tol);

    const PencilPolynomial poly = pencil_polynomial(E, A);
    report.regular = !poly.identically_zero();
    report.pencil_degree = poly.degree;
    if (!report.regular) {
        report.min_angle_margin = std::numeric_limits<double>::quiet_NaN();
        return report;
    }
    report.impulse_free = poly.degree == report.rank_E;

    const auto roots = to_std(polynomial_roots(poly.coefficients));
    if (report.impulse_free && report.rank_E > 0) {
        const Decomposition d = decompose(E, A, Matrix::Zero(E.rows(), 1), rank_tol);
        Eigen::EigenSolver<Matrix> es(d.Aa, false);
        report.finite_eigenvalues = to_std(es.eigenvalues());
        report.eigen_cross_check = spectrum_distance(report.finite_eigenvalues, roots);
    } else {
        report.finite_eigenvalues = finite_generalized_eigenvalues(E, A, poly.degree);
        report.eigen_cross_check = spectrum_distance(report.finite_eigenvalues, roots);
    }

    double scale = 1.0;
    for (const auto& lambda : report.finite_eigenvalues) {
        scale = std::max(scale, std::abs(lambda));
    }
    const double zero_tol = 1e-12 * scale;
    double margin = std::numbers::pi - alpha * std::numbers::pi / 2.0;
    for (const auto& lambda : report.finite_eigenvalues) {
        margin = std::min(margin, angle_margin(lambda, alpha, zero_tol));
    }
    report.min_angle_margin = margin;
    report.stable = margin > kBoundaryTol;
    report.admissible = report.regular && report.impulse_free && report.stable;
    return report;
}

AdmissibilityReport analyze(const DescriptorSystem& sys) { return analyze(sys.E(), sys.A(), sys.alpha(), sys.rank_tol()); }

} // namespace sfos
