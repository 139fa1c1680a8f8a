#include <doctest.h>

#include <cmath>
#include <random>

#include "common.hpp"
#include "oracles.hpp"
#include "sfos/descriptor.hpp"

using namespace sfos;
using fixture::example_A;
using fixture::example_E;

TEST_CASE("numerical rank of small examples") {
    CHECK(numerical_rank(example_E(), 1e-10) == 2);
    CHECK(numerical_rank(Matrix::Identity(3, 3)) == 3);
    CHECK(numerical_rank(Matrix::Zero(3, 3)) == 0);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(numerical_rank(bad), InputError);
}

TEST_CASE("annihilators of the example pencil span the expected directions") {
    const Matrix E = example_E();
    const auto pair = annihilators(E, 2);
    REQUIRE(pair.right.cols() == 1);
    REQUIRE(pair.left.rows() == 1);
    CHECK((E * pair.right).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pair.left * E).cwiseAbs().maxCoeff() < 1e-10);
    // Parallel to [0, 1, -1]^T and [0, 0, 1].
    Vector r = pair.right.col(0).normalized();
    CHECK(std::abs(std::abs(r.dot(Vector{{0.0, 1.0, -1.0}}.normalized())) - 1.0) < 1e-10);
    Vector l = pair.left.row(0).transpose().normalized();
    CHECK(std::abs(std::abs(l(2)) - 1.0) < 1e-10);
}

TEST_CASE("annihilators of diag(1, 0) and rejection of nonsingular E") {
    Matrix E = Matrix::Zero(2, 2);
    E(0, 0) = 1.0;
    const auto pair = annihilators(E, 1);
    CHECK(std::abs(pair.right(0, 0)) < 1e-14);
    CHECK(std::abs(std::abs(pair.right(1, 0)) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(pair.left(0, 1)) - 1.0) < 1e-14);
    CHECK_THROWS_AS(annihilators(Matrix::Identity(2, 2), 2), InputError);
}

TEST_CASE("annihilators of random rank-deficient matrices") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix E = oracle::random_matrix(4, 2, rng) * oracle::random_matrix(2, 4, rng);
        const int r = numerical_rank(E);
        REQUIRE(r == 2);
        const auto pair = annihilators(E, r);
        const double scale = E.cwiseAbs().rowwise().sum().maxCoeff();
        CHECK((E * pair.right).cwiseAbs().rowwise().sum().maxCoeff() < 1e-10 * scale);
        CHECK((pair.left * E).cwiseAbs().rowwise().sum().maxCoeff() < 1e-10 * scale);
        CHECK(numerical_rank(pair.right) == 2);
        CHECK(numerical_rank(pair.left) == 2);
    }
}

TEST_CASE("pencil polynomial examples") {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 1;
    A(1, 1) = 2;
    auto p = pencil_polynomial(Matrix::Identity(2, 2), A);
    REQUIRE(p.degree == 2);
    CHECK(p.coefficients(0) == doctest::Approx(2.0));
    CHECK(p.coefficients(1) == doctest::Approx(-3.0));
    CHECK(p.coefficients(2) == doctest::Approx(1.0));

    auto z = pencil_polynomial(Matrix::Zero(3, 3), Matrix::Identity(3, 3));
    REQUIRE(z.degree == 0);
    CHECK(z.coefficients(0) == doctest::Approx(-1.0));

    // Example pencil against the permutation expansion.
    const auto oracle_coeffs = oracle::pencil_determinant(example_E(), example_A());
    auto q = pencil_polynomial(example_E(), example_A());
    CHECK(q.degree == 2);
    CHECK(std::abs(oracle_coeffs[3]) < 1e-12);
    for (int k = 0; k <= 2; ++k) CHECK(q.coefficients(k) == doctest::Approx(oracle_coeffs[k]).epsilon(1e-9));
}

TEST_CASE("non-regular pencil has the zero polynomial") {
    Matrix E = Matrix::Zero(2, 2);
    E(0, 0) = 1.0;
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 1.0;
    const auto p = pencil_polynomial(E, A);
    CHECK(p.identically_zero());
    const auto r = analyze(E, A, 0.5);
    CHECK_FALSE(r.regular);
    CHECK_FALSE(r.admissible);
}

TEST_CASE("pencil degree never exceeds rank E on random regular pairs") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> size(2, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = size(rng);
        const int r = std::uniform_int_distribution<int>(0, n)(rng);
        const Matrix E = r == 0 ? Matrix(Matrix::Zero(n, n))
                                : Matrix(oracle::random_matrix(n, r, rng) * oracle::random_matrix(r, n, rng));
        const Matrix A = oracle::random_matrix(n, n, rng);
        const auto p = pencil_polynomial(E, A);
        REQUIRE_FALSE(p.identically_zero());
        CHECK(p.degree <= numerical_rank(E));
        const auto ref = oracle::pencil_determinant(E, A);
        const double scale = *std::max_element(ref.begin(), ref.end(), [](double a, double b) {
            return std::abs(a) < std::abs(b);
        });
        for (int k = 0; k <= p.degree; ++k)
            CHECK(std::abs(p.coefficients(k) - ref[k]) <= 1e-8 * std::abs(scale));
    }
}

TEST_CASE("open-loop example is regular, impulse-free and unstable") {
    for (double alpha : {0.6, 1.2}) {
        const auto r = analyze(fixture::example(alpha));
        CHECK(r.regular);
        CHECK(r.impulse_free);
        CHECK_FALSE(r.stable);
        CHECK_FALSE(r.admissible);
        CHECK(r.pencil_degree == 2);
        CHECK(r.rank_E == 2);
    }
}

TEST_CASE("negative identity is admissible for every order") {
    for (double alpha : {0.1, 0.6, 1.0, 1.5, 1.9}) {
        const auto r = analyze(Matrix::Identity(2, 2), -Matrix::Identity(2, 2), alpha);
        CHECK(r.admissible);
        CHECK(r.min_angle_margin == doctest::Approx(M_PI - alpha * M_PI / 2));
    }
}

TEST_CASE("eigenvalue at zero or on the sector boundary is unstable") {
    CHECK_FALSE(analyze(Matrix::Identity(1, 1), Matrix::Zero(1, 1), 0.5).stable);
    // lambda = exp(i*0.3*pi) sits exactly on the boundary for alpha = 0.6.
    const double a = 0.3 * M_PI;
    Matrix A(2, 2);
    A << std::cos(a), std::sin(a), -std::sin(a), std::cos(a);
    CHECK_FALSE(analyze(Matrix::Identity(2, 2), A, 0.6).stable);
    CHECK(analyze(Matrix::Identity(2, 2), A, 0.59).stable);
}

TEST_CASE("decomposition of a diagonal pencil") {
    Matrix E = Matrix::Zero(2, 2);
    E(0, 0) = 1.0;
    Matrix B(2, 1);
    B << 1, 0;
    const auto d = decompose(E, Matrix::Identity(2, 2), B);
    CHECK(d.rank == 1);
    CHECK(std::abs(std::abs(d.A4(0, 0)) - 1.0) < 1e-12);
    CHECK(d.Aa(0, 0) == doctest::Approx(1.0));
    CHECK(std::abs(d.Ab(0, 0)) < 1e-12);
    CHECK(std::abs(std::abs(d.Ba(0, 0)) - 1.0) < 1e-12);
    CHECK(std::abs(d.Bb(0, 0)) < 1e-12);
}

namespace {

double reconstruction_error(const Decomposition& d, const Matrix& E, const Matrix& A, const Matrix& B) {
    const int n = static_cast<int>(E.rows());
    const int r = d.rank;
    Matrix J = Matrix::Zero(n, n);
    J.topLeftCorner(r, r).setIdentity();
    Matrix core(n, n);
    core << d.A1, d.A2, d.A3, d.A4;
    Matrix Bs(n, B.cols());
    Bs << d.B1, d.B2;
    const double eE = (d.M * J * d.N - E).norm() / std::max(1.0, E.norm());
    const double eA = (d.M * core * d.N - A).norm() / std::max(1.0, A.norm());
    const double eB = (d.M * Bs - B).norm() / std::max(1.0, B.norm());
    const Matrix A4i = d.A4.inverse();
    const double eAa = (d.Aa - (d.A1 - d.A2 * A4i * d.A3)).norm();
    const double eAb = (d.Ab + A4i * d.A3).norm();
    const double eBa = (d.Ba - (d.B1 - d.A2 * A4i * d.B2)).norm();
    const double eBb = (d.Bb + A4i * d.B2).norm();
    return std::max({eE, eA, eB, eAa, eAb, eBa, eBb});
}

} // namespace

TEST_CASE("decomposition of the example reconstructs E and A") {
    const auto d = decompose(fixture::example(0.6));
    CHECK(reconstruction_error(d, example_E(), example_A(), fixture::example_B()) < 1e-8);
    CHECK(std::isfinite(d.a4_condition));

    // The listed factors reproduce E to their printed precision.
    Matrix M(3, 3), N(3, 3);
    M << 1.6834, -0.4075, 0, 1.3144, 0.5219, 0, 0, 0, 1;
    N << 0.369, 0.6572, 0.6572, -0.9294, 0.261, 0.261, 0, -0.7071, 0.7071;
    Matrix J = Matrix::Zero(3, 3);
    J.topLeftCorner(2, 2).setIdentity();
    CHECK((M * J * N - example_E()).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("decomposition of constructed impulse-free systems round-trips") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 4;
        const int r = 1 + trial % (n - 1);
        const auto spec = oracle::random_spectrum(r, 0.7, 0.05, rng);
        const auto c = oracle::construct_pencil(n, spec, rng);
        const Matrix B = oracle::random_matrix(n, 2, rng);
        const auto d = decompose(c.E, c.A, B);
        CHECK(reconstruction_error(d, c.E, c.A, B) < 1e-10);
        // Slow spectrum equals the prescribed one.
        Eigen::EigenSolver<Matrix> es(d.Aa);
        std::vector<Complex> got(es.eigenvalues().data(), es.eigenvalues().data() + r);
        CHECK(fixture::max_pair_distance(got, spec) < 1e-6);
    }
}

TEST_CASE("decompose rejects impulsive pencils") {
    // E = [[0,1],[0,0]], A = I: det(sE - A) = 1, degree 0 < rank 1.
    Matrix E = Matrix::Zero(2, 2);
    E(0, 1) = 1.0;
    const auto r = analyze(E, Matrix::Identity(2, 2), 0.5);
    CHECK(r.regular);
    CHECK_FALSE(r.impulse_free);
    CHECK_THROWS_AS(decompose(E, Matrix::Identity(2, 2), Matrix::Ones(2, 1)), NumericalError);
}

TEST_CASE("pencil roots agree with eig(Aa) on impulse-free systems") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 3;
        const int r = 1 + trial % (n - 1);
        const double alpha = 0.3 + 0.01 * trial;
        const auto spec = oracle::random_spectrum(r, alpha, 0.05, rng);
        const auto c = oracle::construct_pencil(n, spec, rng);
        const auto rep = analyze(c.E, c.A, alpha);
        REQUIRE(rep.impulse_free);
        CHECK(rep.eigen_cross_check >= 0.0);
        CHECK(rep.eigen_cross_check < 1e-6);
        CHECK(fixture::max_pair_distance(rep.finite_eigenvalues, spec) < 1e-6);
        CHECK(rep.stable == oracle::sector_stable(spec, alpha));
    }
}

TEST_CASE("analysis is invariant under equivalence transforms") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3;
        const auto spec = oracle::random_spectrum(2, 0.8, 0.05, rng);
        const auto c = oracle::construct_pencil(n, spec, rng);
        Matrix P = oracle::random_matrix(n, n, rng) + 3.0 * Matrix::Identity(n, n);
        Matrix Q = oracle::random_matrix(n, n, rng) + 3.0 * Matrix::Identity(n, n);
        const auto a = analyze(c.E, c.A, 0.8);
        const auto b = analyze(P * c.E * Q, P * c.A * Q, 0.8);
        CHECK(a.regular == b.regular);
        CHECK(a.impulse_free == b.impulse_free);
        CHECK(a.stable == b.stable);
        CHECK(a.admissible == b.admissible);
        CHECK(fixture::max_pair_distance(a.finite_eigenvalues, b.finite_eigenvalues) < 1e-6);
    }
}

TEST_CASE("admissible is the conjunction of the three properties") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix E = oracle::random_matrix(3, 2, rng) * oracle::random_matrix(2, 3, rng);
        const Matrix A = oracle::random_matrix(3, 3, rng);
        const auto r = analyze(E, A, 0.5 + 0.01 * (trial % 100));
        CHECK(r.admissible == (r.regular && r.impulse_free && r.stable));
        if (r.regular) CHECK(r.stable == (r.min_angle_margin > 0.0));
    }
}

TEST_CASE("system construction validates inputs") {
    CHECK_THROWS_AS(DescriptorSystem(Matrix::Identity(2, 2), Matrix::Identity(3, 3), Matrix::Ones(2, 1),
                                     Matrix::Ones(1, 2), 0.5),
                    InputError);
    CHECK_THROWS_AS(DescriptorSystem(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Ones(2, 1),
                                     Matrix::Ones(1, 2), 2.0),
                    InputError);
    CHECK(fixture::example(0.6).rank() == 2);
    CHECK(fixture::example(0.6).singular());
}
