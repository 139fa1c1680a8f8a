#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sfos/fpdm.hpp"

using namespace sfos;

namespace {

Matrix skew2(double v) {
    Matrix Y(2, 2);
    Y << 0, v, -v, 0;
    return Y;
}

// Random member: X = R R^T + c I with c chosen to dominate the skew part.
FpdmParam random_member(int n, double alpha, std::mt19937_64& rng) {
    const Matrix R = oracle::random_matrix(n, n, rng);
    const Matrix S = oracle::random_matrix(n, n, rng);
    const Matrix Y = 0.5 * (S - S.transpose());
    const double lift = oracle::jacobi_eigenvalues(Y.transpose() * Y).back();
    FpdmParam p;
    p.X = R * R.transpose() + (std::sqrt(lift) + 0.1) * Matrix::Identity(n, n);
    p.Y = Y;
    p.alpha = alpha;
    return p;
}

} // namespace

TEST_CASE("materialize in the classical and scalar cases") {
    FpdmParam p{Matrix::Identity(3, 3), Matrix::Zero(3, 3), 1.0};
    CHECK((materialize(p) - Matrix::Identity(3, 3)).norm() < 1e-15);

    FpdmParam s{Matrix::Constant(1, 1, 2.0), Matrix::Zero(1, 1), 0.6};
    CHECK(materialize(s)(0, 0) == doctest::Approx(2.0 * std::sin(0.3 * M_PI)));
}

TEST_CASE("materialize with a skew part at alpha 0.5") {
    FpdmParam p{Matrix::Identity(2, 2), skew2(0.5), 0.5};
    // Block eigenvalues 1 +- 0.5 each twice, from the Jacobi oracle.
    const auto ev = oracle::jacobi_eigenvalues(fpdm_block(p));
    CHECK(ev.front() == doctest::Approx(0.5));
    CHECK(ev.back() == doctest::Approx(1.5));
    CHECK(membership_margin(p) == doctest::Approx(0.5));
    const Matrix P = materialize(p);
    const Matrix expected = std::sin(M_PI / 4) * Matrix::Identity(2, 2) + std::cos(M_PI / 4) * skew2(0.5);
    CHECK((P - expected).norm() < 1e-15);
}

TEST_CASE("non-members are rejected with the smallest eigenvalue") {
    FpdmParam p{Matrix::Identity(2, 2), skew2(1.5), 0.5};
    CHECK_FALSE(is_member(p));
    try {
        materialize(p);
        FAIL("expected rejection");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("-0.5") != std::string::npos);
    }
}

TEST_CASE("structure validation") {
    Matrix X = Matrix::Identity(2, 2);
    X(0, 1) = 0.3;
    CHECK_THROWS_AS(validate(FpdmParam{X, Matrix::Zero(2, 2), 0.5}), InputError);
    Matrix Y = Matrix::Zero(2, 2);
    Y(0, 1) = 0.3;
    CHECK_THROWS_AS(validate(FpdmParam{Matrix::Identity(2, 2), Y, 0.5}), InputError);
    CHECK_THROWS_AS(validate(FpdmParam{Matrix::Identity(2, 2), Matrix::Zero(2, 2), 1.2}), InputError);
}

TEST_CASE("congruence examples") {
    std::mt19937_64 rng(3);
    const auto p = random_member(2, 0.7, rng);
    const auto same = congruence(p, Matrix::Identity(2, 2));
    CHECK((same.X - p.X).norm() < 1e-14);
    CHECK((same.Y - p.Y).norm() < 1e-14);

    Matrix e1(2, 1);
    e1 << 1, 0;
    const auto sub = congruence(p, e1);
    CHECK(sub.X(0, 0) == doctest::Approx(p.X(0, 0)));
    CHECK(sub.X(0, 0) > 0.0);
    CHECK(is_member(sub));

    Matrix deficient(3, 2);
    deficient << 1, 2, 2, 4, 3, 6;
    CHECK_THROWS_AS(congruence(random_member(3, 0.5, rng), deficient), InputError);
}

TEST_CASE("congruence preserves membership on random trials") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> order(0.05, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 5;
        const int r = 1 + trial % n;
        const auto p = random_member(n, order(rng), rng);
        REQUIRE(oracle::jacobi_eigenvalues(fpdm_block(p)).front() > 0.0);
        const Matrix M = oracle::random_matrix(n, r, rng);
        const auto q = congruence(p, M);
        CHECK(oracle::jacobi_eigenvalues(fpdm_block(q)).front() > 0.0);
        // materialize commutes with the congruence.
        const Matrix lhs = materialize(q);
        const Matrix rhs = M.transpose() * materialize(p) * M;
        CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));
    }
}

TEST_CASE("membership is invariant under positive scaling") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_member(3, 0.4, rng);
        for (double c : {1e-3, 0.5, 7.0, 1e3}) {
            FpdmParam q{c * p.X, c * p.Y, p.alpha};
            CHECK(is_member(q));
        }
    }
}

TEST_CASE("flipping the skew part changes P by 2 cos(alpha pi / 2) Y") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_member(3, 0.3 + 0.03 * trial, rng);
        FpdmParam q{p.X, -p.Y, p.alpha};
        const Matrix diff = materialize(p) - materialize(q);
        CHECK((diff - 2.0 * std::cos(p.alpha * M_PI / 2) * p.Y).norm() < 1e-14);
    }
}

TEST_CASE("at order one membership reduces to X positive definite") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        FpdmParam p;
        p.X = oracle::random_matrix(3, 3, rng);
        p.X = (0.5 * (p.X + p.X.transpose())).eval();
        p.Y = Matrix::Zero(3, 3);
        p.alpha = 1.0;
        const bool pd = oracle::jacobi_eigenvalues(p.X).front() > 1e-9 * oracle::jacobi_eigenvalues(p.X).back();
        CHECK(is_member(p) == pd);
        if (pd) CHECK((materialize(p) - p.X).norm() < 1e-15);
    }
}
