#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <omp.h>

#include "oracles.hpp"
#include "sfos/kernels.hpp"
#include "sfos/simulator.hpp"

using namespace sfos;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

std::vector<double> history_sum(const std::vector<double>& w, const std::vector<double>& h, std::size_t dim,
                                bool parallel) {
    std::vector<double> out(dim);
    if (parallel)
        kernels::gl_history_parallel(w, h, dim, out);
    else
        kernels::gl_history_serial(w, h, dim, out);
    return out;
}

} // namespace

TEST_CASE("history sum matches a direct evaluation") {
    std::mt19937_64 rng(401);
    const std::size_t dim = 3;
    for (std::size_t steps : {1u, 7u, 1023u, 1024u, 1025u, 5000u}) {
        const auto w = gl_weights(0.6, steps + 1);
        const auto h = random_vector(steps * dim, rng);
        std::vector<long double> ref(dim, 0.0L);
        for (std::size_t j = 1; j <= steps; ++j)
            for (std::size_t c = 0; c < dim; ++c) ref[c] += static_cast<long double>(w[j]) * h[(steps - j) * dim + c];
        for (bool par : {false, true}) {
            const auto out = history_sum(w, h, dim, par);
            for (std::size_t c = 0; c < dim; ++c) CHECK(std::abs(out[c] - static_cast<double>(ref[c])) < 1e-12);
        }
    }
}

TEST_CASE("parallel history sum is bitwise independent of the thread count") {
    std::mt19937_64 rng(403);
    const std::size_t dim = 9, steps = 20000;
    const auto w = gl_weights(0.3, steps + 1);
    const auto h = random_vector(steps * dim, rng);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = history_sum(w, h, dim, true);
    for (int threads : {2, 3, 8}) {
        omp_set_num_threads(threads);
        CHECK(history_sum(w, h, dim, true) == one);
    }
    omp_set_num_threads(saved);
}

TEST_CASE("history sum validates its arguments") {
    std::vector<double> w{1.0, -0.5};
    std::vector<double> h(6, 1.0);
    std::vector<double> out(3);
    CHECK_THROWS_AS(kernels::gl_history_serial(w, h, 3, out), InputError);
    std::vector<double> h2(5, 1.0);
    CHECK_THROWS_AS(kernels::gl_history_parallel(gl_weights(0.5, 10), h2, 3, out), InputError);
}

TEST_CASE("whitening and Gram kernels agree between serial and parallel") {
    std::mt19937_64 rng(409);
    const int d = 8, count = 40;
    const Matrix R = oracle::random_matrix(d, d, rng);
    const Matrix S = R * R.transpose() + Matrix::Identity(d, d);
    const Matrix L = S.llt().matrixL();
    std::vector<Matrix> coeffs;
    for (int a = 0; a < count; ++a) {
        const Matrix X = oracle::random_matrix(d, d, rng);
        coeffs.push_back(X + X.transpose());
    }
    std::vector<const Matrix*> ptrs;
    for (const auto& c : coeffs) ptrs.push_back(&c);

    Matrix ws, wp, gs, gp;
    kernels::whiten_serial(L, ptrs, ws);
    kernels::whiten_parallel(L, ptrs, wp);
    CHECK(ws == wp);
    kernels::gram_serial(ws, gs);
    kernels::gram_parallel(wp, gp);
    CHECK(gs == gp);

    // Direct check of one column: L^-1 F L^-T.
    const Matrix Li = L.inverse();
    const Matrix direct = Li * coeffs[5] * Li.transpose();
    CHECK((ws.col(5) - direct.reshaped()).norm() < 1e-10 * direct.norm());
    CHECK((gs - ws.transpose() * ws).norm() < 1e-10 * gs.norm());
}

TEST_CASE("thread count is positive") { CHECK(kernels::max_threads() >= 1); }
