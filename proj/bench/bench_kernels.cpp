#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sfos/kernels.hpp"
#include "sfos/simulator.hpp"

using namespace sfos;

namespace {

std::vector<double> random_history(std::size_t steps, std::size_t dim) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> h(steps * dim);
    for (auto& v : h) v = u(rng);
    return h;
}

template <bool Parallel>
void BM_GlHistory(benchmark::State& state) {
    const auto steps = static_cast<std::size_t>(state.range(0));
    const std::size_t dim = 9;
    const auto w = gl_weights(0.6, steps + 1);
    const auto h = random_history(steps, dim);
    std::vector<double> out(dim);
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::gl_history_parallel(w, h, dim, out);
        } else {
            kernels::gl_history_serial(w, h, dim, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(steps * dim));
}

struct NewtonData {
    Matrix L;
    std::vector<Matrix> coeffs;
    std::vector<const Matrix*> ptrs;
};

NewtonData newton_data(int dim, int slots) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    NewtonData d;
    Matrix S = Matrix::Identity(dim, dim) * dim;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) S(i, j) += 0.1 * g(rng);
    S = 0.5 * (S + S.transpose()).eval();
    d.L = Eigen::LLT<Matrix>(S).matrixL();
    for (int a = 0; a < slots; ++a) {
        Matrix F(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) F(i, j) = g(rng);
        d.coeffs.push_back(0.5 * (F + F.transpose()));
    }
    for (const auto& c : d.coeffs) d.ptrs.push_back(&c);
    return d;
}

template <bool Parallel>
void BM_NewtonSystem(benchmark::State& state) {
    const NewtonData d = newton_data(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    Matrix whitened, gram;
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::whiten_parallel(d.L, d.ptrs, whitened);
            kernels::gram_parallel(whitened, gram);
        } else {
            kernels::whiten_serial(d.L, d.ptrs, whitened);
            kernels::gram_serial(whitened, gram);
        }
        benchmark::DoNotOptimize(gram.data());
    }
}

} // namespace

BENCHMARK(BM_GlHistory<false>)->Arg(2000)->Arg(20000)->Name("gl_history/serial");
BENCHMARK(BM_GlHistory<true>)->Arg(2000)->Arg(20000)->Name("gl_history/parallel");
BENCHMARK(BM_NewtonSystem<false>)->Args({12, 60})->Args({24, 200})->Name("newton_system/serial");
BENCHMARK(BM_NewtonSystem<true>)->Args({12, 60})->Args({24, 200})->Name("newton_system/parallel");

BENCHMARK_MAIN();
