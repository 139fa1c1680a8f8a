#pragma once

#include <cstddef>
#include <span>

#include "sfos/types.hpp"

// Data-parallel inner loops. Each kernel has a plain serial reference used by
// the tests and benchmarks; the *_parallel versions are what the library calls.
// Parallel results never depend on the thread count.

namespace sfos::kernels {

// Grünwald–Letnikov history terms are summed in fixed-size chunks; partial sums
// are combined in chunk order.
inline constexpr std::size_t kHistoryChunk = 1024;

// out[c] = sum_{j=1}^{J} weights[j] * history[(J - j) * dim + c],
// where history holds J = history.size() / dim samples, oldest first.
void gl_history_serial(std::span<const double> weights, std::span<const double> history, std::size_t dim,
                       std::span<double> out);
void gl_history_parallel(std::span<const double> weights, std::span<const double> history, std::size_t dim,
                         std::span<double> out);

// Column a of `whitened` is vec(L^-1 F_a L^-T) for lower-triangular L.
void whiten_serial(const Matrix& L, std::span<const Matrix* const> coefficients, Matrix& whitened);
void whiten_parallel(const Matrix& L, std::span<const Matrix* const> coefficients, Matrix& whitened);

// gram = whitened^T * whitened, one dot product per entry.
void gram_serial(const Matrix& whitened, Matrix& gram);
void gram_parallel(const Matrix& whitened, Matrix& gram);

int max_threads();

} // namespace sfos::kernels
