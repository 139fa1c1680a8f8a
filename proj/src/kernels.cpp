#include "sfos/kernels.hpp"

#include <algorithm>
#include <vector>

#include <omp.h>

namespace sfos::kernels {

namespace {

void check_history(std::span<const double> weights, std::span<const double> history, std::size_t dim,
                   std::span<double> out) {
    require(dim > 0 && out.size() == dim, "history output must have dim entries");
    require(history.size() % dim == 0, "history length must be a multiple of dim");
    require(weights.size() > history.size() / dim, "not enough weights for the history length");
}

Matrix whiten_one(const Matrix& L, const Matrix& F) {
    const auto lower = L.triangularView<Eigen::Lower>();
    const Matrix half = lower.solve(F);
    return lower.solve(half.transpose()).transpose();
}

} // namespace

void gl_history_serial(std::span<const double> weights, std::span<const double> history, std::size_t dim,
                       std::span<double> out) {
    check_history(weights, history, dim, out);
    const std::size_t steps = history.size() / dim;
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 1; j <= steps; ++j) {
        const double w = weights[j];
        const double* row = history.data() + (steps - j) * dim;
        for (std::size_t c = 0; c < dim; ++c) {
            out[c] += w * row[c];
        }
    }
}

void gl_history_parallel(std::span<const double> weights, std::span<const double> history, std::size_t dim,
                         std::span<double> out) {
    check_history(weights, history, dim, out);
    const std::size_t steps = history.size() / dim;
    const std::size_t chunks = (steps + kHistoryChunk - 1) / kHistoryChunk;
    std::vector<double> partial(chunks * dim, 0.0);

#pragma omp parallel for schedule(static) if (chunks > 1)
    for (std::ptrdiff_t chunk = 0; chunk < static_cast<std::ptrdiff_t>(chunks); ++chunk) {
        double* acc = partial.data() + chunk * dim;
        const std::size_t first = 1 + static_cast<std::size_t>(chunk) * kHistoryChunk;
        const std::size_t last = std::min(steps, first + kHistoryChunk - 1);
        for (std::size_t j = first; j <= last; ++j) {
            const double w = weights[j];
            const double* row = history.data() + (steps - j) * dim;
            for (std::size_t c = 0; c < dim; ++c) {
                acc[c] += w * row[c];
            }
        }
    }

    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t chunk = 0; chunk < chunks; ++chunk) {
        for (std::size_t c = 0; c < dim; ++c) {
            out[c] += partial[chunk * dim + c];
        }
    }
}

void whiten_serial(const Matrix& L, std::span<const Matrix* const> coefficients, Matrix& whitened) {
    const auto d = L.rows();
    whitened.resize(d * d, static_cast<Eigen::Index>(coefficients.size()));
    for (std::size_t a = 0; a < coefficients.size(); ++a) {
        const Matrix g = whiten_one(L, *coefficients[a]);
        whitened.col(static_cast<Eigen::Index>(a)) = g.reshaped();
    }
}

void whiten_parallel(const Matrix& L, std::span<const Matrix* const> coefficients, Matrix& whitened) {
    const auto d = L.rows();
    const auto count = static_cast<std::ptrdiff_t>(coefficients.size());
    whitened.resize(d * d, count);
#pragma omp parallel for schedule(static) if (count > 8)
    for (std::ptrdiff_t a = 0; a < count; ++a) {
        const Matrix g = whiten_one(L, *coefficients[a]);
        whitened.col(a) = g.reshaped();
    }
}

void gram_serial(const Matrix& whitened, Matrix& gram) {
    const auto k = whitened.cols();
    gram.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i; j < k; ++j) {
            gram(i, j) = whitened.col(i).dot(whitened.col(j));
            gram(j, i) = gram(i, j);
        }
    }
}

void gram_parallel(const Matrix& whitened, Matrix& gram) {
    const auto k = whitened.cols();
    gram.resize(k, k);
#pragma omp parallel for schedule(dynamic, 4) if (k > 16)
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i; j < k; ++j) {
            gram(i, j) = whitened.col(i).dot(whitened.col(j));
        }
    }
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            gram(i, j) = gram(j, i);
        }
    }
}

int max_threads() { return omp_get_max_threads(); }

} // namespace sfos::kernels
