#include "sfos/simulator.hpp"

#include <cmath>
#include <numeric>
#include <span>

#include "sfos/kernels.hpp"

namespace sfos {

std::vector<double> gl_weights(double alpha, std::size_t count) {
    require(alpha > 0.0 && alpha <= 1.0, "Grünwald–Letnikov weights need alpha in (0, 1]");
    require(count >= 1, "need at least one weight");
    std::vector<double> w(count);
    w[0] = 1.0;
    for (std::size_t j = 1; j < count; ++j) {
        w[j] = (1.0 - (alpha + 1.0) / static_cast<double>(j)) * w[j - 1];
    }
    return w;
}

Trajectory simulate(const ClosedLoop& loop, const DescriptorSystem& plant, const SimConfig& config) {
    require(config.h > 0.0 && std::isfinite(config.h), "step h must be positive");
    require(config.horizon >= config.h, "horizon must be at least one step");
    require(config.x0.size() == plant.n(), "x0 must have " + std::to_string(plant.n()) + " entries");
    require(config.x0.allFinite(), "x0 has non-finite entries");
    require(!config.memory_length || *config.memory_length >= 1, "memory length must be at least 1");

    Trajectory traj;
    Decomposition d;
    try {
        d = decompose(loop.E, loop.A, Matrix::Zero(loop.dim(), 1), plant.rank_tol());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("closed loop cannot be simulated: ") + e.what());
    }
    const int r = d.rank;
    const int f = loop.dim() - r;

    const Vector xhat0 = config.xhat0.size() > 0 ? config.xhat0 : Vector::Zero(plant.n());
    const Vector xi0 = loop.initial_state(config.x0, xhat0);
    const Vector w0 = d.N * xi0;
    const Vector xa0 = w0.head(r);
    if (f > 0) {
        const Vector xb0 = w0.tail(f);
        const double gap = (xb0 - d.Ab * xa0).norm();
        if (gap > 1e-9 * std::max(1.0, w0.norm())) {
            const std::string msg = "initial state violates the algebraic constraint by " + std::to_string(gap);
            if (config.strict) {
                throw InputError(msg);
            }
            traj.warnings.push_back(msg + "; fast part projected");
        }
    }

    const double beta = loop.order;
    const auto steps = static_cast<std::size_t>(std::llround(config.horizon / config.h));
    const std::size_t memory = config.memory_length ? std::min(*config.memory_length, steps) : steps;
    const std::vector<double> w = gl_weights(beta, memory + 1);
    std::vector<double> csum(w.size());
    std::partial_sum(w.begin(), w.end(), csum.begin());
    if (memory < steps) {
        const std::vector<double> all = gl_weights(beta, steps + 1);
        double omitted = 0.0;
        for (std::size_t j = memory + 1; j <= steps; ++j) {
            omitted += std::abs(all[j]);
        }
        traj.warnings.push_back("memory truncated to " + std::to_string(memory) +
                                " samples; omitted weight mass " + std::to_string(omitted));
    }

    const double hb = std::pow(config.h, -beta);
    const Matrix step_matrix = hb * Matrix::Identity(r, r) - d.Aa;
    Eigen::JacobiSVD<Matrix> svd(step_matrix);
    if (r > 0) {
        const auto& s = svd.singularValues();
        if (!(s(r - 1) > 1e-12 * s(0))) {
            throw NumericalError("implicit step matrix is near-singular; choose a smaller h");
        }
    }
    const auto lu = step_matrix.partialPivLu();

    Matrix plant_left;
    if (plant.singular()) {
        plant_left = annihilators(plant.E(), plant.rank()).left;
    }

    auto record = [&](std::size_t k, const Vector& xa) {
        Vector slow_fast(loop.dim());
        slow_fast << xa, d.Ab * xa;
        const Vector xi = d.N_inv * slow_fast;
        const Vector x = loop.state_map * xi;
        const Vector u = loop.input_map * xi;
        traj.times.push_back(static_cast<double>(k) * config.h);
        traj.algebraic_residual.push_back(f > 0 ? (d.A3 * xa + d.A4 * slow_fast.tail(f)).norm() : 0.0);
        traj.constraint_residual.push_back(plant_left.size() > 0 ? (plant_left * (plant.A() * x + plant.B() * u)).norm()
                                                                 : 0.0);
        traj.x.push_back(x);
        traj.u.push_back(u);
        if (loop.has_observer()) {
            traj.e.push_back(loop.error_map * xi);
        }
    };

    const std::size_t dim = static_cast<std::size_t>(r);
    std::vector<double> history;
    history.reserve((steps + 1) * dim);
    history.insert(history.end(), xa0.data(), xa0.data() + r);
    record(0, xa0);

    Vector conv(r), rhs(r), xa(r);
    for (std::size_t k = 1; k <= steps; ++k) {
        const std::size_t J = std::min(k, memory);
        if (r > 0) {
            const std::span<const double> weights(w.data(), J + 1);
            const std::span<const double> recent(history.data() + (k - J) * dim, J * dim);
            const std::span<double> out(conv.data(), dim);
            if (config.parallel) {
                kernels::gl_history_parallel(weights, recent, dim, out);
            } else {
                kernels::gl_history_serial(weights, recent, dim, out);
            }
            rhs = hb * (csum[J] * xa0 - conv);
            xa = lu.solve(rhs);
        }
        if (!xa.allFinite()) {
            throw NumericalError("simulation diverged at t = " + std::to_string(static_cast<double>(k) * config.h));
        }
        history.insert(history.end(), xa.data(), xa.data() + r);
        record(k, xa);
    }
    return traj;
}

Trajectory simulate(const DescriptorSystem& plant, const Gains& gains, const SimConfig& config, int k) {
    return simulate(build_closed_loop(plant, gains, k), plant, config);
}

namespace {

// Least-squares line through (x, y); returns slope and residual sum of squares.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - my - slope * (x[i] - mx);
        sse += e * e;
    }
    return {slope, sse};
}

} // namespace

DecayFit tail_decay_exponent(const std::vector<double>& times, const std::vector<double>& norms, double window) {
    require(times.size() == norms.size() && times.size() >= 3, "need at least three samples");
    require(window > 0.0 && window <= 1.0, "window must lie in (0, 1]");
    if (!(norms.back() < norms.front())) {
        throw InputError("trajectory does not decay; no tail exponent");
    }
    const auto first = static_cast<std::size_t>(std::floor((1.0 - window) * static_cast<double>(times.size())));
    std::vector<double> lt, t, ln;
    for (std::size_t i = first; i < times.size(); ++i) {
        if (times[i] > 0.0 && norms[i] > 0.0) {
            lt.push_back(std::log(times[i]));
            t.push_back(times[i]);
            ln.push_back(std::log(norms[i]));
        }
    }
    require(lt.size() >= 3, "too few positive samples in the tail window");
    const auto [slope, sse_log] = fit_line(lt, ln);
    const auto [rate, sse_lin] = fit_line(t, ln);
    (void)rate;
    return {slope, sse_log <= sse_lin};
}

DecayFit tail_decay_exponent(const Trajectory& traj, double window) {
    std::vector<double> norms;
    norms.reserve(traj.size());
    for (const auto& x : traj.x) {
        norms.push_back(x.norm());
    }
    return tail_decay_exponent(traj.times, norms, window);
}

} // namespace sfos
