#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfos/closed_loop.hpp"
#include "sfos/descriptor.hpp"

// Time-domain simulation of E D^alpha xi = A xi (closed loops are autonomous) by
// slow/fast splitting and an implicit Grünwald–Letnikov step on the slow part,
// applied to x_a - x_a(0) so constants have zero derivative.

namespace sfos {

// w_0 = 1, w_j = (1 - (alpha + 1) / j) w_{j-1}; `count` weights, alpha in (0, 1].
std::vector<double> gl_weights(double alpha, std::size_t count);

struct SimConfig {
    double h = 1e-3;
    double horizon = 20.0;
    // Number of past samples in the convolution; nullopt keeps the full history.
    std::optional<std::size_t> memory_length;
    Vector x0;
    // Observer initial estimate; zero when empty.
    Vector xhat0;
    // Throw on inconsistent initial data instead of projecting the fast part.
    bool strict = false;
    bool parallel = true;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> x;
    std::vector<Vector> u;
    std::vector<Vector> e;
    // |A3 x_a + A4 x_b| in decomposed coordinates, per sample.
    std::vector<double> algebraic_residual;
    // |E2 (A x + B u)| of the original plant, per sample.
    std::vector<double> constraint_residual;
    std::vector<std::string> warnings;

    std::size_t size() const { return times.size(); }
};

Trajectory simulate(const ClosedLoop& loop, const DescriptorSystem& plant, const SimConfig& config);
Trajectory simulate(const DescriptorSystem& plant, const Gains& gains, const SimConfig& config,
                    int k = kDefaultLiftFactor);

struct DecayFit {
    double exponent = 0.0;
    // True when log|x| is better explained by log t than by t over the window.
    bool power_law = true;
};

// Least-squares slope of log|x(t)| against log t over the last `window` fraction of samples.
DecayFit tail_decay_exponent(const std::vector<double>& times, const std::vector<double>& norms, double window = 0.5);
DecayFit tail_decay_exponent(const Trajectory& traj, double window = 0.5);

} // namespace sfos
