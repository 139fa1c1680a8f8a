#pragma once

#include <optional>

#include "sfos/descriptor.hpp"
#include "sfos/lifting.hpp"

// Closed-loop descriptor pairs for the supported static controllers, with maps from
// the closed-loop state back to plant state, input and observation error.

namespace sfos {

// Which gains are set decides the controller:
//   K and L -> observer-based  u = K xhat,  E D xhat = A xhat + B u + L (C xhat - y)
//   K only  -> state feedback  u = K x
//   F       -> static output   u = F y
// For orders above 1, K is m x kn and L is kn x p in full chain coordinates.
struct Gains {
    std::optional<Matrix> K;
    std::optional<Matrix> L;
    std::optional<Matrix> F;
};

enum class ControllerKind { None, StateFeedback, Observer, Output };

const char* to_string(ControllerKind kind);
ControllerKind controller_kind(const Gains& gains);

struct ClosedLoop {
    ControllerKind kind = ControllerKind::None;
    Matrix E;
    Matrix A;
    double order = 1.0;
    int lift_factor = 1;
    // Closed-loop state -> plant state x, input u and (observer only) error e in plant dimension.
    Matrix state_map;
    Matrix input_map;
    Matrix error_map;
    // xi(0) = x_embed * x0 + e_embed * (x0 - xhat0).
    Matrix x_embed;
    Matrix e_embed;

    int dim() const { return static_cast<int>(E.rows()); }
    bool has_observer() const { return error_map.size() > 0; }
    Vector initial_state(const Vector& x0, const Vector& xhat0) const;
};

// Orders in (1, 2) are handled on the lifted chain: the plant runs in the reduced chain
// coordinates and the observer error in full chain coordinates.
ClosedLoop build_closed_loop(const DescriptorSystem& sys, const Gains& gains, int k = kDefaultLiftFactor);

} // namespace sfos
