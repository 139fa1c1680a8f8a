#pragma once

#include "sfos/descriptor.hpp"

// Orders in (1, 2): the chain z1 = x, E D^b z1 = z2, D^b z_i = z_{i+1}, D^b z_k = A z1 + B u
// with b = alpha / k < 1 carries the same transfer function as the original plant.

namespace sfos {

inline constexpr int kDefaultLiftFactor = 2;

struct LiftedSystem {
    DescriptorSystem base;
    int k = kDefaultLiftFactor;
    // Full chain realization: diag(E, I), block companion A, [0; ...; B], [C, 0, ..., 0].
    DescriptorSystem lifted;
    // z_{i>1} always lie in range(E). With U1 an orthonormal basis of range(E),
    // embedding = blockdiag(I_n, U1, ..., U1) maps reduced to full chain coordinates and
    // row_projection = blockdiag(U1^T, ..., U1^T, I_n) drops the rows that vanish there.
    Matrix embedding;
    Matrix row_projection;
    // (S Ebar T, S Abar T, S Bbar, Cbar T): impulse-free whenever the plant is, unlike the
    // full chain when E is singular.
    DescriptorSystem reduced;

    int full_dim() const { return lifted.n(); }
    int reduced_dim() const { return reduced.n(); }
};

LiftedSystem lift(const DescriptorSystem& sys, int k = kDefaultLiftFactor);

// Pencil analysis of the reduced chain. Throws NumericalError if its stability verdict
// disagrees with the sector test applied directly to the original finite eigenvalues.
AdmissibilityReport admissible_lifted(const DescriptorSystem& sys, int k = kDefaultLiftFactor);

// C (s^alpha E - A)^-1 B on the principal branch of s^alpha.
ComplexMatrix transfer_function(const DescriptorSystem& sys, Complex s);

} // namespace sfos
