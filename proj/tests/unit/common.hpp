#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "sfos/descriptor.hpp"

// Shared fixtures for the unit tests.

namespace fixture {

using sfos::Matrix;

inline Matrix example_E() {
    Matrix E(3, 3);
    E << 1, 1, 1, 0, 1, 1, 0, 0, 0;
    return E;
}

inline Matrix example_A() {
    Matrix A(3, 3);
    A << 1, 1, -1, 2, -2, -1, 4, 1, -4;
    return A;
}

inline Matrix example_B() { return Matrix::Ones(3, 1); }

inline Matrix example_C() {
    Matrix C(1, 3);
    C << 1, 0, 1;
    return C;
}

inline sfos::DescriptorSystem example(double alpha) {
    return sfos::DescriptorSystem(example_E(), example_A(), example_B(), example_C(), alpha);
}

inline Matrix published_K1() {
    Matrix K(1, 3);
    K << -3.1656, -0.4720, 2.4146;
    return K;
}

inline Matrix published_L1() {
    Matrix L(3, 1);
    L << -0.1821, 0.0996, 0.7768;
    return L;
}

inline Matrix published_K2() {
    Matrix K(1, 6);
    K << -0.8663, -0.2339, -0.2990, -1.0001, -0.7116, 0.2144;
    return K;
}

inline Matrix published_L2() {
    Matrix L(6, 1);
    L << -1.7022, 0.1766, -0.0905, -4.059, -0.0028, -6.4078;
    return L;
}

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

// Greedy nearest pairing, independent of the library's own matcher.
inline double max_pair_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) return 1e300;
    double worst = 0.0;
    for (const auto& x : a) {
        auto it = std::min_element(b.begin(), b.end(),
                                   [&](const auto& p, const auto& q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x) / std::max(1.0, std::abs(x)));
        b.erase(it);
    }
    return worst;
}

} // namespace fixture
