#include "sfos/lifting.hpp"

#include <cmath>

namespace sfos {

LiftedSystem lift(const DescriptorSystem& sys, int k) {
    if (!(sys.alpha() > 1.0)) {
        throw InputError("no lifting needed: alpha must exceed 1");
    }
    require(k >= 2, "lift factor k must be at least 2");
    const int n = sys.n();
    const int m = sys.m();
    const int p = sys.p();
    const int r = sys.rank();
    const int N = k * n;

    Matrix E = Matrix::Identity(N, N);
    E.topLeftCorner(n, n) = sys.E();
    Matrix A = Matrix::Zero(N, N);
    for (int i = 0; i + 1 < k; ++i) {
        A.block(i * n, (i + 1) * n, n, n) = Matrix::Identity(n, n);
    }
    A.block((k - 1) * n, 0, n, n) = sys.A();
    Matrix B = Matrix::Zero(N, m);
    B.bottomRows(n) = sys.B();
    Matrix C = Matrix::Zero(p, N);
    C.leftCols(n) = sys.C();

    DescriptorSystem lifted(E, A, B, C, sys.alpha() / k, sys.rank_tol());

    Eigen::JacobiSVD<Matrix> svd(sys.E(), Eigen::ComputeFullU);
    const Matrix U1 = svd.matrixU().leftCols(r);
    const int R = n + (k - 1) * r;
    Matrix T = Matrix::Zero(N, R);
    T.topLeftCorner(n, n) = Matrix::Identity(n, n);
    Matrix S = Matrix::Zero(R, N);
    for (int i = 1; i < k; ++i) {
        T.block(i * n, n + (i - 1) * r, n, r) = U1;
        S.block((i - 1) * r, (i - 1) * n, r, n) = U1.transpose();
    }
    S.bottomRightCorner(n, n) = Matrix::Identity(n, n);

    DescriptorSystem reduced(S * E * T, S * A * T, S * B, C * T, sys.alpha() / k, sys.rank_tol());
    return LiftedSystem{sys, k, std::move(lifted), std::move(T), std::move(S), std::move(reduced)};
}

AdmissibilityReport admissible_lifted(const DescriptorSystem& sys, int k) {
    const LiftedSystem L = lift(sys, k);
    AdmissibilityReport report = analyze(L.reduced);
    const AdmissibilityReport direct = analyze(sys);
    if (report.regular && direct.regular && report.stable != direct.stable) {
        throw NumericalError("lifted stability verdict disagrees with the direct sector test");
    }
    return report;
}

ComplexMatrix transfer_function(const DescriptorSystem& sys, Complex s) {
    const Complex sa = std::pow(s, sys.alpha());
    const ComplexMatrix pencil = sa * sys.E().cast<Complex>() - sys.A().cast<Complex>();
    const auto lu = pencil.fullPivLu();
    if (!lu.isInvertible()) {
        throw NumericalError("s^alpha E - A is singular at the requested point");
    }
    return sys.C().cast<Complex>() * lu.solve(sys.B().cast<Complex>());
}

} // namespace sfos
