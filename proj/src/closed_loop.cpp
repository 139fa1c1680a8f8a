#include "sfos/closed_loop.hpp"

namespace sfos {

namespace {

void check_shape(const Matrix& M, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (M.rows() != rows || M.cols() != cols) {
        throw InputError(std::string("gain ") + name + " must be " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(M.rows()) + "x" +
                         std::to_string(M.cols()));
    }
    if (!M.allFinite()) {
        throw InputError(std::string("gain ") + name + " has non-finite entries");
    }
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

// Plant (Ep, Ap, Bp, Cp) in the coordinates the plant runs in; Pk maps those
// coordinates to the ones K acts on; (Eo, Ao, Co) is the copy the observer error follows.
struct Realization {
    Matrix Ep, Ap, Bp, Cp;
    Matrix Pk;
    Matrix Eo, Ao, Co;
    Matrix x_of_plant; // n x dim(plant)
    Matrix plant_of_x; // dim(plant) x n
    Matrix x_of_obs;   // n x dim(obs)
    Matrix obs_of_x;   // dim(obs) x n
    double order = 1.0;
    int k = 1;
};

Realization realize(const DescriptorSystem& sys, int k) {
    Realization r;
    const int n = sys.n();
    if (sys.alpha() <= 1.0) {
        r.Ep = r.Eo = sys.E();
        r.Ap = r.Ao = sys.A();
        r.Bp = sys.B();
        r.Cp = r.Co = sys.C();
        r.Pk = Matrix::Identity(n, n);
        r.x_of_plant = r.plant_of_x = r.x_of_obs = r.obs_of_x = Matrix::Identity(n, n);
        r.order = sys.alpha();
        return r;
    }
    const LiftedSystem L = lift(sys, k);
    r.Ep = L.reduced.E();
    r.Ap = L.reduced.A();
    r.Bp = L.reduced.B();
    r.Cp = L.reduced.C();
    r.Pk = L.embedding;
    r.Eo = L.lifted.E();
    r.Ao = L.lifted.A();
    r.Co = L.lifted.C();
    r.x_of_plant = Matrix::Identity(n, L.reduced_dim());
    r.plant_of_x = Matrix::Identity(L.reduced_dim(), n);
    r.x_of_obs = Matrix::Identity(n, L.full_dim());
    r.obs_of_x = Matrix::Identity(L.full_dim(), n);
    r.order = L.lifted.alpha();
    r.k = k;
    return r;
}

} // namespace

const char* to_string(ControllerKind kind) {
    switch (kind) {
    case ControllerKind::None:
        return "none";
    case ControllerKind::StateFeedback:
        return "state";
    case ControllerKind::Observer:
        return "observer";
    case ControllerKind::Output:
        return "output";
    }
    return "?";
}

ControllerKind controller_kind(const Gains& gains) {
    if (gains.F) {
        require(!gains.K && !gains.L, "output feedback F cannot be combined with K or L");
        return ControllerKind::Output;
    }
    if (gains.K && gains.L) {
        return ControllerKind::Observer;
    }
    if (gains.K) {
        return ControllerKind::StateFeedback;
    }
    require(!gains.L, "an observer gain L needs a controller gain K");
    return ControllerKind::None;
}

Vector ClosedLoop::initial_state(const Vector& x0, const Vector& xhat0) const {
    require(x0.size() == x_embed.cols(), "initial state has the wrong dimension");
    Vector xi = x_embed * x0;
    if (has_observer()) {
        require(xhat0.size() == x0.size(), "observer initial state has the wrong dimension");
        xi += e_embed * (x0 - xhat0);
    }
    return xi;
}

ClosedLoop build_closed_loop(const DescriptorSystem& sys, const Gains& gains, int k) {
    const ControllerKind kind = controller_kind(gains);
    const Realization r = realize(sys, k);
    const auto np = r.Ep.rows();
    const auto no = r.Eo.rows();
    const int n = sys.n();
    const int m = sys.m();
    const int p = sys.p();

    ClosedLoop cl;
    cl.kind = kind;
    cl.order = r.order;
    cl.lift_factor = r.k;
    switch (kind) {
    case ControllerKind::None:
        cl.E = r.Ep;
        cl.A = r.Ap;
        cl.input_map = Matrix::Zero(m, np);
        break;
    case ControllerKind::StateFeedback: {
        check_shape(*gains.K, m, r.Pk.rows(), "K");
        const Matrix Kp = *gains.K * r.Pk;
        cl.E = r.Ep;
        cl.A = r.Ap + r.Bp * Kp;
        cl.input_map = Kp;
        break;
    }
    case ControllerKind::Output: {
        check_shape(*gains.F, m, p, "F");
        cl.E = r.Ep;
        cl.A = r.Ap + r.Bp * *gains.F * r.Cp;
        cl.input_map = *gains.F * r.Cp;
        break;
    }
    case ControllerKind::Observer: {
        check_shape(*gains.K, m, no, "K");
        check_shape(*gains.L, no, p, "L");
        const Matrix& K = *gains.K;
        const Matrix& L = *gains.L;
        // e = z - zhat in observer coordinates; u = K zhat = K Pk zeta - K e.
        cl.E = block_diag(r.Ep, r.Eo);
        cl.A = Matrix::Zero(np + no, np + no);
        cl.A.topLeftCorner(np, np) = r.Ap + r.Bp * K * r.Pk;
        cl.A.topRightCorner(np, no) = -r.Bp * K;
        cl.A.bottomRightCorner(no, no) = r.Ao + L * r.Co;
        cl.input_map.resize(m, np + no);
        cl.input_map << K * r.Pk, -K;
        cl.error_map = Matrix::Zero(n, np + no);
        cl.error_map.rightCols(no) = r.x_of_obs;
        cl.e_embed = Matrix::Zero(np + no, n);
        cl.e_embed.bottomRows(no) = r.obs_of_x;
        break;
    }
    }
    const auto dim = cl.E.rows();
    cl.state_map = Matrix::Zero(n, dim);
    cl.state_map.leftCols(np) = r.x_of_plant;
    cl.x_embed = Matrix::Zero(dim, n);
    cl.x_embed.topRows(np) = r.plant_of_x;
    return cl;
}

} // namespace sfos
