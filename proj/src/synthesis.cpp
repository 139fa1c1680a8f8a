#include "sfos/synthesis.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "sfos/lifting.hpp"

namespace sfos {

namespace {

using lmi::AffineExpr;
using lmi::FpdmVariable;
using lmi::LmiBlock;
using lmi::SolveStatus;
using lmi::VariableRegistry;

// Plant data in the coordinates an LMI is written in.
struct PlantView {
    Matrix E, A, B, C;
    double order = 1.0;
    Matrix right; // n x (n - r); zero columns when E is nonsingular
    Matrix left;  // (n - r) x n
    int n() const { return static_cast<int>(E.rows()); }
    int defect() const { return static_cast<int>(right.cols()); }
};

PlantView make_view(const Matrix& E, const Matrix& A, const Matrix& B, const Matrix& C, double order,
                    double rank_tol) {
    require(order > 0.0 && order <= 1.0, "LMI conditions need an order in (0, 1]; lift first");
    PlantView v{E, A, B, C, order, {}, {}};
    const int n = static_cast<int>(E.rows());
    const int r = numerical_rank(E, rank_tol);
    if (r < n) {
        AnnihilatorPair ann = annihilators(E, r);
        v.right = std::move(ann.right);
        v.left = std::move(ann.left);
    } else {
        v.right = Matrix::Zero(n, 0);
        v.left = Matrix::Zero(0, n);
    }
    return v;
}

PlantView make_view(const DescriptorSystem& s) { return make_view(s.E(), s.A(), s.B(), s.C(), s.alpha(), s.rank_tol()); }

// The plant copy used by the state-feedback side and the copy used by the observer side.
struct Views {
    PlantView plant;
    PlantView observer;
    Matrix to_full; // K_full = K_plant * to_full
    int lift_factor = 1;
};

Views make_views(const DescriptorSystem& sys, int k) {
    if (sys.alpha() <= 1.0) {
        PlantView v = make_view(sys);
        return {v, v, Matrix::Identity(sys.n(), sys.n()), 1};
    }
    const LiftedSystem L = lift(sys, k);
    return {make_view(L.reduced), make_view(L.lifted), L.embedding.transpose(), k};
}

Certificate make_certificate(std::string name, VariableRegistry registry, std::vector<LmiBlock> blocks,
                             lmi::LmiSolution solution, const std::vector<FpdmVariable>& fpdm) {
    Certificate c{std::move(name), std::move(registry), std::move(blocks), std::move(solution), {}};
    for (const auto& e : c.registry.entries()) {
        c.values[e.name] = c.registry.value(e.name, c.solution.assignment);
    }
    for (const auto& f : fpdm) {
        c.values[f.name] = f.P.evaluate(c.solution.assignment);
    }
    return c;
}

lmi::SolverOptions solver_options(const SynthesisOptions& o, const std::string& name) {
    lmi::SolverOptions s;
    s.feas_margin = o.feas_margin;
    s.box_bound = o.box_bound;
    if (!o.trace_prefix.empty()) {
        s.trace_path = o.trace_prefix + "_" + name + ".json";
    }
    return s;
}

Certificate solve(const std::string& name, VariableRegistry registry, std::vector<LmiBlock> blocks,
                  const std::vector<FpdmVariable>& fpdm, const lmi::SolverOptions& options) {
    lmi::LmiSolution sol = lmi::solve_feasibility(blocks, registry, options);
    return make_certificate(name, std::move(registry), std::move(blocks), std::move(sol), fpdm);
}

// sym(A P E^T + A E1 Q + B R) < 0, variables named with the given prefixes.
// With a tilt weight W, tilt * trace(W R) is added to the solver objective.
Certificate solve_state_feedback(const PlantView& v, const std::string& name, const std::string& p,
                                 const std::string& q, const std::string& r, const SynthesisOptions& o,
                                 const Matrix* tilt_weight = nullptr, double tilt = 0.0) {
    VariableRegistry reg;
    FpdmVariable P = lmi::add_fpdm_variable(reg, p, v.n(), v.order);
    AffineExpr R = reg.add_rectangular(r, static_cast<int>(v.B.cols()), v.n());
    AffineExpr expr = v.A * P.P * v.E.transpose() + v.B * R;
    if (v.defect() > 0) {
        AffineExpr Q = reg.add_rectangular(q, v.defect(), v.n());
        expr += (v.A * v.right) * Q;
    }
    lmi::SolverOptions so = solver_options(o, name);
    if (tilt_weight) {
        so.objective_tilt = tilt * reg.linear_functional(r, *tilt_weight);
    }
    return solve(name, std::move(reg), {sym_of(expr, name), P.membership}, {P}, so);
}

// sym(E^T P A + Q E2 A + R C) < 0.
Certificate solve_output_injection(const PlantView& v, const SynthesisOptions& o) {
    VariableRegistry reg;
    FpdmVariable P = lmi::add_fpdm_variable(reg, "P2", v.n(), v.order);
    AffineExpr R = reg.add_rectangular("R2", v.n(), static_cast<int>(v.C.rows()));
    AffineExpr expr = v.E.transpose() * P.P * v.A + R * v.C;
    if (v.defect() > 0) {
        AffineExpr Q = reg.add_rectangular("Q2", v.n(), v.defect());
        expr += Q * (v.left * v.A);
    }
    return solve("output_injection", std::move(reg), {sym_of(expr, "output_injection"), P.membership}, {P},
                 solver_options(o, "output_injection"));
}

// [[Phi, (E^T P + Q E2) B + C^T H^T - K0^T G^T], [*, -G - G^T]] < 0
// with Phi = sym((E^T P + Q E2)(A + B K0)).
Certificate solve_stage2(const PlantView& v, const Matrix& K0, const SynthesisOptions& o, const std::string& name) {
    const int m = static_cast<int>(v.B.cols());
    const int p = static_cast<int>(v.C.rows());
    VariableRegistry reg;
    FpdmVariable P = lmi::add_fpdm_variable(reg, "P", v.n(), v.order);
    AffineExpr G = reg.add_rectangular("G", m, m);
    AffineExpr H = reg.add_rectangular("H", m, p);
    AffineExpr lyap = v.E.transpose() * P.P;
    if (v.defect() > 0) {
        AffineExpr Q = reg.add_rectangular("Q", v.n(), v.defect());
        lyap += Q * v.left;
    }
    const Matrix Acl = v.A + v.B * K0;
    AffineExpr phi = lmi::sym(lyap * Acl);
    AffineExpr off = lyap * v.B + v.C.transpose() * H.transpose() - K0.transpose() * G.transpose();
    AffineExpr block = lmi::assemble({{phi, off}, {off.transpose(), -lmi::sym(G)}});
    return solve(name, std::move(reg), {LmiBlock::from_expr(block, name), P.membership}, {P},
                 solver_options(o, name));
}

Matrix checked_inverse(const Matrix& M, SynthesisErrorKind kind, const std::string& what, const Certificate& cert) {
    const double cond = condition_number(M);
    if (!(cond <= kGainConditionLimit)) {
        SynthesisError err(kind, what + " is ill-conditioned (condition number " + std::to_string(cond) + ")");
        err.certificate = cert;
        throw err;
    }
    return M.fullPivLu().inverse();
}

Matrix recover_state_gain(const PlantView& v, const Certificate& c, const std::string& p, const std::string& q,
                          const std::string& r) {
    Matrix M = c.values.at(p) * v.E.transpose();
    if (v.defect() > 0) {
        M += v.right * c.values.at(q);
    }
    return c.values.at(r) * checked_inverse(M, SynthesisErrorKind::GainRecoverySingular, p + " E^T + E1 " + q, c);
}

// Uniform weights in [-1, 1) from raw 64-bit draws, identical on every platform.
Matrix random_weight(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    Matrix W(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            W(i, j) = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
        }
    }
    return W;
}

void check_inputs(const DescriptorSystem& sys) {
    require(sys.B().allFinite() && sys.C().allFinite(), "B and C must be finite");
}

ObserverDesign observer_attempt(const DescriptorSystem& sys, const SynthesisOptions& o) {
    const Views views = make_views(sys, o.lift_factor);

    Certificate sf = solve_state_feedback(views.plant, "state_feedback", "P1", "Q1", "R1", o);
    if (sf.solution.status == SolveStatus::Infeasible) {
        SynthesisError err(SynthesisErrorKind::StateFeedbackInfeasible, "state-feedback LMI is infeasible");
        err.certificate = sf;
        throw err;
    }
    if (sf.solution.status == SolveStatus::NumericalFailure) {
        SynthesisError err(SynthesisErrorKind::NumericalFailure, "state-feedback LMI: " + sf.solution.message);
        err.certificate = sf;
        throw err;
    }
    Certificate oi = solve_output_injection(views.observer, o);
    if (oi.solution.status == SolveStatus::Infeasible) {
        SynthesisError err(SynthesisErrorKind::OutputInjectionInfeasible, "output-injection LMI is infeasible");
        err.certificate = oi;
        throw err;
    }
    if (oi.solution.status == SolveStatus::NumericalFailure) {
        SynthesisError err(SynthesisErrorKind::NumericalFailure, "output-injection LMI: " + oi.solution.message);
        err.certificate = oi;
        throw err;
    }

    const Matrix K_plant = recover_state_gain(views.plant, sf, "P1", "Q1", "R1");
    Matrix M = views.observer.E.transpose() * oi.values.at("P2");
    if (views.observer.defect() > 0) {
        M += oi.values.at("Q2") * views.observer.left;
    }
    const Matrix L = checked_inverse(M, SynthesisErrorKind::GainRecoverySingular, "E^T P2 + Q2 E2", oi) *
                     oi.values.at("R2");

    ObserverDesign d;
    d.K = K_plant * views.to_full;
    d.L = L;
    d.state_feedback = std::move(sf);
    d.output_injection = std::move(oi);
    d.lift_factor = views.lift_factor;
    d.feas_margin = o.feas_margin;
    d.closed_loop_report = verify_design(sys, Gains{d.K, d.L, std::nullopt}, o.lift_factor);
    if (!d.closed_loop_report.admissible) {
        throw SynthesisError(SynthesisErrorKind::VerificationFailed,
                             "LMIs feasible but the augmented closed loop is not admissible");
    }
    return d;
}

OutputFeedbackDesign output_attempt(const DescriptorSystem& sys, const SynthesisOptions& o) {
    const Views views = make_views(sys, o.lift_factor);
    const PlantView& v = views.plant;
    std::mt19937_64 rng(o.seed);
    std::vector<Matrix> attempts;

    for (int attempt = 0; attempt <= o.retries; ++attempt) {
        const std::string suffix = attempt == 0 ? "" : "_retry" + std::to_string(attempt);
        Matrix W;
        if (attempt > 0) {
            W = random_weight(rng, v.n(), v.B.cols());
        }
        Certificate s1 = solve_state_feedback(v, "stage1" + suffix, "X", "Y", "Z", o, attempt > 0 ? &W : nullptr,
                                              o.tilt);
        if (!s1.solution.feasible()) {
            if (attempt == 0) {
                const bool certified = s1.solution.status == SolveStatus::Infeasible;
                SynthesisError err(certified ? SynthesisErrorKind::Stage1Infeasible
                                             : SynthesisErrorKind::NumericalFailure,
                                   certified ? "stage-1 state-feedback LMI is infeasible"
                                             : "stage-1 LMI: " + s1.solution.message);
                err.certificate = s1;
                throw err;
            }
            continue;
        }
        const Matrix K0 = recover_state_gain(v, s1, "X", "Y", "Z");
        attempts.push_back(K0 * views.to_full);

        Certificate s2 = solve_stage2(v, K0, o, "stage2" + suffix);
        if (!s2.solution.feasible()) {
            continue;
        }
        const Matrix F = checked_inverse(s2.values.at("G"), SynthesisErrorKind::GInversionSingular, "G", s2) *
                         s2.values.at("H");

        OutputFeedbackDesign d;
        d.K0 = attempts.back();
        d.F = F;
        d.stage1 = std::move(s1);
        d.stage2 = std::move(s2);
        d.attempts = attempt + 1;
        d.lift_factor = views.lift_factor;
        d.feas_margin = o.feas_margin;
        d.closed_loop_report = verify_design(sys, Gains{std::nullopt, std::nullopt, F}, o.lift_factor);
        if (!d.closed_loop_report.admissible) {
            SynthesisError err(SynthesisErrorKind::VerificationFailed,
                               "LMIs feasible but E D x = (A + B F C) x is not admissible");
            err.k0_attempts = attempts;
            throw err;
        }
        return d;
    }
    SynthesisError err(SynthesisErrorKind::Stage2ExhaustedRetries,
                       "stage-2 LMI infeasible for all " + std::to_string(attempts.size()) + " intermediate gains");
    err.k0_attempts = std::move(attempts);
    throw err;
}

template <typename Attempt>
auto with_verification_retry(const DescriptorSystem& sys, const SynthesisOptions& o, Attempt attempt) {
    try {
        return attempt(sys, o);
    } catch (const SynthesisError& e) {
        if (e.kind() != SynthesisErrorKind::VerificationFailed) {
            throw;
        }
    }
    SynthesisOptions wider = o;
    wider.feas_margin *= 10.0;
    return attempt(sys, wider);
}

} // namespace

const char* to_string(SynthesisErrorKind kind) {
    switch (kind) {
    case SynthesisErrorKind::StateFeedbackInfeasible:
        return "StateFeedbackInfeasible";
    case SynthesisErrorKind::OutputInjectionInfeasible:
        return "OutputInjectionInfeasible";
    case SynthesisErrorKind::GainRecoverySingular:
        return "GainRecoverySingular";
    case SynthesisErrorKind::VerificationFailed:
        return "VerificationFailed";
    case SynthesisErrorKind::Stage1Infeasible:
        return "Stage1Infeasible";
    case SynthesisErrorKind::Stage2ExhaustedRetries:
        return "Stage2ExhaustedRetries";
    case SynthesisErrorKind::GInversionSingular:
        return "GInversionSingular";
    case SynthesisErrorKind::NumericalFailure:
        return "NumericalFailure";
    }
    return "?";
}

SynthesisError::SynthesisError(SynthesisErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

bool SynthesisError::certified_infeasible() const {
    return kind_ == SynthesisErrorKind::StateFeedbackInfeasible || kind_ == SynthesisErrorKind::OutputInjectionInfeasible ||
           kind_ == SynthesisErrorKind::Stage1Infeasible;
}

double condition_number(const Matrix& M) {
    if (M.size() == 0) {
        return 1.0;
    }
    Eigen::JacobiSVD<Matrix> svd(M);
    const Vector& s = svd.singularValues();
    const double smallest = s(s.size() - 1);
    if (!(smallest > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return s(0) / smallest;
}

LmiAdmissibility admissible_via_lmi(const DescriptorSystem& sys, Side side, const SynthesisOptions& options) {
    const PlantView v = make_view(sys);
    VariableRegistry reg;
    FpdmVariable P = lmi::add_fpdm_variable(reg, "P", v.n(), v.order);
    AffineExpr expr;
    std::string name;
    if (side == Side::Right) {
        name = "admissibility_right";
        expr = v.A * P.P * v.E.transpose();
        if (v.defect() > 0) {
            expr += (v.A * v.right) * reg.add_rectangular("Q", v.defect(), v.n());
        }
    } else {
        name = "admissibility_left";
        expr = v.E.transpose() * P.P * v.A;
        if (v.defect() > 0) {
            expr += reg.add_rectangular("Q", v.n(), v.defect()) * (v.left * v.A);
        }
    }
    LmiAdmissibility out;
    out.certificate = solve(name, std::move(reg), {sym_of(expr, name), P.membership}, {P}, solver_options(options, name));
    out.status = out.certificate.solution.status;
    out.admissible = out.status == SolveStatus::Feasible;
    return out;
}

ObserverDesign synth_observer(const DescriptorSystem& sys, const SynthesisOptions& options) {
    check_inputs(sys);
    return with_verification_retry(sys, options, observer_attempt);
}

OutputFeedbackDesign synth_output_feedback(const DescriptorSystem& sys, const SynthesisOptions& options) {
    check_inputs(sys);
    require(options.retries >= 0, "retries must be non-negative");
    return with_verification_retry(sys, options, output_attempt);
}

AdmissibilityReport verify_design(const DescriptorSystem& sys, const Gains& gains, int k) {
    const ClosedLoop cl = build_closed_loop(sys, gains, k);
    return analyze(cl.E, cl.A, cl.order, sys.rank_tol());
}

} // namespace sfos
