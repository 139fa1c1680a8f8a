#include "sfos/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>

#include <json.hpp>

#include "sfos/kernels.hpp"

namespace sfos::lmi {

namespace {

bool is_zero(const Matrix& m) { return (m.array() == 0.0).all(); }

void check_same_shape(const AffineExpr& a, const AffineExpr& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InputError("dimension mismatch: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

double asymmetry(const Matrix& m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

} // namespace

AffineExpr::AffineExpr(Matrix constant) : constant_(std::move(constant)) {}

AffineExpr AffineExpr::zero(Eigen::Index rows, Eigen::Index cols) { return AffineExpr(Matrix::Zero(rows, cols)); }

AffineExpr AffineExpr::slot(int index, Matrix coefficient) {
    AffineExpr e(Matrix::Zero(coefficient.rows(), coefficient.cols()));
    if (!is_zero(coefficient)) {
        e.terms_.emplace(index, std::move(coefficient));
    }
    return e;
}

Matrix AffineExpr::evaluate(const Vector& x) const {
    Matrix out = constant_;
    for (const auto& [s, c] : terms_) {
        require(s < x.size(), "assignment shorter than the referenced slots");
        out += x[s] * c;
    }
    return out;
}

AffineExpr AffineExpr::transpose() const {
    AffineExpr t(constant_.transpose());
    for (const auto& [s, c] : terms_) {
        t.terms_.emplace(s, c.transpose());
    }
    return t;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
    check_same_shape(*this, other);
    constant_ += other.constant_;
    for (const auto& [s, c] : other.terms_) {
        auto it = terms_.find(s);
        if (it == terms_.end()) {
            terms_.emplace(s, c);
        } else {
            it->second += c;
            if (is_zero(it->second)) {
                terms_.erase(it);
            }
        }
    }
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) { return *this += -1.0 * other; }

AffineExpr& AffineExpr::operator*=(double scale) {
    constant_ *= scale;
    if (scale == 0.0) {
        terms_.clear();
    }
    for (auto& [s, c] : terms_) {
        c *= scale;
    }
    return *this;
}

AffineExpr operator*(const Matrix& left, const AffineExpr& a) {
    if (left.cols() != a.rows()) {
        throw InputError("dimension mismatch in product: " + std::to_string(left.cols()) + " vs " +
                         std::to_string(a.rows()));
    }
    AffineExpr out(left * a.constant_);
    for (const auto& [s, c] : a.terms_) {
        Matrix p = left * c;
        if (!is_zero(p)) {
            out.terms_.emplace(s, std::move(p));
        }
    }
    return out;
}

AffineExpr operator*(const AffineExpr& a, const Matrix& right) {
    if (a.cols() != right.rows()) {
        throw InputError("dimension mismatch in product: " + std::to_string(a.cols()) + " vs " +
                         std::to_string(right.rows()));
    }
    AffineExpr out(a.constant_ * right);
    for (const auto& [s, c] : a.terms_) {
        Matrix p = c * right;
        if (!is_zero(p)) {
            out.terms_.emplace(s, std::move(p));
        }
    }
    return out;
}

AffineExpr operator+(const AffineExpr& a, const Matrix& b) { return a + AffineExpr(b); }
AffineExpr operator+(const Matrix& a, const AffineExpr& b) { return AffineExpr(a) + b; }

AffineExpr assemble(const std::vector<std::vector<AffineExpr>>& blocks) {
    require(!blocks.empty() && !blocks.front().empty(), "empty block assembly");
    const std::size_t nr = blocks.size();
    const std::size_t nc = blocks.front().size();
    std::vector<Eigen::Index> heights(nr), widths(nc);
    for (std::size_t i = 0; i < nr; ++i) {
        require(blocks[i].size() == nc, "ragged block assembly");
        heights[i] = blocks[i][0].rows();
    }
    for (std::size_t j = 0; j < nc; ++j) {
        widths[j] = blocks[0][j].cols();
    }
    Eigen::Index total_r = 0, total_c = 0;
    for (auto h : heights) total_r += h;
    for (auto w : widths) total_c += w;

    Matrix constant = Matrix::Zero(total_r, total_c);
    std::map<int, Matrix> terms;
    Eigen::Index r0 = 0;
    for (std::size_t i = 0; i < nr; ++i) {
        Eigen::Index c0 = 0;
        for (std::size_t j = 0; j < nc; ++j) {
            const AffineExpr& b = blocks[i][j];
            if (b.rows() != heights[i] || b.cols() != widths[j]) {
                throw InputError("dimension mismatch in block (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
            constant.block(r0, c0, heights[i], widths[j]) = b.constant();
            for (const auto& [s, c] : b.terms()) {
                auto [it, inserted] = terms.try_emplace(s, Matrix::Zero(total_r, total_c));
                it->second.block(r0, c0, heights[i], widths[j]) = c;
            }
            c0 += widths[j];
        }
        r0 += heights[i];
    }
    AffineExpr out(std::move(constant));
    for (auto& [s, c] : terms) {
        out += AffineExpr::slot(s, std::move(c));
    }
    return out;
}

AffineExpr sym(const AffineExpr& expr) {
    require(expr.rows() == expr.cols(), "sym of a non-square expression");
    return expr + expr.transpose();
}

const VariableEntry& VariableRegistry::add(const std::string& name, VariableKind kind, int rows, int cols,
                                           int count) {
    require(!contains(name), "duplicate variable name: " + name);
    require(rows > 0 && cols > 0, "variable " + name + " needs positive dimensions");
    entries_.push_back({name, kind, rows, cols, slots_, count});
    slots_ += count;
    return entries_.back();
}

AffineExpr VariableRegistry::add_symmetric(const std::string& name, int k) {
    add(name, VariableKind::Symmetric, k, k, k * (k + 1) / 2);
    return expr(name);
}

AffineExpr VariableRegistry::add_skew(const std::string& name, int k) {
    add(name, VariableKind::Skew, k, k, k * (k - 1) / 2);
    return expr(name);
}

AffineExpr VariableRegistry::add_rectangular(const std::string& name, int rows, int cols) {
    add(name, VariableKind::Rectangular, rows, cols, rows * cols);
    return expr(name);
}

bool VariableRegistry::contains(const std::string& name) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const VariableEntry& e) { return e.name == name; });
}

const VariableEntry& VariableRegistry::entry(const std::string& name) const {
    for (const auto& e : entries_) {
        if (e.name == name) {
            return e;
        }
    }
    throw InputError("unknown variable: " + name);
}

AffineExpr VariableRegistry::expr(const std::string& name) const {
    const VariableEntry& e = entry(name);
    AffineExpr out = AffineExpr::zero(e.rows, e.cols);
    int s = e.offset;
    switch (e.kind) {
    case VariableKind::Symmetric:
        for (int i = 0; i < e.rows; ++i) {
            for (int j = i; j < e.rows; ++j) {
                Matrix c = Matrix::Zero(e.rows, e.rows);
                c(i, j) = 1.0;
                c(j, i) = 1.0;
                out += AffineExpr::slot(s++, std::move(c));
            }
        }
        break;
    case VariableKind::Skew:
        for (int i = 0; i < e.rows; ++i) {
            for (int j = i + 1; j < e.rows; ++j) {
                Matrix c = Matrix::Zero(e.rows, e.rows);
                c(i, j) = 1.0;
                c(j, i) = -1.0;
                out += AffineExpr::slot(s++, std::move(c));
            }
        }
        break;
    case VariableKind::Rectangular:
        for (int i = 0; i < e.rows; ++i) {
            for (int j = 0; j < e.cols; ++j) {
                Matrix c = Matrix::Zero(e.rows, e.cols);
                c(i, j) = 1.0;
                out += AffineExpr::slot(s++, std::move(c));
            }
        }
        break;
    }
    return out;
}

Matrix VariableRegistry::value(const std::string& name, const Vector& x) const {
    require(x.size() == slots_, "assignment size does not match the registry");
    return expr(name).evaluate(x);
}

Vector VariableRegistry::linear_functional(const std::string& name, const Matrix& W) const {
    const VariableEntry& e = entry(name);
    require(W.rows() == e.cols && W.cols() == e.rows, "functional weight has the wrong shape for " + name);
    Vector c = Vector::Zero(slots_);
    const AffineExpr v = expr(name);
    for (const auto& [s, coef] : v.terms()) {
        c[s] = (W * coef).trace();
    }
    return c;
}

Matrix LmiBlock::evaluate(const Vector& x) const {
    Matrix out = constant;
    for (const auto& [s, c] : coefficients) {
        require(s < x.size(), "assignment shorter than the referenced slots");
        out += x[s] * c;
    }
    return out;
}

LmiBlock LmiBlock::from_expr(const AffineExpr& expr, std::string name) {
    require(expr.rows() == expr.cols(), "LMI block must be square");
    constexpr double tol = 1e-10;
    if (asymmetry(expr.constant()) > tol) {
        throw InputError("LMI block constant term is not symmetric");
    }
    LmiBlock block;
    block.name = std::move(name);
    block.constant = 0.5 * (expr.constant() + expr.constant().transpose());
    for (const auto& [s, c] : expr.terms()) {
        if (asymmetry(c) > tol) {
            throw InputError("LMI block coefficient of slot " + std::to_string(s) + " is not symmetric");
        }
        block.coefficients.emplace_back(s, 0.5 * (c + c.transpose()));
    }
    return block;
}

LmiBlock sym_of(const AffineExpr& expr, std::string name) { return LmiBlock::from_expr(sym(expr), std::move(name)); }

FpdmVariable add_fpdm_variable(VariableRegistry& registry, const std::string& name, int k, double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, "fractional PD variables need order in (0, 1]");
    FpdmVariable v;
    v.name = name;
    v.X = registry.add_symmetric(name + ".X", k);
    v.Y = registry.add_skew(name + ".Y", k);
    const double theta = alpha * std::numbers::pi / 2.0;
    v.P = std::sin(theta) * v.X + std::cos(theta) * v.Y;
    const AffineExpr block = assemble({{v.X, v.Y}, {-v.Y, v.X}});
    v.membership = LmiBlock::from_expr(-block, name + " membership");
    return v;
}

const char* to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::Feasible:
        return "Feasible";
    case SolveStatus::Infeasible:
        return "Infeasible";
    case SolveStatus::NumericalFailure:
        return "NumericalFailure";
    }
    return "?";
}

double LmiSolution::worst_margin() const {
    double w = -std::numeric_limits<double>::infinity();
    for (double m : margins) {
        w = std::max(w, m);
    }
    return w;
}

double max_eigenvalue(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigenvalue computation did not converge");
    }
    return es.eigenvalues().maxCoeff();
}

namespace {

std::mutex audit_mutex;
CertificateAudit audit_hook;

using nlohmann::json;

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// One LMI block prepared for the barrier: slot list includes t last.
struct Work {
    const LmiBlock* block = nullptr;
    std::vector<int> slots;
    std::vector<const Matrix*> coefficients;
    Matrix negative_identity;
};

class BarrierSolver {
  public:
    BarrierSolver(const std::vector<LmiBlock>& blocks, int n_slots, const SolverOptions& options)
        : blocks_(blocks), n_(n_slots), options_(options) {
        work_.reserve(blocks.size());
        for (const auto& b : blocks) {
            Work w;
            w.block = &b;
            w.negative_identity = -Matrix::Identity(b.dim(), b.dim());
            for (const auto& [s, c] : b.coefficients) {
                w.slots.push_back(s);
                w.coefficients.push_back(&c);
            }
            w.slots.push_back(n_);
            w.coefficients.push_back(&w.negative_identity);
            work_.push_back(std::move(w));
            nu_ += static_cast<double>(b.dim());
        }
        // Moving each Work into work_ relocated its negative_identity.
        for (auto& w : work_) {
            w.coefficients.back() = &w.negative_identity;
        }
        nu_ += 2.0 * n_;
        tilt_ = Vector::Zero(n_);
        if (options_.objective_tilt.size() > 0) {
            tilt_ = options_.objective_tilt;
        }
    }

    LmiSolution run() {
        const double box = options_.box_bound;
        Vector z = Vector::Zero(n_ + 1);
        double t0 = -std::numeric_limits<double>::infinity();
        for (const auto& b : blocks_) {
            t0 = std::max(t0, max_eigenvalue(b.constant));
        }
        z[n_] = t0 + 1.0;

        const bool tilted = tilt_.size() > 0 && tilt_.cwiseAbs().maxCoeff() > 0.0;
        double tau = initial_tau(z);
        int steps = 0;
        int outer = 0;
        bool centered = false;
        bool certified_infeasible = false;
        double lower_bound = -std::numeric_limits<double>::infinity();
        std::string message;

        Vector grad(n_ + 1);
        Matrix hess(n_ + 1, n_ + 1);
        while (true) {
            centered = false;
            bool stalled = false;
            // Consecutive steps spent in the quadratic region without reaching the centring
            // threshold; at large tau rounding keeps the decrement from shrinking further.
            int plateau = 0;
            while (steps < options_.max_newton_steps) {
                if (!derivatives(z, tau, grad, hess)) {
                    message = "iterate left the barrier domain";
                    stalled = true;
                    break;
                }
                Vector dz;
                if (!newton_direction(hess, grad, dz)) {
                    message = "Newton system could not be factored";
                    stalled = true;
                    break;
                }
                const double decrement2 = -grad.dot(dz);
                if (!std::isfinite(decrement2)) {
                    message = "non-finite Newton decrement";
                    stalled = true;
                    break;
                }
                if (decrement2 <= 1e-6) {
                    centered = true;
                    last_decrement_ = std::sqrt(std::max(0.0, decrement2));
                    break;
                }
                if (decrement2 < 0.05) {
                    if (++plateau >= 8) {
                        centered = true;
                        last_decrement_ = std::sqrt(0.05);
                        break;
                    }
                } else {
                    plateau = 0;
                }
                double step = 1.0;
                bool accepted = false;
                // Inside the quadratic region the full step stays in the domain; skip the
                // function-value test, which loses meaning at working precision.
                if (decrement2 < 0.0625) {
                    Vector trial = z + dz;
                    if (objective(trial, tau)) {
                        z = std::move(trial);
                        accepted = true;
                    }
                }
                const double f0 = objective(z, tau).value();
                while (!accepted && step > 1e-14) {
                    Vector trial = z + step * dz;
                    const auto f1 = objective(trial, tau);
                    if (f1 && *f1 <= f0 - 0.01 * step * decrement2) {
                        z = std::move(trial);
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                ++steps;
                record(steps, tau, z, std::sqrt(decrement2), accepted ? step : 0.0);
                if (!accepted) {
                    // No decrease possible at working precision: treat as centred.
                    centered = decrement2 < 1e-6;
                    last_decrement_ = std::sqrt(decrement2);
                    stalled = !centered;
                    if (stalled) {
                        message = "line search stalled";
                    }
                    break;
                }
            }
            if (!centered) {
                if (!stalled) {
                    message = "Newton step limit reached";
                }
                break;
            }
            ++outer;
            const double t = z[n_];
            const double gap = nu_ * (1.0 + last_decrement_) / tau;
            if (!tilted) {
                lower_bound = t - gap;
                if (lower_bound > -options_.feas_margin) {
                    certified_infeasible = true;
                    break;
                }
            }
            if (gap < options_.gap_tol * std::max(1.0, std::abs(t))) {
                break;
            }
            tau *= 10.0;
        }

        LmiSolution sol;
        sol.assignment = z.head(n_);
        sol.t = z[n_];
        sol.newton_steps = steps;
        sol.outer_steps = outer;
        sol.lower_bound = lower_bound;
        for (const auto& b : blocks_) {
            sol.margins.push_back(max_eigenvalue(b.evaluate(sol.assignment)));
        }
        const double worst = sol.worst_margin();
        if (worst <= -options_.feas_margin && sol.assignment.cwiseAbs().maxCoeff() <= box) {
            sol.status = SolveStatus::Feasible;
        } else if (certified_infeasible) {
            sol.status = SolveStatus::Infeasible;
        } else {
            sol.status = SolveStatus::NumericalFailure;
            if (message.empty()) {
                message = "optimum too close to the feasibility boundary to classify";
            }
        }
        sol.message = message;
        if (!options_.trace_path.empty()) {
            write_trace(sol);
        }
        return sol;
    }

  private:
    // Start where the barrier gap nu/tau is comparable to the attainable range of t,
    // so the first centring does not crawl along the box.
    double initial_tau(const Vector& z) const {
        double reach = std::abs(z[n_]);
        for (const auto& b : blocks_) {
            double spread = 0.0;
            for (const auto& [s, c] : b.coefficients) {
                spread += c.cwiseAbs().rowwise().sum().maxCoeff();
            }
            reach = std::max(reach, options_.box_bound * spread);
        }
        return std::clamp(nu_ / std::max(reach, 1e-300), 1e-12, 1.0);
    }

    // S_j = t I - F_j(x); false if any is not positive definite.
    bool factor(const Vector& z, std::vector<Matrix>& factors) const {
        factors.clear();
        factors.reserve(work_.size());
        const Vector x = z.head(n_);
        for (const auto& w : work_) {
            Matrix S = z[n_] * Matrix::Identity(w.block->dim(), w.block->dim()) - w.block->evaluate(x);
            Eigen::LLT<Matrix> llt(S);
            if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().array() > 0.0).all()) {
                return false;
            }
            factors.push_back(llt.matrixL());
        }
        return true;
    }

    std::optional<double> objective(const Vector& z, double tau) const {
        const double box = options_.box_bound;
        double f = tau * (z[n_] + tilt_.dot(z.head(n_)));
        for (int i = 0; i < n_; ++i) {
            const double lo = box + z[i];
            const double hi = box - z[i];
            if (!(lo > 0.0 && hi > 0.0)) {
                return std::nullopt;
            }
            f -= std::log(lo) + std::log(hi);
        }
        std::vector<Matrix> factors;
        if (!factor(z, factors)) {
            return std::nullopt;
        }
        for (const auto& L : factors) {
            f -= 2.0 * L.diagonal().array().log().sum();
        }
        if (!std::isfinite(f)) {
            return std::nullopt;
        }
        return f;
    }

    bool derivatives(const Vector& z, double tau, Vector& grad, Matrix& hess) const {
        std::vector<Matrix> factors;
        if (!factor(z, factors)) {
            return false;
        }
        const double box = options_.box_bound;
        grad.setZero();
        hess.setZero();
        grad.head(n_) = tau * tilt_;
        grad[n_] = tau;
        for (int i = 0; i < n_; ++i) {
            const double lo = box + z[i];
            const double hi = box - z[i];
            grad[i] += 1.0 / hi - 1.0 / lo;
            hess(i, i) += 1.0 / (hi * hi) + 1.0 / (lo * lo);
        }
        Matrix whitened, gram;
        for (std::size_t j = 0; j < work_.size(); ++j) {
            const Work& w = work_[j];
            const auto d = w.block->dim();
            kernels::whiten_parallel(factors[j], w.coefficients, whitened);
            kernels::gram_parallel(whitened, gram);
            const auto k = static_cast<Eigen::Index>(w.slots.size());
            for (Eigen::Index a = 0; a < k; ++a) {
                double trace = 0.0;
                for (Eigen::Index i = 0; i < d; ++i) {
                    trace += whitened(i * d + i, a);
                }
                grad[w.slots[a]] += trace;
                for (Eigen::Index b = 0; b < k; ++b) {
                    hess(w.slots[a], w.slots[b]) += gram(a, b);
                }
            }
        }
        return grad.allFinite() && hess.allFinite();
    }

    static bool newton_direction(const Matrix& hess, const Vector& grad, Vector& dz) {
        Eigen::LLT<Matrix> llt(hess);
        if (llt.info() == Eigen::Success) {
            dz = llt.solve(-grad);
            if (dz.allFinite()) {
                return true;
            }
        }
        const double shift = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
        Matrix regularized = hess;
        regularized.diagonal().array() += shift;
        Eigen::LDLT<Matrix> ldlt(regularized);
        if (ldlt.info() != Eigen::Success) {
            return false;
        }
        dz = ldlt.solve(-grad);
        return dz.allFinite();
    }

    void record(int step, double tau, const Vector& z, double decrement, double length) {
        if (options_.trace_path.empty()) {
            return;
        }
        iterates_.push_back({{"step", step},
                             {"tau", tau},
                             {"t", z[n_]},
                             {"newton_decrement", decrement},
                             {"step_length", length}});
    }

    void write_trace(const LmiSolution& sol) const {
        json blocks = json::array();
        for (const auto& b : blocks_) {
            json coeffs = json::array();
            for (const auto& [s, c] : b.coefficients) {
                coeffs.push_back({{"slot", s}, {"matrix", matrix_json(c)}});
            }
            blocks.push_back({{"name", b.name}, {"dim", b.dim()}, {"constant", matrix_json(b.constant)},
                              {"coefficients", coeffs}});
        }
        json doc = {{"blocks", blocks},
                    {"iterates", iterates_},
                    {"status", to_string(sol.status)},
                    {"t", sol.t},
                    {"margins", sol.margins},
                    {"assignment", std::vector<double>(sol.assignment.begin(), sol.assignment.end())},
                    {"message", sol.message}};
        std::ofstream out(options_.trace_path);
        if (!out) {
            throw InputError("cannot open trace file " + options_.trace_path);
        }
        out << doc.dump(2) << '\n';
    }

    const std::vector<LmiBlock>& blocks_;
    int n_;
    const SolverOptions& options_;
    std::vector<Work> work_;
    double nu_ = 0.0;
    Vector tilt_;
    double last_decrement_ = 0.0;
    json iterates_ = json::array();
};

} // namespace

LmiSolution solve_feasibility(const std::vector<LmiBlock>& blocks, const VariableRegistry& registry,
                              const SolverOptions& options) {
    require(!blocks.empty(), "no LMI blocks to solve");
    require(options.feas_margin > 0.0, "feasibility margin must be positive");
    require(options.box_bound > 0.0, "box bound must be positive");
    require(options.max_newton_steps > 0, "Newton step limit must be positive");
    require(options.objective_tilt.size() == 0 || options.objective_tilt.size() == registry.slots(),
            "objective tilt must have one entry per slot");
    require(options.objective_tilt.allFinite(), "objective tilt contains NaN or infinity");
    for (const auto& b : blocks) {
        require(b.dim() > 0 && b.constant.rows() == b.constant.cols(), "LMI block must be square and non-empty");
        require(b.constant.allFinite(), "NaN or infinity in LMI block " + b.name);
        for (const auto& [s, c] : b.coefficients) {
            require(s >= 0 && s < registry.slots(), "LMI block " + b.name + " references an unknown slot");
            require(c.rows() == b.dim() && c.cols() == b.dim(), "coefficient size mismatch in block " + b.name);
            require(c.allFinite(), "NaN or infinity in LMI block " + b.name);
        }
    }
    BarrierSolver solver(blocks, registry.slots(), options);
    LmiSolution sol = solver.run();
    if (sol.feasible()) {
        std::lock_guard lock(audit_mutex);
        if (audit_hook) {
            audit_hook(blocks, sol);
        }
    }
    return sol;
}

void set_certificate_audit(CertificateAudit audit) {
    std::lock_guard lock(audit_mutex);
    audit_hook = std::move(audit);
}

LmiSolution solve_feasibility(const std::vector<LmiBlock>& blocks, const VariableRegistry& registry,
                              double feas_margin, double box_bound) {
    SolverOptions options;
    options.feas_margin = feas_margin;
    options.box_bound = box_bound;
    return solve_feasibility(blocks, registry, options);
}

} // namespace sfos::lmi
