#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sfos/types.hpp"

// Affine matrix expressions over scalar decision slots, symmetric LMI blocks and
// a small dense log-det barrier solver that decides strict feasibility.

namespace sfos::lmi {

// R x C matrix  constant + sum_s x_s * terms[s].
class AffineExpr {
  public:
    AffineExpr() = default;
    explicit AffineExpr(Matrix constant);

    static AffineExpr zero(Eigen::Index rows, Eigen::Index cols);
    static AffineExpr slot(int index, Matrix coefficient);

    Eigen::Index rows() const { return constant_.rows(); }
    Eigen::Index cols() const { return constant_.cols(); }
    const Matrix& constant() const { return constant_; }
    const std::map<int, Matrix>& terms() const { return terms_; }

    Matrix evaluate(const Vector& x) const;
    AffineExpr transpose() const;

    AffineExpr& operator+=(const AffineExpr& other);
    AffineExpr& operator-=(const AffineExpr& other);
    AffineExpr& operator*=(double scale);

    friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
    friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
    friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
    friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
    friend AffineExpr operator*(const Matrix& left, const AffineExpr& a);
    friend AffineExpr operator*(const AffineExpr& a, const Matrix& right);

  private:
    Matrix constant_;
    std::map<int, Matrix> terms_;
};

AffineExpr operator+(const AffineExpr& a, const Matrix& b);
AffineExpr operator+(const Matrix& a, const AffineExpr& b);

// Block assembly; every block in a block row shares its row count, every block
// in a block column its column count.
AffineExpr assemble(const std::vector<std::vector<AffineExpr>>& blocks);

// expr + expr^T
AffineExpr sym(const AffineExpr& expr);

enum class VariableKind { Symmetric, Skew, Rectangular };

struct VariableEntry {
    std::string name;
    VariableKind kind = VariableKind::Rectangular;
    int rows = 0;
    int cols = 0;
    int offset = 0;
    int count = 0;
};

class VariableRegistry {
  public:
    AffineExpr add_symmetric(const std::string& name, int k);
    AffineExpr add_skew(const std::string& name, int k);
    AffineExpr add_rectangular(const std::string& name, int rows, int cols);

    int slots() const { return slots_; }
    const std::vector<VariableEntry>& entries() const { return entries_; }
    bool contains(const std::string& name) const;
    const VariableEntry& entry(const std::string& name) const;

    AffineExpr expr(const std::string& name) const;
    Matrix value(const std::string& name, const Vector& x) const;

    // c with c^T x = trace(W * V(x)) for the named variable V.
    Vector linear_functional(const std::string& name, const Matrix& W) const;

  private:
    const VariableEntry& add(const std::string& name, VariableKind kind, int rows, int cols, int count);

    std::vector<VariableEntry> entries_;
    int slots_ = 0;
};

// Symmetric  F(x) = F0 + sum_i x_i F_i.
struct LmiBlock {
    std::string name;
    Matrix constant;
    std::vector<std::pair<int, Matrix>> coefficients;

    Eigen::Index dim() const { return constant.rows(); }
    Matrix evaluate(const Vector& x) const;

    // Rejects expressions that are not symmetric for every x (to 1e-10 relative).
    static LmiBlock from_expr(const AffineExpr& expr, std::string name = {});
};

// Block for expr + expr^T.
LmiBlock sym_of(const AffineExpr& expr, std::string name = {});

// A variable P = sin(alpha*pi/2) X + cos(alpha*pi/2) Y in the fractional PD set,
// with its membership side-block  -[[X, Y], [-Y, X]] < 0.
struct FpdmVariable {
    std::string name;
    AffineExpr X;
    AffineExpr Y;
    AffineExpr P;
    LmiBlock membership;
};

// Registers "<name>.X" (symmetric) and "<name>.Y" (skew).
FpdmVariable add_fpdm_variable(VariableRegistry& registry, const std::string& name, int k, double alpha);

enum class SolveStatus { Feasible, Infeasible, NumericalFailure };
const char* to_string(SolveStatus status);

struct SolverOptions {
    double feas_margin = 1e-7;
    double box_bound = 1e4;
    double gap_tol = 1e-9;
    int max_newton_steps = 200;
    // Optional linear term added to the objective t; empty or one entry per slot.
    Vector objective_tilt;
    // When non-empty, blocks and iterates are dumped here as JSON.
    std::string trace_path;
};

struct LmiSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    Vector assignment;
    // lambda_max of each block at the assignment.
    std::vector<double> margins;
    double t = 0.0;
    // Certified lower bound on the optimal t (-inf when not certified).
    double lower_bound = 0.0;
    int newton_steps = 0;
    int outer_steps = 0;
    std::string message;

    bool feasible() const { return status == SolveStatus::Feasible; }
    double worst_margin() const;
};

double max_eigenvalue(const Matrix& symmetric);

// Called with the blocks and result of every Feasible solve in the process; used by the
// test suite to re-check certificates independently. Pass an empty function to clear.
using CertificateAudit = std::function<void(const std::vector<LmiBlock>&, const LmiSolution&)>;
void set_certificate_audit(CertificateAudit audit);

LmiSolution solve_feasibility(const std::vector<LmiBlock>& blocks, const VariableRegistry& registry,
                              const SolverOptions& options = {});
LmiSolution solve_feasibility(const std::vector<LmiBlock>& blocks, const VariableRegistry& registry,
                              double feas_margin, double box_bound);

} // namespace sfos::lmi
