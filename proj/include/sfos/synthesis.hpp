#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfos/closed_loop.hpp"
#include "sfos/descriptor.hpp"
#include "sfos/lmi.hpp"

// LMI admissibility tests, observer-based and static output-feedback synthesis,
// and closed-loop verification.

namespace sfos {

inline constexpr double kGainConditionLimit = 1e12;

struct SynthesisOptions {
    double feas_margin = 1e-7;
    double box_bound = 1e4;
    // Stage-2 retries for output feedback, each with a freshly tilted stage-1 solve.
    int retries = 8;
    std::uint64_t seed = 0;
    double tilt = 1e-3;
    int lift_factor = kDefaultLiftFactor;
    // Prefix for per-solve JSON dumps; empty disables them.
    std::string trace_prefix;
};

// One solved LMI problem, kept for audit and serialization.
struct Certificate {
    std::string name;
    lmi::VariableRegistry registry;
    std::vector<lmi::LmiBlock> blocks;
    lmi::LmiSolution solution;
    // Decision matrices by name, plus the assembled P of each fractional PD variable.
    std::map<std::string, Matrix> values;
};

enum class SynthesisErrorKind {
    StateFeedbackInfeasible,
    OutputInjectionInfeasible,
    GainRecoverySingular,
    VerificationFailed,
    Stage1Infeasible,
    Stage2ExhaustedRetries,
    GInversionSingular,
    NumericalFailure,
};

const char* to_string(SynthesisErrorKind kind);

class SynthesisError : public std::runtime_error {
  public:
    SynthesisError(SynthesisErrorKind kind, const std::string& message);

    SynthesisErrorKind kind() const { return kind_; }
    // Infeasibility certified by the solver (as opposed to a numerical or retry failure).
    bool certified_infeasible() const;

    std::optional<Certificate> certificate;
    // Output feedback: every intermediate gain tried before giving up.
    std::vector<Matrix> k0_attempts;

  private:
    SynthesisErrorKind kind_;
};

enum class Side { Right, Left };

struct LmiAdmissibility {
    bool admissible = false;
    lmi::SolveStatus status = lmi::SolveStatus::NumericalFailure;
    Certificate certificate;
};

// Right:  sym(A P E^T + A E0 Q) < 0 with E E0 = 0.
// Left:   sym(E^T P A + Q E0 A) < 0 with E0 E = 0.
// P is a fractional PD variable; order must lie in (0, 1].
LmiAdmissibility admissible_via_lmi(const DescriptorSystem& sys, Side side, const SynthesisOptions& options = {});

struct ObserverDesign {
    // Full chain coordinates when the order exceeds 1.
    Matrix K;
    Matrix L;
    Certificate state_feedback;
    Certificate output_injection;
    AdmissibilityReport closed_loop_report;
    int lift_factor = 1;
    double feas_margin = 0.0;
};

struct OutputFeedbackDesign {
    Matrix K0;
    Matrix F;
    Certificate stage1;
    Certificate stage2;
    AdmissibilityReport closed_loop_report;
    int attempts = 0;
    int lift_factor = 1;
    double feas_margin = 0.0;
};

ObserverDesign synth_observer(const DescriptorSystem& sys, const SynthesisOptions& options = {});
OutputFeedbackDesign synth_output_feedback(const DescriptorSystem& sys, const SynthesisOptions& options = {});

AdmissibilityReport verify_design(const DescriptorSystem& sys, const Gains& gains, int k = kDefaultLiftFactor);

// Largest over smallest singular value; infinity when singular.
double condition_number(const Matrix& M);

} // namespace sfos
