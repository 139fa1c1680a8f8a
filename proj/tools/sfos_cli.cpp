#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfos/descriptor.hpp"
#include "sfos/io.hpp"
#include "sfos/lifting.hpp"
#include "sfos/simulator.hpp"
#include "sfos/synthesis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sfos;

namespace {

enum Exit { kOk = 0, kError = 1, kNotAdmissible = 2, kInfeasible = 3, kRetriesExhausted = 4 };

// Built-in copies of data/example1.json and data/example2.json.
constexpr const char* kExample1 = R"({
  "system": {
    "E": [[1, 1, 1], [0, 1, 1], [0, 0, 0]],
    "A": [[1, 1, -1], [2, -2, -1], [4, 1, -4]],
    "B": [[1], [1], [1]],
    "C": [[1, 0, 1]],
    "alpha": 0.6
  },
  "simulation": {"h": 0.001, "horizon": 20, "x0": [-0.25, 2, 0.25], "xhat0": [0, 0, 0]}
})";

constexpr const char* kExample2 = R"({
  "system": {
    "E": [[1, 1, 1], [0, 1, 1], [0, 0, 0]],
    "A": [[1, 1, -1], [2, -2, -1], [4, 1, -4]],
    "B": [[1], [1], [1]],
    "C": [[1, 0, 1]],
    "alpha": 1.2
  },
  "simulation": {"h": 0.001, "horizon": 20, "x0": [-0.25, 2, 0.25], "xhat0": [0, 0, 0]}
})";

// Raw option values; each is resolved as flag, then environment, then file, then default.
struct Flags {
    double tol = kDefaultRankTol;
    double feas_margin = 1e-7;
    double box_bound = 1e4;
    int k = kDefaultLiftFactor;
    double h = 1e-3;
    double horizon = 20.0;
    std::uint64_t seed = 0;
    int retries = 8;
    std::string debug_trace;
    CLI::Option* tol_opt = nullptr;
    CLI::Option* feas_opt = nullptr;
    CLI::Option* box_opt = nullptr;
    CLI::Option* k_opt = nullptr;
    CLI::Option* h_opt = nullptr;
    CLI::Option* horizon_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* retries_opt = nullptr;
};

template <typename T>
T resolve(const CLI::Option* opt, const T& flag_value, const std::optional<T>& file_value, const T& fallback) {
    if (opt && opt->count() > 0) {
        return flag_value;
    }
    return file_value.value_or(fallback);
}

struct Settings {
    double rank_tol;
    SynthesisOptions synth;
    double h;
    double horizon;
};

Settings settings_for(const Flags& f, const io::ProblemFile* pf) {
    const auto& sb = pf && pf->synthesis ? pf->synthesis : std::optional<io::SynthesisBlock>{};
    const auto& sim = pf && pf->simulation ? pf->simulation : std::optional<io::SimulationBlock>{};
    Settings s;
    s.rank_tol = resolve(f.tol_opt, f.tol, pf ? pf->rank_tol : std::nullopt, kDefaultRankTol);
    s.synth.feas_margin = resolve(f.feas_opt, f.feas_margin, sb ? sb->feas_margin : std::nullopt, 1e-7);
    s.synth.box_bound = resolve(f.box_opt, f.box_bound, sb ? sb->box_bound : std::nullopt, 1e4);
    s.synth.lift_factor = resolve(f.k_opt, f.k, sb ? sb->k : std::nullopt, kDefaultLiftFactor);
    s.synth.seed = resolve<std::uint64_t>(f.seed_opt, f.seed, sb ? sb->seed : std::nullopt, 0);
    s.synth.retries = resolve(f.retries_opt, f.retries, sb ? sb->retries : std::nullopt, 8);
    s.synth.trace_prefix = f.debug_trace;
    s.h = resolve(f.h_opt, f.h, sim ? sim->h : std::nullopt, 1e-3);
    s.horizon = resolve(f.horizon_opt, f.horizon, sim ? sim->horizon : std::nullopt, 20.0);
    require(s.rank_tol > 0.0, "--tol must be positive");
    require(s.synth.feas_margin > 0.0, "--feas-margin must be positive");
    require(s.synth.box_bound > 0.0, "--box-bound must be positive");
    require(s.synth.lift_factor >= 2, "--k must be at least 2");
    require(s.synth.retries >= 0, "retries must be non-negative");
    return s;
}

json trajectory_summary(const Trajectory& traj) {
    const double x0 = traj.x.front().norm();
    const double xT = traj.x.back().norm();
    double max_alg = 0.0;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        max_alg = std::max(max_alg, traj.algebraic_residual[i]);
        max_rel = std::max(max_rel, traj.constraint_residual[i] / std::max(traj.x[i].norm(), 1e-300));
    }
    json j = {{"initial_norm", x0},
              {"final_norm", xT},
              {"final_ratio", x0 > 0.0 ? json(xT / x0) : json(nullptr)},
              {"max_algebraic_residual", max_alg},
              {"max_relative_constraint_residual", max_rel},
              {"samples", traj.size()},
              {"warnings", traj.warnings}};
    try {
        const DecayFit fit = tail_decay_exponent(traj);
        j["decay_exponent"] = fit.exponent;
        j["power_law"] = fit.power_law;
    } catch (const InputError&) {
        j["decay_exponent"] = nullptr;
        j["power_law"] = nullptr;
    }
    return j;
}

SimConfig sim_config(const Settings& s, const io::ProblemFile& pf) {
    SimConfig c;
    c.h = s.h;
    c.horizon = s.horizon;
    if (!pf.simulation || !pf.simulation->x0) {
        throw io::ProblemFileError("field 'simulation.x0': missing");
    }
    c.x0 = *pf.simulation->x0;
    c.xhat0 = pf.simulation->xhat0.value_or(Vector::Zero(c.x0.size()));
    c.memory_length = pf.simulation->memory_length;
    c.strict = pf.simulation->strict;
    return c;
}

int synthesis_exit(const SynthesisError& e) {
    if (e.certified_infeasible()) {
        return kInfeasible;
    }
    if (e.kind() == SynthesisErrorKind::Stage2ExhaustedRetries) {
        return kRetriesExhausted;
    }
    return kError;
}

json synthesize(const DescriptorSystem& sys, const std::string& mode, const SynthesisOptions& o, Gains& gains) {
    if (mode == "observer") {
        const ObserverDesign d = synth_observer(sys, o);
        gains = Gains{d.K, d.L, std::nullopt};
        return io::to_json(d);
    }
    if (mode == "output") {
        const OutputFeedbackDesign d = synth_output_feedback(sys, o);
        gains = Gains{std::nullopt, std::nullopt, d.F};
        return io::to_json(d);
    }
    throw InputError("mode must be 'observer' or 'output'");
}

int cmd_analyze(const Flags& f, const std::string& path) {
    const io::ProblemFile pf = io::load_problem(path);
    const Settings s = settings_for(f, &pf);
    const DescriptorSystem sys = pf.system(s.rank_tol);
    AdmissibilityReport report = analyze(sys);
    json out = io::to_json(report);
    if (sys.alpha() > 1.0) {
        out["lifted"] = io::to_json(admissible_lifted(sys, s.synth.lift_factor));
        out["lifted"]["k"] = s.synth.lift_factor;
    }
    std::cout << out.dump(2) << '\n';
    return report.admissible ? kOk : kNotAdmissible;
}

int cmd_synth(const Flags& f, const std::string& path, std::optional<std::string> mode, const std::string& out) {
    const io::ProblemFile pf = io::load_problem(path);
    const Settings s = settings_for(f, &pf);
    const DescriptorSystem sys = pf.system(s.rank_tol);
    const std::string m = mode.value_or(pf.synthesis ? pf.synthesis->mode : "observer");
    Gains gains;
    const json design = synthesize(sys, m, s.synth, gains);
    if (out.empty()) {
        std::cout << design.dump(2) << '\n';
    } else {
        io::write_json(out, design);
    }
    return kOk;
}

int cmd_simulate(const Flags& f, const std::string& path, const std::string& out) {
    const io::ProblemFile pf = io::load_problem(path);
    const Settings s = settings_for(f, &pf);
    const DescriptorSystem sys = pf.system(s.rank_tol);
    const SimConfig cfg = sim_config(s, pf);

    json summary;
    Gains gains = pf.gains;
    if (controller_kind(gains) != ControllerKind::None) {
        summary["source"] = "injected";
    } else if (pf.synthesis) {
        summary["source"] = "synthesized";
        summary["design"] = synthesize(sys, pf.synthesis->mode, s.synth, gains);
    } else {
        summary["source"] = "open_loop";
    }
    const AdmissibilityReport report = verify_design(sys, gains, s.synth.lift_factor);
    summary["controller"] = to_string(controller_kind(gains));
    summary["closed_loop"] = io::to_json(report);

    const Trajectory traj = simulate(sys, gains, cfg, s.synth.lift_factor);
    summary["config"] = {{"h", cfg.h},
                         {"horizon", cfg.horizon},
                         {"memory_length", cfg.memory_length ? json(*cfg.memory_length) : json("full")},
                         {"x0", std::vector<double>(cfg.x0.begin(), cfg.x0.end())},
                         {"xhat0", std::vector<double>(cfg.xhat0.begin(), cfg.xhat0.end())},
                         {"alpha", sys.alpha()},
                         {"k", sys.alpha() > 1.0 ? s.synth.lift_factor : 1}};
    summary["trajectory"] = trajectory_summary(traj);

    fs::create_directories(out);
    io::write_csv(fs::path(out) / "trajectory.csv", traj);
    io::write_json(fs::path(out) / "summary.json", summary);
    std::cout << summary["trajectory"].dump(2) << '\n';
    return kOk;
}

struct DemoRun {
    json summary;
    double observer_ratio = 0.0;
    double output_ratio = 0.0;
};

DemoRun run_example(const Flags& f, const char* text, const fs::path* out, int first_fig) {
    const io::ProblemFile pf = io::parse_problem_text(text);
    const Settings s = settings_for(f, &pf);
    const DescriptorSystem sys = pf.system(s.rank_tol);
    const SimConfig cfg = sim_config(s, pf);
    DemoRun run;

    const ObserverDesign od = synth_observer(sys, s.synth);
    const Trajectory to = simulate(sys, Gains{od.K, od.L, std::nullopt}, cfg, s.synth.lift_factor);
    const OutputFeedbackDesign fd = synth_output_feedback(sys, s.synth);
    const Trajectory tf = simulate(sys, Gains{std::nullopt, std::nullopt, fd.F}, cfg, s.synth.lift_factor);

    json obs = trajectory_summary(to);
    obs["K"] = io::to_json(od.K);
    obs["L"] = io::to_json(od.L);
    obs["closed_loop"] = io::to_json(od.closed_loop_report);
    json outp = trajectory_summary(tf);
    outp["K0"] = io::to_json(fd.K0);
    outp["F"] = io::to_json(fd.F);
    outp["attempts"] = fd.attempts;
    outp["closed_loop"] = io::to_json(fd.closed_loop_report);
    run.observer_ratio = obs["final_ratio"].get<double>();
    run.output_ratio = outp["final_ratio"].get<double>();

    const std::string p = "fig";
    run.summary = {{"alpha", sys.alpha()},
                   {"k", sys.alpha() > 1.0 ? s.synth.lift_factor : 1},
                   {"h", cfg.h},
                   {"horizon", cfg.horizon},
                   {"seed", s.synth.seed},
                   {"observer", obs},
                   {"output", outp},
                   {"files",
                    {{"observer_state", p + std::to_string(first_fig) + ".csv"},
                     {"observer_input", p + std::to_string(first_fig + 1) + ".csv"},
                     {"observer_error", p + std::to_string(first_fig + 2) + ".csv"},
                     {"output_state", p + std::to_string(first_fig + 3) + ".csv"},
                     {"output_input", p + std::to_string(first_fig + 4) + ".csv"}}}};
    if (out) {
        fs::create_directories(*out);
        io::write_csv(*out / (p + std::to_string(first_fig) + ".csv"), to, io::Columns::State);
        io::write_csv(*out / (p + std::to_string(first_fig + 1) + ".csv"), to, io::Columns::Input);
        io::write_csv(*out / (p + std::to_string(first_fig + 2) + ".csv"), to, io::Columns::Error);
        io::write_csv(*out / (p + std::to_string(first_fig + 3) + ".csv"), tf, io::Columns::State);
        io::write_csv(*out / (p + std::to_string(first_fig + 4) + ".csv"), tf, io::Columns::Input);
    }
    return run;
}

int cmd_demo(const Flags& f, const std::string& which, const std::string& out) {
    const fs::path dir(out);
    json summary;
    if (which == "example1") {
        DemoRun r = run_example(f, kExample1, &dir, 1);
        summary = r.summary;
        summary["example"] = which;
        summary["target_ratio"] = 0.05;
        summary["meets_target"] = r.observer_ratio < 0.05 && r.output_ratio < 0.05;
    } else if (which == "example2") {
        DemoRun r = run_example(f, kExample2, &dir, 6);
        const DemoRun base = run_example(f, kExample1, nullptr, 1);
        summary = r.summary;
        summary["example"] = which;
        summary["reference_alpha_0_6"] = {{"observer_ratio", base.observer_ratio}, {"output_ratio", base.output_ratio}};
        summary["faster_than_reference"] = {{"observer", r.observer_ratio < base.observer_ratio},
                                            {"output", r.output_ratio < base.output_ratio}};
    } else {
        throw InputError("demo must be example1 or example2");
    }
    io::write_json(dir / "summary.json", summary);
    std::cout << summary.dump(2) << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analysis and controller synthesis for singular fractional-order systems"};
    app.require_subcommand(1);
    app.fallthrough();
    // -h would clash with the step option --h.
    app.set_help_flag("--help", "print help and exit");

    Flags f;
    f.tol_opt = app.add_option("--tol", f.tol, "relative rank tolerance")->envname("SFOS_TOL");
    f.feas_opt = app.add_option("--feas-margin", f.feas_margin, "strictness margin for LMIs")->envname("SFOS_FEAS_MARGIN");
    f.box_opt = app.add_option("--box-bound", f.box_bound, "bound on LMI decision variables")->envname("SFOS_BOX_BOUND");
    f.k_opt = app.add_option("--k", f.k, "lift factor for orders above 1")->envname("SFOS_K");
    f.h_opt = app.add_option("--h", f.h, "simulation step")->envname("SFOS_H");
    f.horizon_opt = app.add_option("--horizon", f.horizon, "simulation horizon")->envname("SFOS_HORIZON");
    f.seed_opt = app.add_option("--seed", f.seed, "seed for output-feedback retries")->envname("SFOS_SEED");
    f.retries_opt = app.add_option("--retries", f.retries, "output-feedback retries")->envname("SFOS_RETRIES");
    app.add_option("--debug-trace", f.debug_trace, "prefix for solver trace JSON files")->envname("SFOS_DEBUG_TRACE");

    std::string path, synth_out, sim_out, demo_out, which;
    std::optional<std::string> mode;

    auto* analyze_cmd = app.add_subcommand("analyze", "admissibility report (exit 0 admissible, 2 not)");
    analyze_cmd->add_option("problem", path, "problem JSON file")->required();

    auto* synth_cmd = app.add_subcommand("synth", "synthesize a controller (exit 3 infeasible, 4 retries exhausted)");
    synth_cmd->add_option("problem", path, "problem JSON file")->required();
    synth_cmd->add_option("--mode", mode, "observer or output")->check(CLI::IsMember({"observer", "output"}));
    synth_cmd->add_option("--out", synth_out, "write the design JSON here instead of stdout");

    auto* sim_cmd = app.add_subcommand("simulate", "simulate with injected, synthesized or no gains");
    sim_cmd->add_option("problem", path, "problem JSON file")->required();
    sim_cmd->add_option("--out", sim_out, "output directory")->default_val("sfos_out");

    auto* demo_cmd = app.add_subcommand("demo", "synthesize and simulate a built-in example");
    demo_cmd->add_option("example", which, "example1 or example2")->required()->check(CLI::IsMember({"example1", "example2"}));
    demo_cmd->add_option("--out", demo_out, "output directory")->default_val("sfos_out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kError;
    }

    try {
        if (*analyze_cmd) return cmd_analyze(f, path);
        if (*synth_cmd) return cmd_synth(f, path, mode, synth_out);
        if (*sim_cmd) return cmd_simulate(f, path, sim_out);
        if (*demo_cmd) return cmd_demo(f, which, demo_out);
    } catch (const SynthesisError& e) {
        std::cerr << "error: " << e.what() << '\n';
        for (std::size_t i = 0; i < e.k0_attempts.size(); ++i) {
            std::cerr << "  attempt " << i + 1 << " K0 = " << io::to_json(e.k0_attempts[i]).dump() << '\n';
        }
        return synthesis_exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
