#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "sfos/closed_loop.hpp"
#include "sfos/descriptor.hpp"
#include "sfos/simulator.hpp"
#include "sfos/synthesis.hpp"

// Problem files, JSON reports and CSV trajectories.

namespace sfos::io {

// Schema problems; the message names the offending field or source line.
class ProblemFileError : public InputError {
  public:
    using InputError::InputError;
};

struct SynthesisBlock {
    std::string mode = "observer";
    std::optional<int> retries;
    std::optional<double> feas_margin;
    std::optional<double> box_bound;
    std::optional<std::uint64_t> seed;
    std::optional<int> k;
};

struct SimulationBlock {
    std::optional<double> h;
    std::optional<double> horizon;
    std::optional<std::size_t> memory_length;
    std::optional<Vector> x0;
    std::optional<Vector> xhat0;
    bool strict = false;
};

struct ProblemFile {
    Matrix E, A, B, C;
    double alpha = 0.0;
    std::optional<double> rank_tol;
    std::optional<SynthesisBlock> synthesis;
    std::optional<SimulationBlock> simulation;
    Gains gains;

    DescriptorSystem system(double rank_tol_default = kDefaultRankTol) const;
};

// The system may sit at top level or under "system".
ProblemFile parse_problem(const nlohmann::json& doc);
ProblemFile parse_problem_text(const std::string& text);
ProblemFile load_problem(const std::filesystem::path& path);

nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const AdmissibilityReport& report);
nlohmann::json to_json(const Certificate& cert);
nlohmann::json to_json(const ObserverDesign& design);
nlohmann::json to_json(const OutputFeedbackDesign& design);

// Columns t, x1..xn, u1..um and, when the trajectory has an observer error, e1..en.
void write_csv(const std::filesystem::path& path, const Trajectory& traj);

enum class Columns { State, Input, Error };
// t followed by one group of columns, for per-figure files.
void write_csv(const std::filesystem::path& path, const Trajectory& traj, Columns which);

// Shortest round-trip decimal, independent of the locale.
std::string format_double(double value);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

} // namespace sfos::io
