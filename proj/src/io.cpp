#include "sfos/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sfos::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ProblemFileError("field '" + field + "': " + message);
}

double number(const json& j, const std::string& field) {
    if (!j.is_number()) {
        fail(field, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        fail(field, "must be finite");
    }
    return v;
}

Matrix matrix(const json& j, const std::string& field) {
    if (j.is_number()) {
        return Matrix::Constant(1, 1, number(j, field));
    }
    if (!j.is_array() || j.empty()) {
        fail(field, "expected a non-empty array of rows");
    }
    const auto rows = j.size();
    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string where = field + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].empty()) {
            fail(where, "expected a non-empty array of numbers");
        }
        if (i == 0) {
            cols = j[i].size();
        } else if (j[i].size() != cols) {
            fail(where, "has " + std::to_string(j[i].size()) + " entries, expected " + std::to_string(cols));
        }
    }
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < cols; ++k) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                number(j[i][k], field + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
        }
    }
    return m;
}

Vector vector(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) {
        fail(field, "expected a non-empty array of numbers");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = number(j[i], field + "[" + std::to_string(i) + "]");
    }
    return v;
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
        fail(where.empty() ? "<root>" : where, "expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            fail(where.empty() ? key : where + "." + key, "unknown field");
        }
    }
}

const json& required(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) {
        fail(where.empty() ? key : where + "." + key, "missing");
    }
    return obj.at(key);
}

int integer(const json& j, const std::string& field) {
    if (!j.is_number_integer()) {
        fail(field, "expected an integer");
    }
    return j.get<int>();
}

std::string prefixed(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

} // namespace

DescriptorSystem ProblemFile::system(double rank_tol_default) const {
    return DescriptorSystem(E, A, B, C, alpha, rank_tol.value_or(rank_tol_default));
}

ProblemFile parse_problem(const json& doc) {
    check_keys(doc, "", {"system", "E", "A", "B", "C", "alpha", "rank_tol", "synthesis", "simulation", "gains", "name",
                         "description"});
    ProblemFile pf;
    const bool nested = doc.contains("system");
    const json& sys = nested ? doc.at("system") : doc;
    const std::string where = nested ? "system" : "";
    if (nested) {
        check_keys(sys, where, {"E", "A", "B", "C", "alpha", "rank_tol"});
        for (const char* key : {"E", "A", "B", "C", "alpha"}) {
            if (doc.contains(key)) {
                fail(key, "given both at top level and under 'system'");
            }
        }
    }
    pf.E = matrix(required(sys, "E", where), prefixed(where, "E"));
    pf.A = matrix(required(sys, "A", where), prefixed(where, "A"));
    pf.B = matrix(required(sys, "B", where), prefixed(where, "B"));
    pf.C = matrix(required(sys, "C", where), prefixed(where, "C"));
    pf.alpha = number(required(sys, "alpha", where), prefixed(where, "alpha"));
    const json* tol = sys.contains("rank_tol") ? &sys.at("rank_tol") : (doc.contains("rank_tol") ? &doc.at("rank_tol") : nullptr);
    if (tol) {
        pf.rank_tol = number(*tol, "rank_tol");
    }

    const auto n = pf.E.rows();
    if (pf.E.cols() != n) fail(prefixed(where, "E"), "must be square");
    if (pf.A.rows() != n || pf.A.cols() != n) fail(prefixed(where, "A"), "must be " + std::to_string(n) + "x" + std::to_string(n));
    if (pf.B.rows() != n) fail(prefixed(where, "B"), "must have " + std::to_string(n) + " rows");
    if (pf.C.cols() != n) fail(prefixed(where, "C"), "must have " + std::to_string(n) + " columns");
    if (!(pf.alpha > 0.0 && pf.alpha < 2.0)) fail(prefixed(where, "alpha"), "must lie in (0, 2)");

    if (doc.contains("synthesis")) {
        const json& s = doc.at("synthesis");
        check_keys(s, "synthesis", {"mode", "retries", "feas_margin", "box_bound", "seed", "k"});
        SynthesisBlock b;
        if (s.contains("mode")) {
            if (!s.at("mode").is_string()) fail("synthesis.mode", "expected a string");
            b.mode = s.at("mode").get<std::string>();
            if (b.mode != "observer" && b.mode != "output") fail("synthesis.mode", "must be 'observer' or 'output'");
        }
        if (s.contains("retries")) b.retries = integer(s.at("retries"), "synthesis.retries");
        if (s.contains("feas_margin")) b.feas_margin = number(s.at("feas_margin"), "synthesis.feas_margin");
        if (s.contains("box_bound")) b.box_bound = number(s.at("box_bound"), "synthesis.box_bound");
        if (s.contains("seed")) {
            if (!s.at("seed").is_number_unsigned()) fail("synthesis.seed", "expected a non-negative integer");
            b.seed = s.at("seed").get<std::uint64_t>();
        }
        if (s.contains("k")) b.k = integer(s.at("k"), "synthesis.k");
        pf.synthesis = b;
    }
    if (doc.contains("simulation")) {
        const json& s = doc.at("simulation");
        check_keys(s, "simulation", {"h", "horizon", "memory_length", "x0", "xhat0", "strict"});
        SimulationBlock b;
        if (s.contains("h")) b.h = number(s.at("h"), "simulation.h");
        if (s.contains("horizon")) b.horizon = number(s.at("horizon"), "simulation.horizon");
        if (s.contains("memory_length")) {
            const json& m = s.at("memory_length");
            if (m.is_string() && m.get<std::string>() == "full") {
            } else if (m.is_number_unsigned() && m.get<std::size_t>() >= 1) {
                b.memory_length = m.get<std::size_t>();
            } else {
                fail("simulation.memory_length", "expected a positive integer or \"full\"");
            }
        }
        if (s.contains("x0")) b.x0 = vector(s.at("x0"), "simulation.x0");
        if (s.contains("xhat0")) b.xhat0 = vector(s.at("xhat0"), "simulation.xhat0");
        if (b.x0 && b.x0->size() != n) fail("simulation.x0", "must have " + std::to_string(n) + " entries");
        if (b.xhat0 && b.xhat0->size() != n) fail("simulation.xhat0", "must have " + std::to_string(n) + " entries");
        if (s.contains("strict")) {
            if (!s.at("strict").is_boolean()) fail("simulation.strict", "expected true or false");
            b.strict = s.at("strict").get<bool>();
        }
        pf.simulation = b;
    }
    if (doc.contains("gains")) {
        const json& g = doc.at("gains");
        check_keys(g, "gains", {"K", "L", "F"});
        if (g.contains("K")) pf.gains.K = matrix(g.at("K"), "gains.K");
        if (g.contains("L")) pf.gains.L = matrix(g.at("L"), "gains.L");
        if (g.contains("F")) pf.gains.F = matrix(g.at("F"), "gains.F");
        try {
            controller_kind(pf.gains);
        } catch (const InputError& e) {
            fail("gains", e.what());
        }
    }
    return pf;
}

ProblemFile parse_problem_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Report the line holding the offending byte.
        const auto upto = text.substr(0, std::min<std::size_t>(e.byte, text.size()));
        const auto line = 1 + std::count(upto.begin(), upto.end(), '\n');
        const auto col = upto.size() - (upto.rfind('\n') == std::string::npos ? 0 : upto.rfind('\n') + 1);
        throw ProblemFileError("invalid JSON at line " + std::to_string(line) + ", column " + std::to_string(col) +
                               ": " + e.what());
    }
    return parse_problem(doc);
}

ProblemFile load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ProblemFileError("cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_problem_text(buf.str());
    } catch (const ProblemFileError& e) {
        throw ProblemFileError(path.string() + ": " + e.what());
    }
}

json to_json(const Matrix& m) {
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

json to_json(const AdmissibilityReport& r) {
    json eig = json::array();
    for (const auto& l : r.finite_eigenvalues) {
        eig.push_back({l.real(), l.imag()});
    }
    json j = {{"regular", r.regular},
              {"impulse_free", r.impulse_free},
              {"stable", r.stable},
              {"admissible", r.admissible},
              {"alpha", r.alpha},
              {"rank_E", r.rank_E},
              {"pencil_degree", r.pencil_degree},
              {"finite_eigenvalues", eig}};
    j["min_angle_margin"] = std::isfinite(r.min_angle_margin) ? json(r.min_angle_margin) : json(nullptr);
    return j;
}

json to_json(const Certificate& c) {
    json values = json::object();
    for (const auto& [name, m] : c.values) {
        values[name] = to_json(m);
    }
    return {{"name", c.name},
            {"status", lmi::to_string(c.solution.status)},
            {"t", c.solution.t},
            {"margins", c.solution.margins},
            {"newton_steps", c.solution.newton_steps},
            {"values", values}};
}

json to_json(const ObserverDesign& d) {
    return {{"kind", "observer"},
            {"K", to_json(d.K)},
            {"L", to_json(d.L)},
            {"lift_factor", d.lift_factor},
            {"feas_margin", d.feas_margin},
            {"closed_loop", to_json(d.closed_loop_report)},
            {"certificates", {{"state_feedback", to_json(d.state_feedback)}, {"output_injection", to_json(d.output_injection)}}}};
}

json to_json(const OutputFeedbackDesign& d) {
    return {{"kind", "output"},
            {"K0", to_json(d.K0)},
            {"F", to_json(d.F)},
            {"attempts", d.attempts},
            {"lift_factor", d.lift_factor},
            {"feas_margin", d.feas_margin},
            {"closed_loop", to_json(d.closed_loop_report)},
            {"certificates", {{"stage1", to_json(d.stage1)}, {"stage2", to_json(d.stage2)}}}};
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

void append(std::string& line, const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        line += ',';
        line += format_double(v[i]);
    }
}

void header(std::string& line, char prefix, Eigen::Index count) {
    for (Eigen::Index i = 1; i <= count; ++i) {
        line += ',';
        line += prefix;
        line += std::to_string(i);
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

} // namespace

void write_csv(const std::filesystem::path& path, const Trajectory& traj) {
    require(traj.size() > 0, "empty trajectory");
    std::ofstream out = open_out(path);
    const bool with_e = !traj.e.empty();
    std::string line = "t";
    header(line, 'x', traj.x[0].size());
    header(line, 'u', traj.u[0].size());
    if (with_e) {
        header(line, 'e', traj.e[0].size());
    }
    out << line << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        line = format_double(traj.times[k]);
        append(line, traj.x[k]);
        append(line, traj.u[k]);
        if (with_e) {
            append(line, traj.e[k]);
        }
        out << line << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Trajectory& traj, Columns which) {
    require(traj.size() > 0, "empty trajectory");
    const std::vector<Vector>* data = &traj.x;
    char prefix = 'x';
    if (which == Columns::Input) {
        data = &traj.u;
        prefix = 'u';
    } else if (which == Columns::Error) {
        require(!traj.e.empty(), "trajectory has no observer error");
        data = &traj.e;
        prefix = 'e';
    }
    std::ofstream out = open_out(path);
    std::string line = "t";
    header(line, prefix, (*data)[0].size());
    out << line << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        line = format_double(traj.times[k]);
        append(line, (*data)[k]);
        out << line << '\n';
    }
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
}

} // namespace sfos::io
