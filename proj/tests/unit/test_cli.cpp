#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("sfos_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Result run(const std::string& args, const std::string& env = "") {
    const fs::path out = scratch() / "stdout.txt";
    const std::string cmd = env + " " + SFOS_CLI_PATH + " " + args + " > " + out.string() + " 2> " +
                            (scratch() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    return r;
}

fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p;
}

std::string data(const char* name) { return (fs::path(SFOS_DATA_DIR) / name).string(); }

const char* kPlant = R"("E": [[1, 1, 1], [0, 1, 1], [0, 0, 0]], "A": [[1, 1, -1], [2, -2, -1], [4, 1, -4]], "alpha": 0.6)";

} // namespace

TEST_CASE("analyze exit codes") {
    const auto ex1 = run("analyze " + data("example1.json"));
    CHECK(ex1.code == 2);
    const auto rep = json::parse(ex1.out);
    CHECK(rep["regular"] == true);
    CHECK(rep["impulse_free"] == true);
    CHECK(rep["stable"] == false);

    const auto ex2 = run("analyze " + data("example2.json"));
    CHECK(ex2.code == 2);
    CHECK(json::parse(ex2.out).contains("lifted"));

    const auto ok = write("stable.json", R"({"E": [[1, 0], [0, 1]], "A": [[-1, 0], [0, -1]], "B": [[1], [0]], "C": [[1, 0]], "alpha": 0.5})");
    CHECK(run("analyze " + ok.string()).code == 0);

    const auto bad = write("bad.json", "{\"E\": [[1]],\n \"A\": oops}");
    CHECK(run("analyze " + bad.string()).code == 1);
    CHECK(slurp(scratch() / "stderr.txt").find("line 2") != std::string::npos);

    CHECK(run("analyze /nonexistent.json").code == 1);
    CHECK(run("frobnicate").code == 1);
}

TEST_CASE("synth on the examples") {
    const auto out = run("synth " + data("example1.json") + " --mode output");
    REQUIRE(out.code == 0);
    const auto d = json::parse(out.out);
    CHECK(d["F"].size() == 1);
    CHECK(d["closed_loop"]["admissible"] == true);

    const auto file = scratch() / "design2.json";
    REQUIRE(run("synth " + data("example2.json") + " --mode observer --out " + file.string()).code == 0);
    const auto d2 = json::parse(slurp(file));
    CHECK(d2["K"].size() == 1);
    CHECK(d2["K"][0].size() == 6);
    CHECK(d2["L"].size() == 6);
    CHECK(d2["L"][0].size() == 1);
    CHECK(d2["closed_loop"]["admissible"] == true);
}

TEST_CASE("synth infeasibility exit codes") {
    const auto no_input = write("no_input.json", std::string("{") + kPlant + R"(, "B": [[0], [0], [0]], "C": [[1, 0, 1]]})");
    CHECK(run("synth " + no_input.string() + " --mode observer").code == 3);
    CHECK(run("synth " + no_input.string() + " --mode output").code == 3);
    const auto no_output = write("no_output.json", std::string("{") + kPlant + R"(, "B": [[1], [1], [1]], "C": [[0, 0, 0]]})");
    CHECK(run("synth " + no_output.string() + " --mode output --retries 2").code == 4);
    CHECK(run("synth " + data("example1.json") + " --mode nonsense").code == 1);
}

TEST_CASE("simulate with injected gains skips synthesis") {
    const auto dir = scratch() / "sim_injected";
    const auto r = run("simulate " + data("example1_published_gains.json") + " --horizon 2 --out " + dir.string());
    REQUIRE(r.code == 0);
    const auto s = json::parse(slurp(dir / "summary.json"));
    CHECK(s["source"] == "injected");
    CHECK(s["controller"] == "output");
    CHECK(s["closed_loop"]["admissible"] == true);
    CHECK(s["config"]["horizon"] == 2.0);
    const std::string csv = slurp(dir / "trajectory.csv");
    CHECK(csv.rfind("t,x1,x2,x3,u1\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2002);
}

TEST_CASE("flag beats environment beats file") {
    const auto dir = scratch() / "sim_precedence";
    REQUIRE(run("simulate " + data("example1_published_gains.json") + " --out " + dir.string(), "SFOS_HORIZON=0.5").code == 0);
    CHECK(json::parse(slurp(dir / "summary.json"))["config"]["horizon"] == 0.5);
    REQUIRE(run("simulate " + data("example1_published_gains.json") + " --horizon 0.25 --out " + dir.string(),
                "SFOS_HORIZON=0.5")
                .code == 0);
    CHECK(json::parse(slurp(dir / "summary.json"))["config"]["horizon"] == 0.25);
    // The file's h applies when neither flag nor environment sets it.
    CHECK(json::parse(slurp(dir / "summary.json"))["config"]["h"] == 0.001);
}

TEST_CASE("debug trace writes one file per solve") {
    const auto prefix = scratch() / "trace";
    REQUIRE(run("synth " + data("example1.json") + " --mode observer --debug-trace " + prefix.string()).code == 0);
    CHECK(fs::exists(prefix.string() + "_state_feedback.json"));
    CHECK(fs::exists(prefix.string() + "_output_injection.json"));
}

TEST_CASE("demo output is deterministic") {
    const auto a = scratch() / "demo_a", b = scratch() / "demo_b";
    REQUIRE(run("demo example1 --horizon 2 --out " + a.string()).code == 0);
    REQUIRE(run("demo example1 --horizon 2 --out " + b.string()).code == 0);
    for (const char* f : {"fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv", "fig5.csv", "summary.json"}) {
        REQUIRE(fs::exists(a / f));
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    }
    CHECK(slurp(a / "fig1.csv").rfind("t,x1,x2,x3\n", 0) == 0);
    CHECK(slurp(a / "fig2.csv").rfind("t,u1\n", 0) == 0);
    CHECK(slurp(a / "fig3.csv").rfind("t,e1,e2,e3\n", 0) == 0);
    const auto s = json::parse(slurp(a / "summary.json"));
    CHECK(s["example"] == "example1");
    CHECK(s["observer"].contains("final_ratio"));
    CHECK(s["output"].contains("decay_exponent"));
}

TEST_CASE("demo example2 writes figures six to ten") {
    const auto dir = scratch() / "demo2";
    REQUIRE(run("demo example2 --horizon 2 --out " + dir.string()).code == 0);
    for (const char* f : {"fig6.csv", "fig7.csv", "fig8.csv", "fig9.csv", "fig10.csv"}) CHECK(fs::exists(dir / f));
    const auto s = json::parse(slurp(dir / "summary.json"));
    CHECK(s["k"] == 2);
    CHECK(s["observer"]["K"][0].size() == 6);
    CHECK(s.contains("faster_than_reference"));
}

TEST_CASE("cleanup") { fs::remove_all(scratch()); }
