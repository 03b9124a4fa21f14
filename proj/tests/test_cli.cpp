#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "eisenhart/config.hpp"
#include "eisenhart/errors.hpp"
#include "eisenhart/run.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("eisenhart_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Result cli(const std::string& command, const std::string& config, const std::string& extra = "") {
    static int counter = 0;
    const auto tag = std::to_string(counter++);
    const fs::path cfg = scratch("cfg" + tag + ".json");
    const fs::path out = scratch("stdout" + tag + ".txt");
    std::ofstream(cfg) << config;
    const std::string cmd = std::string("\"") + EISENHART_CLI + "\" " + command + " --config \"" + cfg.string() +
                            "\" " + extra + " > \"" + out.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

}  // namespace

TEST_CASE("flatness verdicts") {
    const auto flat = cli("flatness", R"({"potential": {"family": "ermakov", "params": {"V0": 1}},
                                         "lift": "riemannian11", "alpha": 1, "energy": 1})");
    CHECK(flat.code == 0);
    CHECK(flat.out.find("verdict: Flat") != std::string::npos);

    const auto quartic = cli("flatness", R"({"potential": {"family": "polynomial", "params": {"coefficients": [0, 0, 0, 0, 1]}},
                                            "lift": "lorentzian12", "energy": 1, "grid": {"x_min": -2, "x_max": 2, "n_points": 41}})");
    CHECK(quartic.code == 0);
    CHECK(quartic.out.find("verdict: NotConformallyFlat") != std::string::npos);

    const auto json = cli("flatness", R"({"potential": {"family": "oscillator", "params": {"omega": 1}},
                                         "lift": "lorentzian12", "energy": 0.5})", "--format json");
    CHECK(json.code == 0);
    CHECK(nlohmann::json::parse(json.out).at("verdict") == "ConformallyFlat");
}

TEST_CASE("invalid configurations exit with 2") {
    CHECK(cli("flatness", "{not json").code == 2);
    CHECK(cli("flatness", R"({"potential": {"family": "ermakov", "params": {"V0": 1}}, "bogus": 1})").code == 2);
    CHECK(cli("flatness", R"({"potential": {"family": "nope"}, "lift": "riemannian11"})").code == 2);
    CHECK(cli("integrate", R"({"command": "flatness", "potential": {"family": "oscillator", "params": {"omega": 1}}})").code == 2);
    CHECK(cli("flatness", R"({"potential": {"family": "ermakov", "params": {"V0": 1}}, "lift": "riemannian11",
                              "grid": {"x_min": 3, "x_max": 1, "n_points": 10}})").code == 2);
    // alpha V < 0: the lift cannot be built.
    CHECK(cli("flatness", R"({"potential": {"family": "ermakov", "params": {"V0": 1}}, "lift": "riemannian11",
                              "alpha": -1, "energy": 1})").code == 2);
    CHECK(cli("integrate", R"({"potential": {"family": "oscillator", "params": {"omega": 1}}})", "--format xml").code == 2);
}

TEST_CASE("numeric failures exit with 3") {
    const auto r = cli("integrate", R"({"potential": {"family": "oscillator", "params": {"omega": 1}},
                                       "t_span": [0, 100], "integrator": {"max_steps": 5}})");
    CHECK(r.code == 3);
}

TEST_CASE("integrate output is deterministic") {
    const std::string cfg = R"({"potential": {"family": "ermakov", "params": {"V0": 0.5}},
                                "lift": "riemannian11", "initial": {"x0": 1, "v0": 0.2}, "t_span": [0, 2]})";
    const auto a = cli("integrate", cfg);
    const auto b = cli("integrate", cfg);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("t,x,z,p_x,p_z") != std::string::npos);

    const fs::path out = scratch("traj.csv");
    const auto c = cli("integrate", cfg, "--out \"" + out.string() + "\"");
    CHECK(c.code == 0);
    CHECK(slurp(out) == a.out);
}

TEST_CASE("roundtrip and lift commands") {
    const auto r = cli("roundtrip", R"({"potential": {"family": "oscillator", "params": {"omega": 1}},
                                       "initial": {"x0": 1, "v0": 0}, "t_span": [0, 3.141592653589793]})",
                       "--format json");
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("max_deviation").get<double>() < 1e-6);

    const auto l = cli("lift", R"({"potential": {"family": "morse", "params": {"V1": 1, "V2": 1, "lambda": 1}},
                                  "lift": "conformal_mixed13", "alpha": -1, "energy": 2})", "--format json");
    CHECK(l.code == 0);
}

TEST_CASE("suite passes") {
    const auto r = cli("suite", "{}");
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("library entry point") {
    using namespace eisenhart;
    CHECK(exit_code_for(ConfigError("x")) == 2);
    CHECK(exit_code_for(ConstructionError("x")) == 2);
    CHECK(exit_code_for(IntegrationError("x")) == 3);
    CHECK(exit_code_for(NumericError("x")) == 3);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"command": "fly"})")), ConfigError);
    const auto c = parse_config(nlohmann::json::parse(R"({"command": "suite", "seed": 9})"));
    CHECK(c.command == Command::Suite);
    CHECK(c.seed == 9);
}
