#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gsr/cli.hpp"
#include "gsr/params.hpp"
#include "json.hpp"

using namespace gsr;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "gsr_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double summary_rate(const std::string& line) {
    auto at = line.find("R_eff=");
    REQUIRE(at != std::string::npos);
    return std::stod(line.substr(at + 6));
}

}  // namespace

TEST_CASE("optimize reproduces the fast-emitter tree operating point", "[cli]") {
    auto r = invoke({"optimize", "--protocol", "tree", "--scheme", "feedback", "--gamma-ghz", "100", "--tcoh-s", "1",
                     "-o", scratch("opt.json").string()});
    REQUIRE(r.code == cli::kExitOk);
    double R = summary_rate(r.out);
    CHECK(R > 151.1e3 / 3);
    CHECK(R < 151.1e3 * 3);
    CHECK(r.out.find("secure=true") != std::string::npos);
    CHECK(r.out.find("geometry=") != std::string::npos);
}

TEST_CASE("evaluate with total loss reports zero rate", "[cli]") {
    auto cfg = scratch("lossy.json");
    std::ofstream(cfg) << R"({"mu_coup": 1.0})";
    auto r = invoke({"evaluate", "--config", cfg.string(), "-o", scratch("lossy_out.json").string()});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.rfind("R_eff=0 Hz", 0) == 0);
}

TEST_CASE("validation and runtime errors map to exit codes", "[cli]") {
    auto bad = invoke({"sweep", "--grid", "bad"});
    CHECK(bad.code == cli::kExitValidation);
    CHECK(bad.err.find("grid") != std::string::npos);
    CHECK(invoke({"evaluate", "--no-such-flag"}).code == cli::kExitValidation);
    CHECK(invoke({"evaluate", "--config", scratch("missing.json").string()}).code == cli::kExitValidation);
    CHECK(invoke({"evaluate", "--geometry", "4-0-5"}).code == cli::kExitValidation);
    CHECK(invoke({}).code == cli::kExitValidation);
    CHECK(invoke({"evaluate", "-o", "/nonexistent-dir/x/out.json"}).code == cli::kExitRuntime);
}

TEST_CASE("artifacts are byte identical across runs and worker counts", "[cli]") {
    auto a = scratch("sweep_a.csv"), b = scratch("sweep_b.csv");
    std::vector<std::string> args{"sweep", "--protocol", "rgs", "--scheme", "feedback", "--grid", "10,100/1e-3,inf",
                                  "--b-max", "6", "--N-values", "4,8", "--m-plus-1-max", "300"};
    auto x = args, y = args;
    x.insert(x.end(), {"-o", a.string(), "-j", "1"});
    y.insert(y.end(), {"-o", b.string(), "-j", "2"});
    REQUIRE(invoke(x).code == 0);
    REQUIRE(invoke(y).code == 0);
    CHECK(slurp(a) == slurp(b));

    auto o1 = scratch("oracle_a.json"), o2 = scratch("oracle_b.json");
    std::vector<std::string> oracle{"oracle", "--kind", "tree-error", "--geometry", "2-3", "--trials", "50000",
                                    "--seed", "7"};
    auto p = oracle, q = oracle;
    p.insert(p.end(), {"-o", o1.string()});
    q.insert(q.end(), {"-o", o2.string()});
    REQUIRE(invoke(p).code == 0);
    REQUIRE(invoke(q).code == 0);
    CHECK(slurp(o1) == slurp(o2));
}

TEST_CASE("artifacts embed the resolved configuration", "[cli]") {
    auto path = scratch("eval.json");
    REQUIRE(invoke({"evaluate", "--geometry", "32:24-7", "--scheme", "feedback", "--gamma-ghz", "100", "--tcoh-s",
                    "4e-6", "--m", "311", "-o", path.string()})
                .code == 0);
    auto j = nlohmann::json::parse(slurp(path));
    RunConfig c = parse_config(j["provenance"]["config"].dump());
    CHECK(to_string(c.geometry) == "32:24-7");
    CHECK(c.m == 311);
    CHECK(c.scheme == Scheme::feedback);
    CHECK(j["result"]["geometry"] == "32:24-7");

    auto csv = scratch("scan.csv");
    REQUIRE(invoke({"scan", "--protocol", "tree", "--distances-km", "300,600", "--b-max", "5", "--depths", "2",
                    "-o", csv.string()})
                .code == 0);
    std::istringstream in(slurp(csv));
    std::string line;
    bool found = false;
    while (std::getline(in, line)) {
        if (line.rfind("# config: ", 0) == 0) {
            RunConfig s = parse_config(line.substr(10));
            CHECK(s.protocol == Protocol::tree);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("output directory from the environment", "[cli]") {
    fs::path dir = scratch("env_out");
    fs::remove_all(dir);
    ::setenv(cli::kOutputDirEnv, dir.c_str(), 1);
    auto r = invoke({"sequence", "--geometry", "2-3", "--scheme", "feedback"});
    ::unsetenv(cli::kOutputDirEnv);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "sequence.csv"));
    std::string text = slurp(dir / "sequence.csv");
    CHECK(text.find("kind,start_s,duration_s,target") != std::string::npos);
}

TEST_CASE("oracle verb checks the analytic model", "[cli]") {
    auto path = scratch("exh.json");
    auto r = invoke({"oracle", "--kind", "tree-success", "--geometry", "2-3", "--mu", "0.1", "-o", path.string()});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(slurp(path));
    CHECK(j["result"]["abs_difference"].get<double>() < 1e-12);
    CHECK(invoke({"oracle", "--kind", "rgs-link", "--geometry", "2-3"}).code == cli::kExitValidation);
}
