#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hspec/error.hpp"
#include "hspec/experiment.hpp"

using namespace hspec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("hspec_test_" + name);
    fs::remove_all(d);
    return d;
}

std::string config_error_message(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("apply_override") {
    json j{{"suite", "singular"}, {"N_c", 64}};
    apply_override(j, "N_c=32");
    CHECK(j["N_c"] == 32);
    apply_override(j, "map=half");
    CHECK(j["map"] == "half");
    apply_override(j, "n_list=[16,32,64]");
    CHECK(j["n_list"].size() == 3);
    apply_override(j, "map.type=poly");
    CHECK(j["map"]["type"] == "poly");
    CHECK_THROWS_AS(apply_override(j, "no_equals_sign"), ConfigError);
}

TEST_CASE("content_hash matches git blob hashes") {
    CHECK(content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(content_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("parse_config resolves defaults") {
    const ExperimentConfig c = parse_config(json{{"suite", "singular"}, {"map", "half"}});
    CHECK(c.N_c == 64);
    CHECK(c.N_r == 256);
    CHECK(c.M >= 8 * c.N_c);
    CHECK((c.M & (c.M - 1)) == 0);
    CHECK(c.contact);
    CHECK(c.n_list == std::vector<std::size_t>{64, 128, 256});
    CHECK(c.echo["N_r"] == 256);
    CHECK_FALSE(c.echo.contains("out_dir"));
}

TEST_CASE("parse_config errors name the field") {
    CHECK(config_error_message({{"suite", "nope"}, {"map", "half"}}).find("suite") != std::string::npos);
    CHECK(config_error_message({{"suite", "singular"}, {"map", "nope"}}).find("map") != std::string::npos);
    CHECK(config_error_message({{"suite", "singular"}, {"map", "half"}, {"bogus", 1}}).find("bogus") !=
          std::string::npos);
    CHECK(config_error_message({{"suite", "singular"}, {"map", "half"}, {"N_c", 2}}).find("N_c") != std::string::npos);
    CHECK(config_error_message({{"suite", "singular"}, {"map", "half"}, {"N_c", 64}, {"N_r", 100}}).find("N_r") !=
          std::string::npos);
    CHECK(config_error_message({{"suite", "singular"}, {"map", "half"}, {"M", 1000}}).find("M") != std::string::npos);
    CHECK(config_error_message({{"suite", "singular"}, {"map", "half"}, {"n_list", {64, 32, 128}}}).find("n_list") !=
          std::string::npos);
    CHECK(config_error_message({{"suite", "semigroup"}, {"map", "half"}, {"t_grid", {0.5, 0.8}}}).find("t_grid") !=
          std::string::npos);
    const json outside = json::parse(R"({"compose": [{"poly": [[0.3, 0], [0.8, 0]]}]})");
    const std::string msg = config_error_message({{"suite", "singular"}, {"map", outside}});
    CHECK(msg.find("map") != std::string::npos);
    CHECK(msg.find("compose") == std::string::npos);
    const json inside = json::parse(R"({"compose": [{"poly": [[0.1, 0], [0.8, 0]]}]})");
    CHECK(config_error_message({{"suite", "singular"}, {"map", inside}}).empty());
}

TEST_CASE("run_experiment: selftest passes") {
    std::ostringstream log;
    const fs::path out = fresh_dir("selftest");
    CHECK(run_experiment({{"suite", "selftest"}, {"out_dir", out.string()}}, log) == kExitPass);
    CHECK(fs::exists(out / "selftest.csv"));
    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["pass"] == true);
    fs::remove_all(out);
}

TEST_CASE("run_experiment: singular on Scale(1/2) reproduces the diagonal oracle") {
    const fs::path out = fresh_dir("singular");
    const json cfg{{"suite", "singular"}, {"map", "scale05"}, {"N_c", 16}, {"n_list", {16, 32, 64}}, {"out_dir", out.string()}};
    std::ostringstream log;
    REQUIRE(run_experiment(cfg, log) == kExitPass);
    for (const char* f : {"manifest.json", "summary.json", "spectrum.csv", "wco.hspm", "essential_norm.csv"}) {
        INFO(f);
        CHECK(fs::exists(out / f));
    }
    std::istringstream csv(slurp(out / "spectrum.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "n,s_n,stab_n,trusted");
    for (int n = 1; n <= 4; ++n) {
        std::getline(csv, line);
        const std::size_t a = line.find(',');
        const std::size_t b = line.find(',', a + 1);
        CHECK(std::stoi(line.substr(0, a)) == n);
        CHECK(std::abs(std::stod(line.substr(a + 1, b - a - 1)) - std::pow(0.5, n - 0.5)) < 1e-15);
    }
    const json manifest = json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["suite"] == "singular");
    CHECK(manifest["input_hash"] == content_hash(manifest["config"].dump()));

    // reruns are byte-identical
    const std::string first = slurp(out / "summary.json");
    const std::string first_csv = slurp(out / "spectrum.csv");
    std::ostringstream log2;
    REQUIRE(run_experiment(cfg, log2) == kExitPass);
    CHECK(slurp(out / "summary.json") == first);
    CHECK(slurp(out / "spectrum.csv") == first_csv);
    fs::remove_all(out);
}

TEST_CASE("run_experiment exit codes") {
    std::ostringstream log;
    CHECK(run_experiment({{"suite", "singular"}, {"map", "nope"}}, log) == kExitConfig);
    CHECK(log.str().find("config error") != std::string::npos);

    // truncations this small cannot resolve the essential norm of a contact map
    std::ostringstream log2;
    CHECK(run_experiment({{"suite", "singular"}, {"map", "mobius03_half"}, {"N_c", 4}, {"n_list", {4, 6, 8}}}, log2) ==
          kExitAssertion);
    CHECK(log2.str().find("FAIL essential_norm_dichotomy") != std::string::npos);
}

TEST_CASE("run_experiment: fock, restrict and fisher suites") {
    std::ostringstream log;
    CHECK(run_experiment({{"suite", "fock"}, {"map", "mobius03"}, {"N_c", 32}}, log) == kExitPass);
    CHECK(run_experiment({{"suite", "restrict"}, {"map", "scale05"}, {"N_c", 32}}, log) == kExitPass);
    const fs::path out = fresh_dir("fisher");
    CHECK(run_experiment({{"suite", "fisher"}, {"map", "identity"}, {"N_c", 32}, {"t", 0.8}, {"out_dir", out.string()}},
                         log) == kExitPass);
    CHECK(fs::exists(out / "fisher.csv"));
    CHECK(fs::exists(out / "eigenpairs.json"));
    fs::remove_all(out);
}

TEST_CASE("selftest checks all pass") {
    const std::vector<Check> checks = selftest_checks();
    CHECK(checks.size() >= 30);
    for (const auto& c : checks) {
        INFO(c.name);
        CHECK(c.pass);
    }
}
