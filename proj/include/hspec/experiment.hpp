#pragma once

// Configuration-driven experiment runner. A run validates its configuration,
// executes one suite, and writes manifest.json, per-suite CSV/JSON results
// and summary.json into the output directory.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hspec/holo.hpp"

namespace hspec {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertion = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitConfig = 64;

std::string version();

const std::vector<std::string>& suite_names();

struct ExperimentConfig {
    std::string suite;
    nlohmann::json map_spec;  // corpus name or HoloMap JSON
    HoloMap map;
    bool contact = false;
    std::size_t N_c = 64;
    std::size_t N_r = 256;
    std::size_t M = 0;  // resolved to a power of two >= 8 max(N_c, N_r/4)
    std::vector<std::size_t> n_list;
    std::vector<double> t_grid;
    double t = 1.0;
    std::optional<double> threshold;
    std::filesystem::path out_dir;
    nlohmann::json echo;  // the validated input, echoed in the manifest
};

// Applies "key=value"; the value is parsed as JSON when possible and kept as
// a string otherwise. Dotted keys address nested objects.
void apply_override(nlohmann::json& config, const std::string& assignment);

// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);

// Git-style blob SHA-1 ("blob <len>\0" + bytes) as lowercase hex.
std::string content_hash(const std::string& bytes);

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
    std::string note;
};

nlohmann::json to_json(const Check& c);

struct SuiteResult {
    std::vector<Check> checks;
    nlohmann::json details = nlohmann::json::object();
    // artifact file name -> contents, written into the output directory
    std::vector<std::pair<std::string, std::string>> files;

    bool passed() const;
};

// Runs one suite. Numerical failures propagate as exceptions.
SuiteResult run_suite(const ExperimentConfig& config);

// Oracle checks covering every toolkit operation.
std::vector<Check> selftest_checks();

// Full run with artifact files; returns the exit code and never throws.
int run_experiment(const nlohmann::json& config, std::ostream& log);

}  // namespace hspec
