#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hspec/error.hpp"
#include "hspec/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral experiments for weighted composition operators on the Hardy space"};
    app.set_version_flag("--version", hspec::version());

    std::string suite;
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    app.add_option("suite", suite, "Suite to run")->required()->check(CLI::IsMember(hspec::suite_names()));
    app.add_option("-c,--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("-o,--out", out_dir, "Output directory for artifacts");
    app.add_option("--set", overrides, "Override a config field, key=value (repeatable)");
    app.footer("Environment: HSPEC_THREADS caps the number of worker threads.\n"
               "Exit codes: 0 pass, 2 assertion failed, 3 numerical failure, 64 config error.");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return hspec::kExitConfig;
    }

    nlohmann::json config = nlohmann::json::object();
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            config = nlohmann::json::parse(in);
        }
        for (const auto& o : overrides) hspec::apply_override(config, o);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return hspec::kExitConfig;
    }
    config["suite"] = suite;
    if (!out_dir.empty()) config["out_dir"] = out_dir;

    return hspec::run_experiment(config, std::cout);
}
