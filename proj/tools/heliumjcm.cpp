// heliumjcm: command-line driver.
//
//   heliumjcm <task> --config <path> [--out <dir>] [--threads N]
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure (a failure
// manifest is written next to the outputs), 4 self-test failure.

#include "heliumjcm/config.hpp"
#include "heliumjcm/errors.hpp"
#include "heliumjcm/tasks.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_self_test = 4;

constexpr const char* output_env = "HELIUMJCM_OUTPUT_DIR";

int validate(const std::string& path) {
    const heliumjcm::RunConfig cfg = heliumjcm::load_config(path);
    if (cfg.task) {
        cfg.validate(*cfg.task);
        for (const auto& w : cfg.warnings(*cfg.task))
            std::cout << "warning: " << w << '\n';
    } else {
        cfg.material().validate();
        cfg.grid.validate();
        std::cout << "note: no task key; only material and grid were checked\n";
    }
    std::cout << "ok\n";
    for (const auto& e : cfg.resolved()) {
        if (e.value.empty())
            continue;
        std::cout << "  " << e.key << " = " << e.value << (e.set ? "" : "  (default)") << '\n';
    }
    return exit_ok;
}

void write_manifest(const std::string& dir, const std::string& kind, const std::string& message) {
    try {
        std::filesystem::create_directories(dir);
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        j.push_back({{"sweep_index", -1}, {"sweep_value", nullptr}, {"kind", kind}, {"message", message}});
        std::ofstream(std::filesystem::path(dir) / "failures.json") << j.dump(2) << '\n';
    } catch (const std::exception&) {
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tilted-field Rydberg/Landau spectra of electrons on liquid helium"};
    app.set_version_flag("--version", heliumjcm::version());

    std::string task_name;
    std::string config_path;
    std::string out_dir;
    int threads = 1;
    app.add_option("task", task_name,
                   "spectrum-sweep | absorption-map | shifts | crossings | rates | self-test | validate")
        ->required();
    app.add_option("--config,-c", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    app.add_option("--out,-o", out_dir, std::string("output directory (default: $") + output_env + " or ./out)");
    app.add_option("--threads,-j", threads, "worker threads")->check(CLI::Range(1, 1024));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    if (out_dir.empty()) {
        const char* env = std::getenv(output_env);
        out_dir = env && *env ? env : "out";
    }

    try {
        if (task_name == "validate")
            return validate(config_path);
        const heliumjcm::Task task = heliumjcm::parse_task(task_name);
        heliumjcm::RunConfig cfg = heliumjcm::load_config(config_path);
        if (!cfg.output_dir.empty() && !app.count("--out") && !std::getenv(output_env))
            out_dir = cfg.output_dir;
        const heliumjcm::TaskOutcome outcome = heliumjcm::run_task(task, cfg, out_dir, threads, std::cout);
        for (const auto& f : outcome.files)
            std::cout << "wrote " << f << '\n';
        if (outcome.self_test_failed) {
            std::cerr << "self-test failed\n";
            return exit_self_test;
        }
        if (!outcome.failures.empty()) {
            std::cerr << outcome.failures.size() << " point(s) failed; see the failure manifest\n";
            return exit_numerical;
        }
        return exit_ok;
    } catch (const heliumjcm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const heliumjcm::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        write_manifest(out_dir, "Error", e.what());
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        write_manifest(out_dir, "Error", e.what());
        return exit_numerical;
    }
}
