#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "twomem/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kRuntimeFailure = 2;

twomem::ExperimentConfig load_config(const std::string& path,
                                     const std::optional<std::uint64_t>& seed_override) {
    twomem::ExperimentConfig config = twomem::load_experiment_config(path);
    if (seed_override) config.seeds = {*seed_override};
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"twomem: a two-memory (episodic control + tabular Q-learning) gridworld lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> csv_paths;
    std::optional<std::uint64_t> seed_override;
    bool quiet = false;

    CLI::App* run = app.add_subcommand("run", "execute the seeded runs of a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--seed-override", seed_override, "run only this seed");
    run->add_flag("--quiet", quiet, "suppress progress output");

    CLI::App* report = app.add_subcommand("report", "render plots and aggregates from run CSVs");
    report->add_option("csv", csv_paths, "metrics CSV files")->required()->expected(-1);
    report->add_option("--out", out_dir, "output directory")->required();
    report->add_flag("--quiet", quiet, "suppress progress output");

    CLI::App* ablate = app.add_subcommand("ablate", "run the ablation grid of a base config");
    ablate->add_option("config", config_path, "base experiment config file")->required();
    ablate->add_option("--seed-override", seed_override, "run only this seed");
    ablate->add_flag("--quiet", quiet, "suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidationError;
    }

    std::ostream* log = quiet ? nullptr : &std::cout;
    try {
        if (run->parsed()) {
            const auto config = load_config(config_path, seed_override);
            const auto paths = twomem::run_experiment(config, log);
            if (log) *log << paths.size() << " run(s) completed\n";
        } else if (report->parsed()) {
            std::vector<std::filesystem::path> paths(csv_paths.begin(), csv_paths.end());
            twomem::write_report(paths, out_dir);
            if (log) *log << "report written to " << out_dir << '\n';
        } else if (ablate->parsed()) {
            const auto config = load_config(config_path, seed_override);
            twomem::ablation_suite(config, log);
            if (log) {
                *log << "ablation summary written to "
                     << (std::filesystem::path(config.output_dir) / "ablation_summary.csv").string()
                     << '\n';
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kOk;
}
