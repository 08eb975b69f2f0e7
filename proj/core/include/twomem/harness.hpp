#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twomem/agent.hpp"
#include "twomem/config.hpp"
#include "twomem/env.hpp"

namespace twomem {

struct ExperimentConfig {
    std::string env_name = "windy_grid";
    std::string env_file;        // for env_name == "tabular"
    AgentConfig agent{};         // agent.seed is replaced per run
    std::uint64_t total_steps = 50000;
    std::uint32_t eval_interval = 500;
    std::uint32_t eval_episodes = 5;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::filesystem::path output_dir = "out";
    std::string label;           // defaults to the agent mode name
    bool temperature_explicit = false; // else temperature = total_steps / 5

    std::string resolved_label() const {
        return label.empty() ? to_string(agent.mode) : label;
    }
    // Empty when valid; otherwise one message per problem.
    std::vector<std::string> validate() const;
};

ExperimentConfig experiment_config_from(const KeyValueConfig& kv);
ExperimentConfig load_experiment_config(const std::string& path);

enum class RecordKind { train, eval, state };

const char* to_string(RecordKind kind);

struct MetricsRow {
    std::uint64_t global_step = 0;
    RecordKind kind = RecordKind::train;
    std::optional<double> episode_return;
    std::optional<MemoryKind> memory_used;
    double p_ec = 0.0;
    double q_sum_rl = 0.0;
    std::uint64_t ec_table_size = 0;
    std::optional<double> score_rl;
    std::optional<double> score_ec;
};

// Append-only per-run event log. Train rows land after every training
// episode; one eval row (mean over the checkpoint's greedy episodes) and one
// state row land at every eval_interval checkpoint.
struct RunMetrics {
    std::string env_name;
    std::string label;
    AgentMode mode = AgentMode::two_memory;
    std::uint64_t seed = 0;
    std::vector<MetricsRow> rows;

    std::vector<const MetricsRow*> rows_of(RecordKind kind) const;

    void write_csv(const std::filesystem::path& path) const;
    static RunMetrics read_csv(const std::filesystem::path& path);
    static std::string csv_header();
};

// One seeded run; deterministic for a given config and seed.
RunMetrics run_single(const ExperimentConfig& config, std::uint64_t seed);

// All seeds of an experiment, one CSV per seed under output_dir. Throws
// ExperimentError naming the seed and step on a runtime failure.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config,
                                                  std::ostream* log = nullptr);

struct ExperimentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Across-seed aggregate per label and checkpoint. std is the population
// standard deviation (zero for a single run).
struct SweepSummary {
    struct Point {
        std::uint64_t global_step = 0;
        double mean_return = 0.0;
        double std_return = 0.0;
        double mean_q_sum = 0.0;
        double std_q_sum = 0.0;
        std::size_t runs = 0;
    };
    struct Curve {
        std::string label;
        std::vector<Point> points;
    };
    std::vector<Curve> curves;

    void write_csv(const std::filesystem::path& path) const;
};

SweepSummary summarize(const std::vector<RunMetrics>& runs);

// Renders the report artifacts (aggregate.csv, eval_returns.svg, q_sum.svg,
// memory_bands.svg) for a set of per-run CSVs. All runs sharing a label must
// share the same checkpoint grid.
SweepSummary write_report(const std::vector<std::filesystem::path>& metrics_paths,
                          const std::filesystem::path& out_dir);

// Expands the base config into the ablation grid — {sharing on, off} x
// {decayed, constant, increased} schedules plus both pure baselines — runs
// everything, and writes per-run CSVs plus ablation_summary.csv.
SweepSummary ablation_suite(const ExperimentConfig& base, std::ostream* log = nullptr);

// The ablation variant list (label, mode, schedule, data_sharing).
struct AblationVariant {
    std::string label;
    AgentMode mode;
    Schedule schedule;
    bool data_sharing;
};
std::vector<AblationVariant> ablation_variants(const ExperimentConfig& base);

} // namespace twomem
