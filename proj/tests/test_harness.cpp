#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "twomem/harness.hpp"

using namespace twomem;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "twomem_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

ExperimentConfig tiny_tree_config(AgentMode mode) {
    ExperimentConfig config;
    config.env_name = "motivating_tree";
    config.agent.mode = mode;
    config.total_steps = 600;
    config.eval_interval = 200;
    config.eval_episodes = 3;
    config.seeds = {1};
    return config;
}

} // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("config files parse into experiment configs") {
    const std::string text =
        "# sample\n"
        "env.name = windy_grid\n"
        "agent.mode = two_memory\n"
        "agent.epsilon = 0.2\n"
        "agent.train_every = 5\n"
        "agent.batch_size = 16\n"
        "agent.data_sharing = false\n"
        "schedule.p_start = 0.8\n"
        "schedule.p_end = 0.2\n"
        "schedule.temperature = 1234\n"
        "rl.alpha = 0.05\n"
        "ec.k = 10\n"
        "run.total_steps = 9000\n"
        "run.eval_interval = 300\n"
        "run.eval_episodes = 2\n"
        "run.seeds = 3, 5, 8\n"
        "run.output_dir = /tmp/somewhere\n"
        "run.label = demo\n";
    const auto config = experiment_config_from(KeyValueConfig::parse_text(text, "test"));
    CHECK(config.env_name == "windy_grid");
    CHECK(config.agent.epsilon == 0.2);
    CHECK(config.agent.train_every == 5);
    CHECK(config.agent.batch_size == 16);
    CHECK_FALSE(config.agent.data_sharing);
    CHECK(config.agent.schedule.p_start == 0.8);
    CHECK(config.agent.schedule.temperature == 1234.0);
    CHECK(config.temperature_explicit);
    CHECK(config.agent.alpha == 0.05);
    CHECK(config.agent.ec_k == 10);
    CHECK(config.total_steps == 9000);
    CHECK(config.seeds == std::vector<std::uint64_t>{3, 5, 8});
    CHECK(config.resolved_label() == "demo");
    CHECK(config.validate().empty());
}

TEST_CASE("unknown keys and bad values are rejected") {
    CHECK_THROWS_WITH_AS(
        experiment_config_from(KeyValueConfig::parse_text("agent.moood = x\n", "t")),
        doctest::Contains("unknown keys"), std::invalid_argument);
    CHECK_THROWS_AS(experiment_config_from(KeyValueConfig::parse_text("agent.mode = banana\n", "t")),
                    std::invalid_argument);
    CHECK_THROWS_AS(experiment_config_from(KeyValueConfig::parse_text("agent.epsilon = hot\n", "t")),
                    std::invalid_argument);
    CHECK_THROWS_AS(KeyValueConfig::parse_text("just some words\n", "t"), std::invalid_argument);
    CHECK_THROWS_AS(KeyValueConfig::parse_text("a.b = 1\na.b = 2\n", "t"), std::invalid_argument);
}

TEST_CASE("invalid configs produce named validation errors") {
    ExperimentConfig config = tiny_tree_config(AgentMode::two_memory);
    config.agent.epsilon = 2.0;
    config.seeds.clear();
    config.total_steps = 100;
    config.eval_interval = 200;
    const auto errors = config.validate();
    CHECK(errors.size() == 3);
    CHECK_THROWS_AS(run_single(config, 1), std::invalid_argument);
}

TEST_CASE("the default temperature is a fifth of the training budget") {
    ExperimentConfig config = tiny_tree_config(AgentMode::pure_ec);
    config.total_steps = 5000;
    config.eval_interval = 500;
    const RunMetrics metrics = run_single(config, 1);
    const auto states = metrics.rows_of(RecordKind::state);
    REQUIRE_FALSE(states.empty());
    const Schedule expected{config.agent.schedule.p_start, config.agent.schedule.p_end, 1000.0};
    for (const auto* row : states) {
        CHECK(row->p_ec == expected.ec_probability(row->global_step));
    }
}

TEST_CASE("eval checkpoints land on the fixed grid") {
    ExperimentConfig config = tiny_tree_config(AgentMode::two_memory);
    config.total_steps = 1000;
    config.eval_interval = 250;
    const RunMetrics metrics = run_single(config, 3);
    const auto evals = metrics.rows_of(RecordKind::eval);
    REQUIRE(evals.size() == 4);
    CHECK(evals[0]->global_step == 250);
    CHECK(evals[3]->global_step == 1000);
    for (const auto* row : evals) {
        CHECK(row->memory_used.has_value());
        CHECK(row->episode_return.has_value());
    }
    // state rows accompany every checkpoint
    CHECK(metrics.rows_of(RecordKind::state).size() == 4);
    // train rows carry the episode returns
    for (const auto* row : metrics.rows_of(RecordKind::train)) {
        CHECK(row->episode_return.has_value());
        CHECK(row->memory_used.has_value());
    }
}

TEST_CASE("metrics CSVs round-trip byte-identically") {
    const fs::path dir = temp_dir("roundtrip");
    const RunMetrics metrics = run_single(tiny_tree_config(AgentMode::two_memory), 5);
    const fs::path first = dir / "run.csv";
    metrics.write_csv(first);

    const RunMetrics parsed = RunMetrics::read_csv(first);
    CHECK(parsed.env_name == metrics.env_name);
    CHECK(parsed.label == metrics.label);
    CHECK(parsed.mode == metrics.mode);
    CHECK(parsed.seed == metrics.seed);
    REQUIRE(parsed.rows.size() == metrics.rows.size());

    const fs::path second = dir / "run2.csv";
    parsed.write_csv(second);
    CHECK(slurp(first) == slurp(second));
}

TEST_CASE("identical runs write byte-identical files") {
    const fs::path dir = temp_dir("determinism");
    ExperimentConfig config = tiny_tree_config(AgentMode::two_memory);
    config.seeds = {1, 2};

    config.output_dir = dir / "a";
    const auto first = run_experiment(config);
    config.output_dir = dir / "b";
    const auto second = run_experiment(config);
    REQUIRE(first.size() == 2);
    REQUIRE(second.size() == 2);
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(slurp(first[i]) == slurp(second[i]));
    }
}

TEST_CASE("report aggregates match a brute-force recomputation") {
    const fs::path dir = temp_dir("report");
    ExperimentConfig config = tiny_tree_config(AgentMode::pure_ec);
    config.seeds = {1, 2, 3};
    config.output_dir = dir / "runs";
    auto paths = run_experiment(config);

    config.agent.mode = AgentMode::pure_rl;
    config.label = "pure_rl";
    const auto more = run_experiment(config);
    paths.insert(paths.end(), more.begin(), more.end());

    const SweepSummary summary = write_report(paths, dir / "report");
    CHECK(fs::exists(dir / "report" / "aggregate.csv"));
    CHECK(fs::exists(dir / "report" / "eval_returns.svg"));
    CHECK(fs::exists(dir / "report" / "q_sum.svg"));
    CHECK(fs::exists(dir / "report" / "memory_bands.svg"));
    CHECK(slurp(dir / "report" / "eval_returns.svg").find("<svg") == 0);

    REQUIRE(summary.curves.size() == 2);
    // brute force from the raw CSVs
    std::vector<RunMetrics> runs;
    for (const auto& path : paths) runs.push_back(RunMetrics::read_csv(path));
    for (const auto& curve : summary.curves) {
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
            std::vector<double> values;
            for (const auto& run : runs) {
                if (run.label != curve.label) continue;
                values.push_back(run.rows_of(RecordKind::eval)[i]->episode_return.value());
            }
            REQUIRE(values.size() == curve.points[i].runs);
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= values.size();
            double var = 0.0;
            for (double v : values) var += (v - mean) * (v - mean);
            const double std = std::sqrt(var / values.size());
            CHECK(std::abs(curve.points[i].mean_return - mean) < 1e-9);
            CHECK(std::abs(curve.points[i].std_return - std) < 1e-9);
        }
    }
}

TEST_CASE("a single run reports zero-width deviation") {
    const fs::path dir = temp_dir("single");
    ExperimentConfig config = tiny_tree_config(AgentMode::pure_ec);
    config.output_dir = dir;
    const auto paths = run_experiment(config);
    const SweepSummary summary = write_report(paths, dir / "report");
    for (const auto& point : summary.curves.at(0).points) {
        CHECK(point.std_return == 0.0);
        CHECK(point.runs == 1);
    }
}

TEST_CASE("report rejects empty input and mismatched grids") {
    CHECK_THROWS_AS(write_report({}, temp_dir("empty")), std::invalid_argument);

    const fs::path dir = temp_dir("mismatch");
    ExperimentConfig config = tiny_tree_config(AgentMode::pure_ec);
    config.output_dir = dir / "a";
    const auto first = run_experiment(config);

    config.eval_interval = 300; // different checkpoint grid, same label
    config.seeds = {9};
    config.output_dir = dir / "b";
    const auto second = run_experiment(config);

    std::vector<fs::path> all = first;
    all.insert(all.end(), second.begin(), second.end());
    CHECK_THROWS_WITH_AS(write_report(all, dir / "report"),
                         doctest::Contains("mismatched checkpoint grids"), std::invalid_argument);
}

TEST_CASE("the ablation grid expands to the eight documented variants") {
    const auto variants = ablation_variants(tiny_tree_config(AgentMode::two_memory));
    REQUIRE(variants.size() == 8);

    int sharing_on = 0, sharing_off = 0;
    for (const auto& v : variants) {
        if (v.mode == AgentMode::two_memory) (v.data_sharing ? sharing_on : sharing_off)++;
    }
    CHECK(sharing_on == 3);
    CHECK(sharing_off == 3);
    CHECK(variants[0].label == "2m_ds_decayed");
    CHECK(variants[0].schedule.p_start == 0.9);
    CHECK(variants[0].schedule.p_end == 0.1);
    CHECK(variants[1].label == "2m_ds_constant");
    CHECK(variants[1].schedule.p_start == 0.1);
    CHECK(variants[1].schedule.p_end == 0.1);
    CHECK(variants[2].label == "2m_ds_increased");
    CHECK(variants[2].schedule.p_start == 0.1);
    CHECK(variants[2].schedule.p_end == 0.9);
    CHECK(variants[3].label == "2m_nods_decayed");
    CHECK_FALSE(variants[3].data_sharing);
    CHECK(variants[6].label == "pure_ec");
    CHECK(variants[6].mode == AgentMode::pure_ec);
    CHECK(variants[7].label == "pure_rl");
    CHECK(variants[7].mode == AgentMode::pure_rl);
}

TEST_CASE("the ablation suite runs the full grid and writes a summary") {
    const fs::path dir = temp_dir("ablation");
    ExperimentConfig config = tiny_tree_config(AgentMode::two_memory);
    config.total_steps = 400;
    config.eval_interval = 200;
    config.seeds = {1, 2};
    config.output_dir = dir;

    const SweepSummary summary = ablation_suite(config);
    CHECK(summary.curves.size() == 8);
    std::size_t csv_count = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") ++csv_count;
    }
    CHECK(csv_count == 17); // 8 variants x 2 seeds + the summary
    CHECK(fs::exists(dir / "ablation_summary.csv"));
    for (const auto& curve : summary.curves) {
        for (const auto& point : curve.points) CHECK(point.runs == 2);
    }
}

TEST_SUITE_END();
