#include "twomem/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "twomem/svg_plot.hpp"

namespace twomem {

namespace {

std::string format_double(double v) {
    std::array<char, 32> buf;
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), result.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
        throw std::invalid_argument(context + ": bad number '" + text + "'");
    }
    return value;
}

std::uint64_t parse_uint(const std::string& text, const std::string& context) {
    std::uint64_t value = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
        throw std::invalid_argument(context + ": bad integer '" + text + "'");
    }
    return value;
}

std::string sanitize(const std::string& label) {
    std::string out = label;
    for (char& c : out) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
    }
    return out;
}

} // namespace

const char* to_string(RecordKind kind) {
    switch (kind) {
    case RecordKind::train: return "train";
    case RecordKind::eval: return "eval";
    default: return "state";
    }
}

// ---------------------------------------------------------------------------
// ExperimentConfig
// ---------------------------------------------------------------------------

std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> errors;
    if (env_name != "motivating_tree" && env_name != "windy_grid" && env_name != "tabular") {
        errors.push_back("env.name must be motivating_tree, windy_grid or tabular");
    }
    if (env_name == "tabular" && env_file.empty()) {
        errors.push_back("env.file is required for the tabular environment");
    }
    if (agent.epsilon < 0.0 || agent.epsilon > 1.0) errors.push_back("agent.epsilon not in [0, 1]");
    if (agent.train_every < 1) errors.push_back("agent.train_every must be >= 1");
    if (agent.batch_size < 1) errors.push_back("agent.batch_size must be >= 1");
    if (agent.alpha <= 0.0 || agent.alpha > 1.0) errors.push_back("rl.alpha not in (0, 1]");
    if (agent.gamma && (*agent.gamma <= 0.0 || *agent.gamma > 1.0)) {
        errors.push_back("rl.gamma not in (0, 1]");
    }
    if (agent.schedule.p_start < 0.0 || agent.schedule.p_start > 1.0) {
        errors.push_back("schedule.p_start not in [0, 1]");
    }
    if (agent.schedule.p_end < 0.0 || agent.schedule.p_end > 1.0) {
        errors.push_back("schedule.p_end not in [0, 1]");
    }
    if (temperature_explicit && agent.schedule.temperature <= 0.0) {
        errors.push_back("schedule.temperature must be positive");
    }
    if (agent.replay_capacity == 0) errors.push_back("replay.capacity must be positive");
    if (agent.ec_capacity == 0) errors.push_back("ec.capacity must be positive");
    if (agent.ec_k == 0) errors.push_back("ec.k must be positive");
    if (total_steps == 0) errors.push_back("run.total_steps must be positive");
    if (eval_interval == 0) errors.push_back("run.eval_interval must be positive");
    if (total_steps < eval_interval) {
        errors.push_back("run.total_steps must be >= run.eval_interval");
    }
    if (eval_episodes == 0) errors.push_back("run.eval_episodes must be positive");
    if (seeds.empty()) errors.push_back("run.seeds must be non-empty");
    return errors;
}

ExperimentConfig experiment_config_from(const KeyValueConfig& kv) {
    ExperimentConfig config;
    if (const auto v = kv.get_string("env.name")) config.env_name = *v;
    if (const auto v = kv.get_string("env.file")) config.env_file = *v;

    if (const auto v = kv.get_string("agent.mode")) {
        const auto mode = parse_agent_mode(*v);
        if (!mode) {
            throw std::invalid_argument(kv.origin() +
                                        ": agent.mode must be two_memory, pure_ec or pure_rl");
        }
        config.agent.mode = *mode;
    }
    if (const auto v = kv.get_double("agent.epsilon")) config.agent.epsilon = *v;
    if (const auto v = kv.get_int("agent.train_every")) {
        config.agent.train_every = static_cast<std::uint32_t>(*v);
    }
    if (const auto v = kv.get_int("agent.batch_size")) {
        config.agent.batch_size = static_cast<std::uint32_t>(*v);
    }
    if (const auto v = kv.get_bool("agent.data_sharing")) config.agent.data_sharing = *v;

    if (const auto v = kv.get_double("schedule.p_start")) config.agent.schedule.p_start = *v;
    if (const auto v = kv.get_double("schedule.p_end")) config.agent.schedule.p_end = *v;
    if (const auto v = kv.get_double("schedule.temperature")) {
        config.agent.schedule.temperature = *v;
        config.temperature_explicit = true;
    }

    if (const auto v = kv.get_double("rl.alpha")) config.agent.alpha = *v;
    if (const auto v = kv.get_double("rl.gamma")) config.agent.gamma = *v;

    if (const auto v = kv.get_int("replay.capacity")) {
        config.agent.replay_capacity = static_cast<std::size_t>(*v);
    }
    if (const auto v = kv.get_int("ec.capacity")) {
        config.agent.ec_capacity = static_cast<std::size_t>(*v);
    }
    if (const auto v = kv.get_int("ec.k")) config.agent.ec_k = static_cast<std::size_t>(*v);
    if (const auto v = kv.get_string("ec.features")) {
        if (*v == "identity") {
            config.agent.ec_features = FeatureExtractor::Kind::identity;
        } else if (*v == "random_projection") {
            config.agent.ec_features = FeatureExtractor::Kind::random_projection;
        } else {
            throw std::invalid_argument(kv.origin() +
                                        ": ec.features must be identity or random_projection");
        }
    }
    if (const auto v = kv.get_int("ec.projection_dim")) {
        config.agent.ec_projection_dim = static_cast<std::size_t>(*v);
    }

    if (const auto v = kv.get_int("run.total_steps")) {
        config.total_steps = static_cast<std::uint64_t>(*v);
    }
    if (const auto v = kv.get_int("run.eval_interval")) {
        config.eval_interval = static_cast<std::uint32_t>(*v);
    }
    if (const auto v = kv.get_int("run.eval_episodes")) {
        config.eval_episodes = static_cast<std::uint32_t>(*v);
    }
    if (const auto v = kv.get_uint_list("run.seeds")) config.seeds = *v;
    if (const auto v = kv.get_string("run.output_dir")) config.output_dir = *v;
    if (const auto v = kv.get_string("run.label")) config.label = *v;

    const auto unknown = kv.unconsumed_keys();
    if (!unknown.empty()) {
        std::string message = kv.origin() + ": unknown keys:";
        for (const auto& key : unknown) message += " " + key;
        throw std::invalid_argument(message);
    }
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return experiment_config_from(KeyValueConfig::parse_file(path));
}

// ---------------------------------------------------------------------------
// RunMetrics CSV
// ---------------------------------------------------------------------------

std::string RunMetrics::csv_header() {
    return "global_step,record_kind,episode_return,memory_used,p_ec,q_sum_rl,ec_table_size,"
           "score_rl,score_ec";
}

std::vector<const MetricsRow*> RunMetrics::rows_of(RecordKind kind) const {
    std::vector<const MetricsRow*> selected;
    for (const auto& row : rows) {
        if (row.kind == kind) selected.push_back(&row);
    }
    return selected;
}

void RunMetrics::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ExperimentError("cannot write " + path.string());
    out << "# twomem-metrics v1\n";
    out << "# env=" << env_name << " label=" << label << " mode=" << to_string(mode)
        << " seed=" << seed << '\n';
    out << csv_header() << '\n';
    for (const auto& row : rows) {
        out << row.global_step << ',' << to_string(row.kind) << ',';
        if (row.episode_return) out << format_double(*row.episode_return);
        out << ',';
        if (row.memory_used) out << to_string(*row.memory_used);
        out << ',' << format_double(row.p_ec) << ',' << format_double(row.q_sum_rl) << ','
            << row.ec_table_size << ',';
        if (row.score_rl) out << format_double(*row.score_rl);
        out << ',';
        if (row.score_ec) out << format_double(*row.score_ec);
        out << '\n';
    }
}

RunMetrics RunMetrics::read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open metrics file: " + path.string());

    RunMetrics metrics;
    const std::string context = path.string();
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string token;
            while (meta >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = token.substr(0, eq);
                const std::string value = token.substr(eq + 1);
                if (key == "env") metrics.env_name = value;
                else if (key == "label") metrics.label = value;
                else if (key == "seed") metrics.seed = parse_uint(value, context);
                else if (key == "mode") {
                    const auto mode = parse_agent_mode(value);
                    if (!mode) throw std::invalid_argument(context + ": bad mode " + value);
                    metrics.mode = *mode;
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line != csv_header()) {
                throw std::invalid_argument(context + ": unexpected CSV header");
            }
            header_seen = true;
            continue;
        }

        std::array<std::string, 9> fields;
        std::size_t field = 0;
        std::string current;
        for (char c : line) {
            if (c == ',') {
                if (field >= fields.size()) {
                    throw std::invalid_argument(context + ": too many fields");
                }
                fields[field++] = current;
                current.clear();
            } else {
                current += c;
            }
        }
        if (field != fields.size() - 1) {
            throw std::invalid_argument(context + ": wrong field count");
        }
        fields[field] = current;

        MetricsRow row;
        row.global_step = parse_uint(fields[0], context);
        if (fields[1] == "train") row.kind = RecordKind::train;
        else if (fields[1] == "eval") row.kind = RecordKind::eval;
        else if (fields[1] == "state") row.kind = RecordKind::state;
        else throw std::invalid_argument(context + ": bad record kind " + fields[1]);
        if (!fields[2].empty()) row.episode_return = parse_double(fields[2], context);
        if (!fields[3].empty()) {
            if (fields[3] == "ec") row.memory_used = MemoryKind::EC;
            else if (fields[3] == "rl") row.memory_used = MemoryKind::RL;
            else throw std::invalid_argument(context + ": bad memory " + fields[3]);
        }
        row.p_ec = parse_double(fields[4], context);
        row.q_sum_rl = parse_double(fields[5], context);
        row.ec_table_size = parse_uint(fields[6], context);
        if (!fields[7].empty()) row.score_rl = parse_double(fields[7], context);
        if (!fields[8].empty()) row.score_ec = parse_double(fields[8], context);
        metrics.rows.push_back(row);
    }
    if (!header_seen) throw std::invalid_argument(context + ": not a metrics CSV");
    return metrics;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

namespace {

ExperimentConfig resolved(const ExperimentConfig& config) {
    ExperimentConfig r = config;
    if (!r.temperature_explicit) {
        r.agent.schedule.temperature = static_cast<double>(r.total_steps) / 5.0;
    }
    return r;
}

} // namespace

RunMetrics run_single(const ExperimentConfig& raw_config, std::uint64_t seed) {
    const ExperimentConfig config = resolved(raw_config);
    {
        const auto errors = config.validate();
        if (!errors.empty()) {
            std::string message = "invalid experiment config:";
            for (const auto& e : errors) message += "\n  " + e;
            throw std::invalid_argument(message);
        }
    }

    const auto env = make_env(config.env_name, config.env_file);
    const auto eval_env = make_env(config.env_name, config.env_file);
    AgentConfig agent_config = config.agent;
    agent_config.seed = seed;
    TwoMemoryAgent agent(env->spec(), agent_config);

    RunMetrics metrics;
    metrics.env_name = config.env_name;
    metrics.label = config.resolved_label();
    metrics.mode = config.agent.mode;
    metrics.seed = seed;

    const auto state_of = [&](std::uint64_t step) {
        MetricsRow row;
        row.global_step = step;
        row.kind = RecordKind::state;
        row.p_ec = config.agent.schedule.ec_probability(step);
        row.q_sum_rl = agent.rl().q_sum(*env);
        row.ec_table_size = agent.ec().size();
        row.score_rl = agent.tracker().score(MemoryKind::RL);
        row.score_ec = agent.tracker().score(MemoryKind::EC);
        return row;
    };

    std::uint64_t next_checkpoint = config.eval_interval;
    std::uint64_t current_step = 0;
    try {
        while (true) {
            const double p_ec_at_start = agent.ec_probability_now();
            const EpisodeOutcome outcome = agent.run_training_episode(*env);
            current_step = agent.global_step();

            MetricsRow train_row = state_of(current_step);
            train_row.kind = RecordKind::train;
            train_row.p_ec = p_ec_at_start;
            train_row.episode_return = outcome.episode_return;
            train_row.memory_used = outcome.memory_used;
            metrics.rows.push_back(train_row);

            while (next_checkpoint <= agent.global_step() && next_checkpoint <= config.total_steps) {
                agent.reseed_eval(Rng::derive_seed(seed, 1000000 + next_checkpoint));
                double total = 0.0;
                MemoryKind used = MemoryKind::EC;
                for (std::uint32_t e = 0; e < config.eval_episodes; ++e) {
                    const EvalOutcome eval = agent.run_eval_episode(*eval_env);
                    total += eval.eval_return;
                    used = eval.memory_used;
                }
                MetricsRow eval_row = state_of(next_checkpoint);
                eval_row.kind = RecordKind::eval;
                eval_row.episode_return = total / config.eval_episodes;
                eval_row.memory_used = used;
                metrics.rows.push_back(eval_row);
                metrics.rows.push_back(state_of(next_checkpoint));
                next_checkpoint += config.eval_interval;
            }
            if (agent.global_step() >= config.total_steps) break;
        }
    } catch (const std::exception& e) {
        throw ExperimentError("seed " + std::to_string(seed) + " step " +
                              std::to_string(current_step) + ": " + e.what());
    }
    return metrics;
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config,
                                                  std::ostream* log) {
    {
        const auto errors = resolved(config).validate();
        if (!errors.empty()) {
            std::string message = "invalid experiment config:";
            for (const auto& e : errors) message += "\n  " + e;
            throw std::invalid_argument(message);
        }
    }
    std::filesystem::create_directories(config.output_dir);

    std::vector<std::filesystem::path> paths;
    std::vector<std::string> failures;
    for (const std::uint64_t seed : config.seeds) {
        try {
            const RunMetrics metrics = run_single(config, seed);
            const auto path = config.output_dir /
                              (sanitize(config.resolved_label()) + "_seed" +
                               std::to_string(seed) + ".csv");
            metrics.write_csv(path);
            paths.push_back(path);
            if (log) {
                *log << "run " << config.resolved_label() << " seed " << seed << " -> "
                     << path.string() << '\n';
            }
        } catch (const ExperimentError& e) {
            failures.emplace_back(e.what());
        }
    }
    if (!failures.empty()) {
        std::string message = "experiment failures:";
        for (const auto& f : failures) message += "\n  " + f;
        throw ExperimentError(message);
    }
    return paths;
}

// ---------------------------------------------------------------------------
// summaries and reports
// ---------------------------------------------------------------------------

SweepSummary summarize(const std::vector<RunMetrics>& runs) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const RunMetrics*>> grouped;
    for (const auto& run : runs) {
        if (!grouped.count(run.label)) order.push_back(run.label);
        grouped[run.label].push_back(&run);
    }

    SweepSummary summary;
    for (const auto& label : order) {
        const auto& group = grouped[label];
        const auto reference = group.front()->rows_of(RecordKind::eval);

        SweepSummary::Curve curve;
        curve.label = label;
        for (std::size_t i = 0; i < reference.size(); ++i) {
            const std::uint64_t step = reference[i]->global_step;
            std::vector<double> returns, q_sums;
            for (const RunMetrics* run : group) {
                const auto evals = run->rows_of(RecordKind::eval);
                const auto states = run->rows_of(RecordKind::state);
                if (i >= evals.size() || evals[i]->global_step != step) {
                    throw std::invalid_argument("metrics for label '" + label +
                                                "' do not share a checkpoint grid");
                }
                returns.push_back(evals[i]->episode_return.value_or(0.0));
                if (i < states.size() && states[i]->global_step == step) {
                    q_sums.push_back(states[i]->q_sum_rl);
                }
            }
            const auto mean = [](const std::vector<double>& v) {
                double total = 0.0;
                for (double x : v) total += x;
                return v.empty() ? 0.0 : total / static_cast<double>(v.size());
            };
            const auto stddev = [&](const std::vector<double>& v, double m) {
                if (v.size() < 2) return 0.0;
                double total = 0.0;
                for (double x : v) total += (x - m) * (x - m);
                return std::sqrt(total / static_cast<double>(v.size()));
            };
            SweepSummary::Point point;
            point.global_step = step;
            point.mean_return = mean(returns);
            point.std_return = stddev(returns, point.mean_return);
            point.mean_q_sum = mean(q_sums);
            point.std_q_sum = stddev(q_sums, point.mean_q_sum);
            point.runs = returns.size();
            curve.points.push_back(point);
        }
        summary.curves.push_back(std::move(curve));
    }
    return summary;
}

void SweepSummary::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ExperimentError("cannot write " + path.string());
    out << "label,global_step,mean_return,std_return,mean_q_sum,std_q_sum,runs\n";
    for (const auto& curve : curves) {
        for (const auto& point : curve.points) {
            out << curve.label << ',' << point.global_step << ','
                << format_double(point.mean_return) << ',' << format_double(point.std_return)
                << ',' << format_double(point.mean_q_sum) << ',' << format_double(point.std_q_sum)
                << ',' << point.runs << '\n';
        }
    }
}

namespace {

const char* curve_color(const std::string& label, std::size_t index) {
    if (label == "two_memory" || label.rfind("2m_ds", 0) == 0) return "#0072B2"; // blue
    if (label == "pure_ec") return "#E69F00";                                    // orange
    if (label == "pure_rl") return "#8C8C8C";                                    // grey
    static const std::array<const char*, 6> palette = {"#0072B2", "#E69F00", "#8C8C8C",
                                                       "#009E73", "#CC79A7", "#D55E00"};
    return palette[index % palette.size()];
}

} // namespace

SweepSummary write_report(const std::vector<std::filesystem::path>& metrics_paths,
                          const std::filesystem::path& out_dir) {
    if (metrics_paths.empty()) {
        throw std::invalid_argument("report: no metrics files given");
    }
    std::vector<RunMetrics> runs;
    runs.reserve(metrics_paths.size());
    for (const auto& path : metrics_paths) runs.push_back(RunMetrics::read_csv(path));

    // all runs within a label must share the same eval checkpoint grid
    std::map<std::string, std::vector<std::uint64_t>> grids;
    std::map<std::string, std::filesystem::path> first_of_label;
    std::vector<std::string> offenders;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::vector<std::uint64_t> grid;
        for (const auto* row : runs[i].rows_of(RecordKind::eval)) grid.push_back(row->global_step);
        const auto [it, inserted] = grids.emplace(runs[i].label, grid);
        if (inserted) {
            first_of_label[runs[i].label] = metrics_paths[i];
        } else if (it->second != grid) {
            offenders.push_back(metrics_paths[i].string() + " (vs " +
                                first_of_label[runs[i].label].string() + ")");
        }
    }
    if (!offenders.empty()) {
        std::string message = "report: mismatched checkpoint grids:";
        for (const auto& o : offenders) message += "\n  " + o;
        throw std::invalid_argument(message);
    }

    const SweepSummary summary = summarize(runs);
    std::filesystem::create_directories(out_dir);
    summary.write_csv(out_dir / "aggregate.csv");

    SvgPlot returns_plot("Evaluation return", "environment steps", "mean return");
    SvgPlot q_sum_plot("Q-value sum over the state-action space", "environment steps", "q sum");
    std::size_t color_index = 0;
    for (const auto& curve : summary.curves) {
        std::vector<double> xs, ys, lo, hi, qs;
        for (const auto& point : curve.points) {
            xs.push_back(static_cast<double>(point.global_step));
            ys.push_back(point.mean_return);
            lo.push_back(point.mean_return - point.std_return);
            hi.push_back(point.mean_return + point.std_return);
            qs.push_back(point.mean_q_sum);
        }
        const char* color = curve_color(curve.label, color_index++);
        returns_plot.add_band(xs, lo, hi, color);
        returns_plot.add_line(xs, ys, color, curve.label);
        q_sum_plot.add_line(xs, qs, color, curve.label);
    }
    returns_plot.write((out_dir / "eval_returns.svg").string());
    q_sum_plot.write((out_dir / "q_sum.svg").string());

    SvgBandStrip bands("Memory used at evaluation", "environment steps");
    for (const auto& run : runs) {
        std::vector<double> xs;
        std::vector<std::string> colors;
        for (const auto* row : run.rows_of(RecordKind::eval)) {
            xs.push_back(static_cast<double>(row->global_step));
            colors.push_back(row->memory_used == MemoryKind::EC ? "#E69F00" : "#8C8C8C");
        }
        bands.add_row(run.label + " seed " + std::to_string(run.seed), xs, colors);
    }
    bands.write((out_dir / "memory_bands.svg").string());
    return summary;
}

// ---------------------------------------------------------------------------
// ablation suite
// ---------------------------------------------------------------------------

std::vector<AblationVariant> ablation_variants(const ExperimentConfig& base) {
    const double tau = resolved(base).agent.schedule.temperature;
    const Schedule decayed{0.9, 0.1, tau};
    const Schedule constant{0.1, 0.1, tau};
    const Schedule increased{0.1, 0.9, tau};

    std::vector<AblationVariant> variants;
    for (const bool sharing : {true, false}) {
        const std::string prefix = sharing ? "2m_ds_" : "2m_nods_";
        for (const auto& [name, schedule] :
             {std::pair{"decayed", decayed}, {"constant", constant}, {"increased", increased}}) {
            variants.push_back(AblationVariant{prefix + name, AgentMode::two_memory, schedule,
                                               sharing});
        }
    }
    variants.push_back(AblationVariant{"pure_ec", AgentMode::pure_ec, decayed, true});
    variants.push_back(AblationVariant{"pure_rl", AgentMode::pure_rl, decayed, true});
    return variants;
}

SweepSummary ablation_suite(const ExperimentConfig& base, std::ostream* log) {
    std::vector<RunMetrics> all_runs;
    for (const AblationVariant& variant : ablation_variants(base)) {
        ExperimentConfig config = resolved(base);
        config.label = variant.label;
        config.agent.mode = variant.mode;
        config.agent.schedule = variant.schedule;
        config.agent.data_sharing = variant.data_sharing;
        config.temperature_explicit = true;

        std::filesystem::create_directories(config.output_dir);
        for (const std::uint64_t seed : config.seeds) {
            RunMetrics metrics = run_single(config, seed);
            const auto path = config.output_dir / (sanitize(variant.label) + "_seed" +
                                                   std::to_string(seed) + ".csv");
            metrics.write_csv(path);
            if (log) {
                *log << "ablate " << variant.label << " seed " << seed << " -> " << path.string()
                     << '\n';
            }
            all_runs.push_back(std::move(metrics));
        }
    }
    const SweepSummary summary = summarize(all_runs);
    summary.write_csv(std::filesystem::path(base.output_dir) / "ablation_summary.csv");
    return summary;
}

} // namespace twomem
