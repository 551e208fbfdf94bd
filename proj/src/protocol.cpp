#include "aldc/protocol.hpp"

#include <cmath>
#include <future>
#include <string>

#include "aldc/random.hpp"

namespace aldc::protocol {

namespace {

constexpr std::uint64_t kCalibrationStream = 101;

std::map<ClassId, classifier::PrototypeEvidence> base_evidence(const SessionState& state) {
    std::map<ClassId, classifier::PrototypeEvidence> out;
    for (const auto& [c, s] : state.base_stats) out[c] = {s.mean, s.count};
    return out;
}

bool uses_calibration(Strategy s) { return s == Strategy::kStatic || s == Strategy::kDynamic; }

std::string format_label_value(double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace

double average_accuracy(std::span<const SessionMetrics> sessions) {
    if (sessions.empty()) throw std::invalid_argument("average over no sessions");
    double sum = 0.0;
    for (const auto& m : sessions) sum += m.acc_all;
    return sum / static_cast<double>(sessions.size());
}

SessionState run_base_session(const ExperimentConfig& config, const datagen::SessionData& session0) {
    std::map<ClassId, std::vector<Vector>> by_class;
    for (const auto& f : session0.labeled) by_class[f.class_id].push_back(f.vector);
    for (ClassId c = 0; c < config.base_class_count; ++c) {
        if (by_class.count(c) == 0) {
            throw DataError("base session has no samples for class " + std::to_string(c));
        }
    }
    if (static_cast<int>(by_class.size()) != config.base_class_count) {
        throw DataError("base session contains classes outside the base set");
    }

    SessionState state;
    state.weights = classifier::init_base_weights(session0.labeled);
    for (const auto& [c, xs] : by_class) state.base_stats.emplace(c, b2n::class_statistics(xs, c));
    state.threshold = alt::fixed_threshold(config.static_threshold);
    state.session_index = 0;
    return state;
}

SessionMetrics base_session_metrics(const SessionState& state, const datagen::SessionData& session0) {
    const auto eval = classifier::evaluate(session0.test, state.weights);
    SessionMetrics m;
    m.session_index = 0;
    m.acc_all = eval.acc_all;
    m.acc_base = eval.acc_base;
    m.acc_novel = eval.acc_novel;
    return m;
}

SessionOutcome run_incremental_session(const ExperimentConfig& config, const SessionState& state,
                                       const datagen::SessionData& session, Strategy strategy) {
    if (session.session_index != state.session_index + 1) {
        throw DataError("session " + std::to_string(session.session_index) + " does not follow session " +
                        std::to_string(state.session_index));
    }
    if (session.hidden_labels.size() != session.unlabeled.size()) {
        throw DataError("hidden label count does not match the unlabeled pool");
    }

    SessionOutcome out;
    SessionMetrics& metrics = out.metrics;
    metrics.session_index = session.session_index;

    classifier::ClassifierWeights weights = classifier::init_novel_weights(state.weights, session.labeled);

    std::vector<LabeledFeature> augmented(session.labeled.begin(), session.labeled.end());
    for (const auto& f : session.labeled) out.update_ids.push_back(f.sample_id);

    std::vector<Vector> pool;
    pool.reserve(session.unlabeled.size());
    for (const auto& u : session.unlabeled) pool.push_back(u.vector);

    alt::Threshold threshold = state.threshold;
    alt::Partition part;
    if (!pool.empty()) {
        const alt::SimilarityScores scores = alt::score_unlabeled(pool, weights);
        switch (strategy) {
            case Strategy::kBaseline: threshold = alt::fixed_threshold(-1.0); break;
            case Strategy::kStatic: threshold = alt::fixed_threshold(config.static_threshold); break;
            case Strategy::kDrop:
            case Strategy::kDynamic: threshold = alt::compute_threshold(scores, config.smoothing); break;
        }
        part = alt::partition(scores, threshold);
        metrics.tau_used = threshold.tau;
    }
    metrics.n_confident = part.confident.size();
    metrics.n_ambiguous = part.ambiguous.size();

    std::size_t correct = 0;
    for (const auto& c : part.confident) {
        correct += session.hidden_labels[c.index] == c.pseudo_label;
        if (!config.update_base_weights && weights.is_base(c.pseudo_label)) continue;
        const UnlabeledSample& u = session.unlabeled[c.index];
        augmented.push_back({u.vector, c.pseudo_label, u.sample_id});
        out.update_ids.push_back(u.sample_id);
    }
    if (!part.confident.empty()) {
        metrics.pseudo_precision = static_cast<double>(correct) / static_cast<double>(part.confident.size());
    }

    if (uses_calibration(strategy)) {
        const int n_generated = config.resolved_generated_per_class();
        std::map<ClassId, std::vector<Vector>> shots_by_class;
        for (const auto& f : session.labeled) shots_by_class[f.class_id].push_back(f.vector);
        if (config.include_ambiguous_in_stats) {
            for (const auto& a : part.ambiguous) {
                if (auto it = shots_by_class.find(a.novel_arg); it != shots_by_class.end()) {
                    it->second.push_back(pool[a.index]);
                }
            }
        }
        for (const auto& [c, xs] : shots_by_class) {
            const b2n::ClassStatistics novel_stats = b2n::class_statistics(xs, c);
            const std::vector<ClassId> chosen =
                b2n::select_base_classes(c, part.ambiguous, state.base_stats, weights.weight(c), config.k_base);
            std::vector<b2n::ClassStatistics> chosen_stats;
            chosen_stats.reserve(chosen.size());
            for (ClassId b : chosen) chosen_stats.push_back(state.base_stats.at(b));
            const b2n::CalibratedDistribution dist = b2n::calibrate(novel_stats, chosen_stats, config.alpha);
            Rng rng = make_rng(config.seed, {kCalibrationStream, static_cast<std::uint64_t>(session.session_index),
                                             static_cast<std::uint64_t>(c)});
            for (auto& g : b2n::sample_features(dist, static_cast<std::size_t>(n_generated), rng)) {
                augmented.push_back({std::move(g), c, kSyntheticSample});
            }
            metrics.n_generated += static_cast<std::size_t>(n_generated);
        }
    }

    if (config.retain_base_evidence) {
        weights = classifier::update_weights(weights, augmented, base_evidence(state));
    } else {
        weights = classifier::update_weights(weights, augmented);
    }

    const auto eval = classifier::evaluate(session.test, weights);
    metrics.acc_all = eval.acc_all;
    metrics.acc_base = eval.acc_base;
    metrics.acc_novel = eval.acc_novel;

    out.state.weights = std::move(weights);
    out.state.base_stats = state.base_stats;
    out.state.threshold = threshold;
    out.state.session_index = session.session_index;
    return out;
}

RunReport run_on_benchmark(const ExperimentConfig& config, const datagen::Benchmark& bench, Strategy strategy) {
    if (bench.sessions.empty()) throw DataError("benchmark has no sessions");
    RunReport report;
    report.label = std::string(to_string(strategy));
    report.config = config;
    report.config.strategy = strategy;

    SessionState state = run_base_session(config, bench.sessions.front());
    report.sessions.push_back(base_session_metrics(state, bench.sessions.front()));
    for (std::size_t t = 1; t < bench.sessions.size(); ++t) {
        SessionOutcome next = run_incremental_session(config, state, bench.sessions[t], strategy);
        report.sessions.push_back(next.metrics);
        state = std::move(next.state);
    }
    report.avg_all = average_accuracy(report.sessions);
    return report;
}

RunReport run_experiment(const ExperimentConfig& config) {
    validate_config(config);
    return run_on_benchmark(config, datagen::generate_benchmark(config), config.strategy);
}

std::map<Strategy, RunReport> run_ablation(const ExperimentConfig& config, const datagen::Benchmark& bench) {
    std::vector<std::future<RunReport>> jobs;
    for (Strategy s : kAllStrategies) {
        jobs.push_back(std::async(std::launch::async, [&config, &bench, s] { return run_on_benchmark(config, bench, s); }));
    }
    std::map<Strategy, RunReport> out;
    for (std::size_t i = 0; i < jobs.size(); ++i) out.emplace(kAllStrategies[i], jobs[i].get());
    return out;
}

std::map<Strategy, RunReport> run_ablation(const ExperimentConfig& config) {
    validate_config(config);
    const datagen::Benchmark bench = datagen::generate_benchmark(config);
    return run_ablation(config, bench);
}

std::string_view to_string(SweepParam param) {
    switch (param) {
        case SweepParam::kUnlabeledCount: return "unlabeled_count";
        case SweepParam::kRatio: return "base_to_novel_ratio";
        case SweepParam::kSmoothing: return "m";
        case SweepParam::kAlpha: return "alpha";
    }
    return "unknown";
}

SweepParam parse_sweep_param(std::string_view name) {
    if (name == "unlabeled_count" || name == "M") return SweepParam::kUnlabeledCount;
    if (name == "base_to_novel_ratio" || name == "ratio") return SweepParam::kRatio;
    if (name == "m") return SweepParam::kSmoothing;
    if (name == "alpha") return SweepParam::kAlpha;
    throw ConfigError("unknown sweep parameter: " + std::string(name));
}

ExperimentConfig apply_sweep_value(ExperimentConfig config, SweepParam param, double value) {
    switch (param) {
        case SweepParam::kUnlabeledCount:
            if (!(value >= 0.0) || value != std::floor(value) || value > 1e9) {
                throw ConfigError("unlabeled_count sweep values must be non-negative integers");
            }
            config.unlabeled_count = static_cast<int>(value);
            break;
        case SweepParam::kRatio: config.base_to_novel_ratio = value; break;
        case SweepParam::kSmoothing: config.smoothing = value; break;
        case SweepParam::kAlpha: config.alpha = value; break;
    }
    validate_config(config);
    return config;
}

std::vector<RunReport> sweep(const ExperimentConfig& config, std::span<const SweepAxis> grid) {
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    for (const auto& axis : grid) {
        if (axis.values.empty()) throw ConfigError("sweep axis " + std::string(to_string(axis.param)) + " has no values");
    }

    struct Point {
        ExperimentConfig config;
        std::string label;
    };
    std::vector<Point> points{{config, ""}};
    for (const auto& axis : grid) {
        std::vector<Point> next;
        for (const auto& p : points) {
            for (double v : axis.values) {
                std::string label = p.label.empty() ? "" : p.label + ";";
                label += std::string(to_string(axis.param)) + "=" + format_label_value(v);
                next.push_back({apply_sweep_value(p.config, axis.param, v), std::move(label)});
            }
        }
        points = std::move(next);
    }

    std::vector<std::future<RunReport>> jobs;
    jobs.reserve(points.size());
    for (const auto& p : points) {
        jobs.push_back(std::async(std::launch::async, [&p] {
            RunReport r = run_experiment(p.config);
            r.label = p.label;
            return r;
        }));
    }
    std::vector<RunReport> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

}  // namespace aldc::protocol
