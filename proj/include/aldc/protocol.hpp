#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aldc/alt.hpp"
#include "aldc/b2n.hpp"
#include "aldc/classifier.hpp"
#include "aldc/datagen.hpp"

namespace aldc::protocol {

struct SessionState {
    classifier::ClassifierWeights weights;
    /// Computed in the base session and never touched afterwards.
    std::map<ClassId, b2n::ClassStatistics> base_stats;
    alt::Threshold threshold;
    int session_index = 0;
};

struct SessionMetrics {
    int session_index = 0;
    double acc_all = 0.0;
    std::optional<double> acc_base;
    std::optional<double> acc_novel;
    /// Fraction of confident pseudo-labels matching the hidden truth; empty
    /// when nothing was pseudo-labelled.
    std::optional<double> pseudo_precision;
    std::size_t n_confident = 0;
    std::size_t n_ambiguous = 0;
    std::size_t n_generated = 0;
    /// Threshold used for partitioning; empty in the base session.
    std::optional<double> tau_used;

    bool operator==(const SessionMetrics&) const = default;
};

struct RunReport {
    std::string label;
    ExperimentConfig config;
    std::vector<SessionMetrics> sessions;
    double avg_all = 0.0;
};

struct SessionOutcome {
    SessionState state;
    SessionMetrics metrics;
    /// Benchmark sample ids that entered the weight update (shots and
    /// pseudo-labelled pool samples). Generated features carry no id.
    std::vector<SampleId> update_ids;
};

/// Trains base prototypes and stores per-class base statistics.
SessionState run_base_session(const ExperimentConfig& config, const datagen::SessionData& session0);

SessionMetrics base_session_metrics(const SessionState& state, const datagen::SessionData& session0);

/// One incremental session: novel weights from shots, dual-branch scoring,
/// strategy-specific threshold and partition, pseudo-labelling, base-to-novel
/// calibration and generation, weight update, evaluation.
SessionOutcome run_incremental_session(const ExperimentConfig& config, const SessionState& state,
                                       const datagen::SessionData& session, Strategy strategy);

RunReport run_on_benchmark(const ExperimentConfig& config, const datagen::Benchmark& bench,
                           Strategy strategy);

RunReport run_experiment(const ExperimentConfig& config);

/// All four strategies on one shared benchmark.
std::map<Strategy, RunReport> run_ablation(const ExperimentConfig& config);
std::map<Strategy, RunReport> run_ablation(const ExperimentConfig& config, const datagen::Benchmark& bench);

enum class SweepParam { kUnlabeledCount, kRatio, kSmoothing, kAlpha };

std::string_view to_string(SweepParam param);
/// Accepts the config key (`unlabeled_count`, `base_to_novel_ratio`, `m`,
/// `alpha`) or the short forms `M` and `ratio`.
SweepParam parse_sweep_param(std::string_view name);

struct SweepAxis {
    SweepParam param;
    std::vector<double> values;
};

ExperimentConfig apply_sweep_value(ExperimentConfig config, SweepParam param, double value);

/// One report per point of the Cartesian product of the axes. The benchmark
/// is regenerated per point from the same master seed.
std::vector<RunReport> sweep(const ExperimentConfig& config, std::span<const SweepAxis> grid);

double average_accuracy(std::span<const SessionMetrics> sessions);

}  // namespace aldc::protocol
