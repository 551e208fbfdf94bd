#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace aldc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense class identifier. Base classes occupy 0..B-1, novel classes follow
/// in session order.
using ClassId = int;

/// Identity of one drawn sample instance, used for leakage bookkeeping.
using SampleId = std::uint64_t;

/// Marks features that were sampled from a calibrated distribution rather
/// than drawn from the benchmark.
inline constexpr SampleId kSyntheticSample = std::numeric_limits<SampleId>::max();

struct LabeledFeature {
    Vector vector;
    ClassId class_id = 0;
    SampleId sample_id = kSyntheticSample;
};

/// An unlabeled pool entry. The true class never travels with it; the
/// benchmark keeps hidden labels in a parallel list.
struct UnlabeledSample {
    Vector vector;
    SampleId sample_id = kSyntheticSample;
};

struct ClassSet {
    int session_index = 0;
    std::vector<ClassId> class_ids;
};

enum class Strategy { kBaseline, kDrop, kStatic, kDynamic };

inline constexpr Strategy kAllStrategies[] = {Strategy::kBaseline, Strategy::kDrop,
                                              Strategy::kStatic, Strategy::kDynamic};

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view text);

/// Thrown when an experiment configuration breaks one of its invariants.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown for malformed or inconsistent data files and datasets.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    int dim = 64;
    int base_class_count = 20;
    int ways = 5;
    int shots = 5;
    int session_count = 4;
    int unlabeled_count = 50;
    /// Fraction of each unlabeled pool drawn from base classes.
    double base_to_novel_ratio = 0.5;
    /// Smoothing coefficient added to the mean score gap (config key `m`).
    double smoothing = 0.2;
    /// Dispersion constant added elementwise to calibrated covariances.
    double alpha = 0.2;
    /// Number of base distributions blended into each novel calibration.
    int k_base = 1;
    /// Features generated per novel class; empty means unlabeled_count / ways.
    std::optional<int> generated_per_class;
    Strategy strategy = Strategy::kDynamic;
    double static_threshold = 0.1;
    std::uint64_t seed = 1;
    int test_per_class = 100;

    // Synthetic benchmark shape.
    int base_samples_per_class = 200;
    /// Total novel classes available; empty means ways * session_count.
    std::optional<int> novel_class_count;
    double separation_radius = 5.0;
    double class_variance = 1.0;
    double novel_mixing = 0.6;

    // Update policy.
    bool update_base_weights = true;
    bool retain_base_evidence = true;
    bool include_ambiguous_in_stats = false;

    int resolved_generated_per_class() const;
    int resolved_novel_class_count() const;
    int total_class_count() const { return base_class_count + resolved_novel_class_count(); }

    bool operator==(const ExperimentConfig&) const = default;
};

/// Checks every config invariant and returns the config unchanged.
/// Throws ConfigError naming the first violated field.
const ExperimentConfig& validate_config(const ExperimentConfig& config);

/// Throws DataError unless every component of `v` is finite.
void require_finite(const Vector& v, std::string_view what);

}  // namespace aldc
