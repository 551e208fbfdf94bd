#pragma once

#include <optional>
#include <vector>

#include "aldc/core.hpp"

namespace aldc::datagen {

/// True distribution of one synthetic class.
struct ClassGenerator {
    ClassId class_id = 0;
    Vector true_mean;
    Matrix true_covariance;
    /// Set for novel classes only.
    std::optional<ClassId> parent_base_id;
    double mixing = 0.0;
    /// Fresh direction mixed with the parent mean; empty for base classes.
    Vector fresh_direction;
};

struct GeneratorSet {
    std::vector<ClassGenerator> classes;
    /// Smallest Euclidean distance between two base class means (0 when
    /// there is a single base class).
    double min_base_separation = 0.0;
};

struct SessionData {
    int session_index = 0;
    ClassSet new_classes;
    /// Full base training set at t = 0, the N*K shots afterwards.
    std::vector<LabeledFeature> labeled;
    std::vector<UnlabeledSample> unlabeled;
    /// True class of unlabeled[i]. Diagnostics only.
    std::vector<ClassId> hidden_labels;
    /// All classes seen through this session, test_per_class each.
    std::vector<LabeledFeature> test;
};

struct Benchmark {
    GeneratorSet generators;
    std::vector<SessionData> sessions;
};

/// (1 - mixing) * fresh + mixing * parent.
Vector mix_novel_mean(const Vector& fresh, const Vector& parent_mean, double mixing);

/// Base means are random unit directions scaled by the separation radius;
/// novel class j is mixed with base class j mod B.
GeneratorSet make_class_generators(const ExperimentConfig& config);

/// Builds sessions 0..T. Deterministic in config.seed; each split draws from
/// its own derived stream, so changing the pool size leaves shots and test
/// sets untouched.
Benchmark generate_benchmark(const ExperimentConfig& config);

/// Number of base-class hidden labels in a pool of `pool_size` (rounded
/// toward base).
int base_share(double ratio, int pool_size);

}  // namespace aldc::datagen
