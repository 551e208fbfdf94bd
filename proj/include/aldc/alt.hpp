#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aldc/classifier.hpp"

namespace aldc::alt {

/// Best base and best novel cosine for one unlabeled sample.
struct SampleScore {
    double s_base = 0.0;
    ClassId base_arg = 0;
    double s_novel = 0.0;
    ClassId novel_arg = 0;

    double gap() const;
};

using SimilarityScores = std::vector<SampleScore>;

struct Threshold {
    double tau = 0.0;
    double smoothing = 0.0;
    /// Samples whose gaps went into the mean; 0 for a fixed threshold.
    std::size_t n_scored = 0;
};

struct ConfidentSample {
    std::size_t index = 0;
    ClassId pseudo_label = 0;
};

struct AmbiguousSample {
    std::size_t index = 0;
    ClassId base_arg = 0;
    ClassId novel_arg = 0;
};

struct Partition {
    std::vector<ConfidentSample> confident;
    std::vector<AmbiguousSample> ambiguous;
};

/// Scores every feature against the base block and the novel block
/// separately. Requires at least one weight in each block.
SimilarityScores score_unlabeled(std::span<const Vector> features,
                                 const classifier::ClassifierWeights& weights);

/// tau = mean(|s_base - s_novel|) + smoothing.
Threshold compute_threshold(std::span<const SampleScore> scores, double smoothing);

Threshold fixed_threshold(double tau);

/// Confident iff gap > tau, pseudo-labelled with the arg of the larger
/// branch (base on ties); ambiguous otherwise.
Partition partition(std::span<const SampleScore> scores, const Threshold& threshold);

}  // namespace aldc::alt
