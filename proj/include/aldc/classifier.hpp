#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "aldc/core.hpp"

namespace aldc::classifier {

/// Evidence a class retains between sessions: the mean of `count` features
/// it was built from. Refreshing the class blends it with the new samples.
struct PrototypeEvidence {
    Vector mean;
    std::size_t count = 0;
};

/// Unit-norm class prototypes over every class seen so far, split into the
/// base block and one block per incremental session.
class ClassifierWeights {
public:
    ClassifierWeights() = default;

    std::size_t size() const { return weights_.size(); }
    bool contains(ClassId c) const { return weights_.count(c) != 0; }
    const Vector& weight(ClassId c) const;
    int dim() const;

    const std::map<ClassId, Vector>& all() const { return weights_; }
    const ClassSet& base_ids() const { return base_; }
    const std::vector<ClassSet>& novel_ids_by_session() const { return novel_; }
    bool is_base(ClassId c) const;
    std::vector<ClassId> novel_ids() const;

    /// Rows are the L2-normalized weights of `ids`, in that order.
    Matrix stacked(std::span<const ClassId> ids) const;

private:
    friend ClassifierWeights init_base_weights(std::span<const LabeledFeature>);
    friend ClassifierWeights init_novel_weights(const ClassifierWeights&,
                                                std::span<const LabeledFeature>);
    friend ClassifierWeights update_weights(const ClassifierWeights&,
                                            std::span<const LabeledFeature>,
                                            const std::map<ClassId, PrototypeEvidence>&);

    std::map<ClassId, Vector> weights_;
    ClassSet base_;
    std::vector<ClassSet> novel_;
};

struct Prediction {
    ClassId class_id = 0;
    double score = 0.0;
};

struct EvaluationResult {
    /// Percentages; base/novel are empty when the test set has no such class.
    double acc_all = 0.0;
    std::optional<double> acc_base;
    std::optional<double> acc_novel;
    std::size_t n_all = 0;
    std::size_t n_base = 0;
    std::size_t n_novel = 0;
    std::size_t correct_all = 0;
    std::size_t correct_base = 0;
    std::size_t correct_novel = 0;
};

/// w_c = normalize(mean of class-c features) for every class present.
ClassifierWeights init_base_weights(std::span<const LabeledFeature> base_samples);

/// Adds one normalized class-mean weight per class in `shots` as a new
/// session block. Existing weights are copied untouched.
ClassifierWeights init_novel_weights(const ClassifierWeights& weights,
                                     std::span<const LabeledFeature> shots);

/// Cosine argmax over all seen classes; ties go to the lowest class id.
Prediction classify(const Vector& feature, const ClassifierWeights& weights);
std::vector<Prediction> classify(std::span<const Vector> features, const ClassifierWeights& weights);

/// Re-estimates w_c = normalize(mean of class-c augmented samples) for every
/// class that has at least one augmented sample; other classes keep their
/// weights.
ClassifierWeights update_weights(const ClassifierWeights& weights,
                                 std::span<const LabeledFeature> augmented);

/// As above, but a class listed in `retained` is re-estimated over its
/// retained evidence together with its augmented samples (count-weighted).
ClassifierWeights update_weights(const ClassifierWeights& weights,
                                 std::span<const LabeledFeature> augmented,
                                 const std::map<ClassId, PrototypeEvidence>& retained);

EvaluationResult evaluate(std::span<const LabeledFeature> test, const ClassifierWeights& weights);

}  // namespace aldc::classifier
