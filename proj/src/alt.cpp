#include "aldc/alt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aldc::alt {

namespace {

struct BlockBest {
    double score;
    ClassId arg;
};

// ids ascending; strict > keeps the lowest id on ties.
BlockBest best_in_block(const Eigen::VectorXd& scores, const std::vector<ClassId>& ids) {
    BlockBest best{-std::numeric_limits<double>::infinity(), ids.front()};
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        if (scores[i] > best.score) best = {scores[i], ids[static_cast<std::size_t>(i)]};
    }
    best.score = std::clamp(best.score, -1.0, 1.0);
    return best;
}

}  // namespace

double SampleScore::gap() const { return std::abs(s_base - s_novel); }

SimilarityScores score_unlabeled(std::span<const Vector> features,
                                 const classifier::ClassifierWeights& weights) {
    const std::vector<ClassId>& base_ids = weights.base_ids().class_ids;
    const std::vector<ClassId> novel_ids = weights.novel_ids();
    if (base_ids.empty()) throw DataError("no base weights to score against");
    if (novel_ids.empty()) throw DataError("no novel weights to score against");
    const Matrix base_w = weights.stacked(base_ids);
    const Matrix novel_w = weights.stacked(novel_ids);

    SimilarityScores out;
    out.reserve(features.size());
    for (const auto& f : features) {
        if (f.size() != weights.dim()) throw DataError("feature dimension mismatch");
        const double n = f.norm();
        if (!(n > 0.0)) throw DataError("zero-norm feature");
        const Vector unit = f / n;
        const BlockBest b = best_in_block(base_w * unit, base_ids);
        const BlockBest v = best_in_block(novel_w * unit, novel_ids);
        out.push_back({b.score, b.arg, v.score, v.arg});
    }
    return out;
}

Threshold compute_threshold(std::span<const SampleScore> scores, double smoothing) {
    if (scores.empty()) throw DataError("cannot compute a threshold from no scores");
    double sum = 0.0;
    for (const auto& s : scores) sum += s.gap();
    return {sum / static_cast<double>(scores.size()) + smoothing, smoothing, scores.size()};
}

Threshold fixed_threshold(double tau) { return {tau, 0.0, 0}; }

Partition partition(std::span<const SampleScore> scores, const Threshold& threshold) {
    if (!std::isfinite(threshold.tau)) throw std::invalid_argument("threshold must be finite");
    Partition p;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const SampleScore& s = scores[i];
        if (s.gap() > threshold.tau) {
            p.confident.push_back({i, s.s_base >= s.s_novel ? s.base_arg : s.novel_arg});
        } else {
            p.ambiguous.push_back({i, s.base_arg, s.novel_arg});
        }
    }
    return p;
}

}  // namespace aldc::alt
