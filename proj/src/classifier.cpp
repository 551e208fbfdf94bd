#include "aldc/classifier.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace aldc::classifier {

namespace {

struct ClassSum {
    Vector sum;
    std::size_t count = 0;
};

std::map<ClassId, ClassSum> sum_by_class(std::span<const LabeledFeature> samples) {
    std::map<ClassId, ClassSum> sums;
    int dim = -1;
    for (const auto& s : samples) {
        if (dim < 0) dim = static_cast<int>(s.vector.size());
        if (s.vector.size() != dim) throw DataError("feature dimension mismatch");
        require_finite(s.vector, "feature");
        auto& acc = sums[s.class_id];
        if (acc.count == 0) acc.sum = Vector::Zero(dim);
        acc.sum += s.vector;
        ++acc.count;
    }
    return sums;
}

Vector normalized_prototype(const Vector& mean, ClassId c) {
    const double n = mean.norm();
    if (!(n > 0.0)) throw DataError("degenerate prototype for class " + std::to_string(c));
    return mean / n;
}

double inverse_norm(const Vector& f) {
    const double n = f.norm();
    if (!(n > 0.0)) throw DataError("zero-norm feature");
    return 1.0 / n;
}

}  // namespace

const Vector& ClassifierWeights::weight(ClassId c) const {
    auto it = weights_.find(c);
    if (it == weights_.end()) throw std::out_of_range("no weight for class " + std::to_string(c));
    return it->second;
}

int ClassifierWeights::dim() const {
    return weights_.empty() ? 0 : static_cast<int>(weights_.begin()->second.size());
}

bool ClassifierWeights::is_base(ClassId c) const {
    return std::binary_search(base_.class_ids.begin(), base_.class_ids.end(), c);
}

std::vector<ClassId> ClassifierWeights::novel_ids() const {
    std::vector<ClassId> ids;
    for (const auto& block : novel_) ids.insert(ids.end(), block.class_ids.begin(), block.class_ids.end());
    std::sort(ids.begin(), ids.end());
    return ids;
}

Matrix ClassifierWeights::stacked(std::span<const ClassId> ids) const {
    Matrix m(static_cast<Eigen::Index>(ids.size()), dim());
    for (std::size_t i = 0; i < ids.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = weight(ids[i]).transpose();
    return m;
}

ClassifierWeights init_base_weights(std::span<const LabeledFeature> base_samples) {
    if (base_samples.empty()) throw DataError("no base samples");
    ClassifierWeights w;
    for (const auto& [c, acc] : sum_by_class(base_samples)) {
        w.weights_[c] = normalized_prototype(acc.sum / static_cast<double>(acc.count), c);
        w.base_.class_ids.push_back(c);
    }
    return w;
}

ClassifierWeights init_novel_weights(const ClassifierWeights& weights,
                                     std::span<const LabeledFeature> shots) {
    ClassifierWeights w = weights;
    ClassSet block;
    block.session_index = static_cast<int>(weights.novel_.size()) + 1;
    for (const auto& [c, acc] : sum_by_class(shots)) {
        if (w.contains(c)) throw DataError("class " + std::to_string(c) + " already has a weight");
        if (w.dim() != 0 && acc.sum.size() != w.dim()) throw DataError("feature dimension mismatch");
        w.weights_[c] = normalized_prototype(acc.sum / static_cast<double>(acc.count), c);
        block.class_ids.push_back(c);
    }
    w.novel_.push_back(std::move(block));
    return w;
}

Prediction classify(const Vector& feature, const ClassifierWeights& weights) {
    if (weights.size() == 0) throw DataError("classifier has no weights");
    if (feature.size() != weights.dim()) throw DataError("feature dimension mismatch");
    const double inv = inverse_norm(feature);
    Prediction best{0, -std::numeric_limits<double>::infinity()};
    // std::map iterates in ascending id order, strict > keeps the lowest id on ties.
    for (const auto& [c, w] : weights.all()) {
        const double score = w.dot(feature) * inv;
        if (score > best.score) best = {c, score};
    }
    best.score = std::clamp(best.score, -1.0, 1.0);
    return best;
}

std::vector<Prediction> classify(std::span<const Vector> features, const ClassifierWeights& weights) {
    std::vector<Prediction> out;
    out.reserve(features.size());
    for (const auto& f : features) out.push_back(classify(f, weights));
    return out;
}

ClassifierWeights update_weights(const ClassifierWeights& weights,
                                 std::span<const LabeledFeature> augmented) {
    return update_weights(weights, augmented, {});
}

ClassifierWeights update_weights(const ClassifierWeights& weights,
                                 std::span<const LabeledFeature> augmented,
                                 const std::map<ClassId, PrototypeEvidence>& retained) {
    ClassifierWeights w = weights;
    for (auto& [c, acc] : sum_by_class(augmented)) {
        if (!w.contains(c)) throw DataError("augmented sample for unseen class " + std::to_string(c));
        if (acc.sum.size() != w.dim()) throw DataError("feature dimension mismatch");
        double count = static_cast<double>(acc.count);
        if (auto it = retained.find(c); it != retained.end() && it->second.count > 0) {
            acc.sum += static_cast<double>(it->second.count) * it->second.mean;
            count += static_cast<double>(it->second.count);
        }
        w.weights_[c] = normalized_prototype(acc.sum / count, c);
    }
    return w;
}

EvaluationResult evaluate(std::span<const LabeledFeature> test, const ClassifierWeights& weights) {
    if (test.empty()) throw DataError("empty test set");
    EvaluationResult r;
    for (const auto& item : test) {
        if (!weights.contains(item.class_id)) {
            throw DataError("test label " + std::to_string(item.class_id) + " is not a seen class");
        }
        const bool hit = classify(item.vector, weights).class_id == item.class_id;
        ++r.n_all;
        r.correct_all += hit;
        if (weights.is_base(item.class_id)) {
            ++r.n_base;
            r.correct_base += hit;
        } else {
            ++r.n_novel;
            r.correct_novel += hit;
        }
    }
    auto pct = [](std::size_t k, std::size_t n) { return 100.0 * static_cast<double>(k) / static_cast<double>(n); };
    r.acc_all = pct(r.correct_all, r.n_all);
    if (r.n_base > 0) r.acc_base = pct(r.correct_base, r.n_base);
    if (r.n_novel > 0) r.acc_novel = pct(r.correct_novel, r.n_novel);
    return r;
}

}  // namespace aldc::classifier
