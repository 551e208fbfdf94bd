#include "aldc/b2n.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace aldc::b2n {

namespace {

constexpr double kJitter = 1e-6;

double cosine(const Vector& a, const Vector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
    return a.dot(b) / (na * nb);
}

Matrix eigen_factor(const Eigen::SelfAdjointEigenSolver<Matrix>& eig, double floor) {
    Vector root = eig.eigenvalues().cwiseMax(floor).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace

ClassStatistics class_statistics(std::span<const Vector> samples, ClassId class_id) {
    if (samples.empty()) throw DataError("class_statistics: empty sample list");
    const Eigen::Index d = samples.front().size();
    const double n = static_cast<double>(samples.size());

    Vector mean = Vector::Zero(d);
    for (const auto& x : samples) {
        if (x.size() != d) throw DataError("class_statistics: dimension mismatch");
        mean += x;
    }
    mean /= n;

    Matrix centered(static_cast<Eigen::Index>(samples.size()), d);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        centered.row(static_cast<Eigen::Index>(i)) = (samples[i] - mean).transpose();
    }
    Matrix cov = (centered.transpose() * centered) / n;
    cov = 0.5 * (cov + cov.transpose()).eval();
    return {class_id, std::move(mean), std::move(cov), samples.size()};
}

std::vector<ClassId> select_base_classes(ClassId novel_class,
                                         std::span<const alt::AmbiguousSample> ambiguous,
                                         const std::map<ClassId, ClassStatistics>& base_stats,
                                         const Vector& novel_weight, int k) {
    if (k < 0) throw std::invalid_argument("select_base_classes: k must be non-negative");
    if (base_stats.empty()) throw DataError("select_base_classes: no base statistics");

    std::map<ClassId, int> frequency;
    for (const auto& a : ambiguous) {
        if (a.novel_arg == novel_class) ++frequency[a.base_arg];
    }

    // (frequency desc, cosine desc, id asc)
    std::vector<std::tuple<int, double, ClassId>> ranked;
    ranked.reserve(base_stats.size());
    for (const auto& [b, stats] : base_stats) {
        auto it = frequency.find(b);
        ranked.emplace_back(it == frequency.end() ? 0 : it->second, cosine(novel_weight, stats.mean), b);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
        if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) > std::get<1>(y);
        return std::get<2>(x) < std::get<2>(y);
    });

    const std::size_t take = std::min(ranked.size(), static_cast<std::size_t>(k));
    std::vector<ClassId> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(std::get<2>(ranked[i]));
    return out;
}

RepairedFactor repair_and_factor(const Matrix& covariance) {
    if (!covariance.allFinite()) throw DataError("covariance not repairable: non-finite entries");
    const Matrix sym = 0.5 * (covariance + covariance.transpose());
    const Eigen::Index d = sym.rows();

    Eigen::LLT<Matrix> llt(sym);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), false};

    // Singular but positive semi-definite (e.g. zero spread): factor exactly.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() >= -1e-12 * scale) return {eigen_factor(eig, 0.0), false};

    const Matrix jittered = sym + kJitter * Matrix::Identity(d, d);
    Eigen::LLT<Matrix> retry(jittered);
    if (retry.info() == Eigen::Success) return {retry.matrixL(), true};
    return {eigen_factor(eig, kJitter), true};
}

CalibratedDistribution calibrate(const ClassStatistics& novel_stats,
                                 std::span<const ClassStatistics> selected_base_stats, double alpha) {
    const Eigen::Index d = novel_stats.mean.size();
    if (novel_stats.covariance.rows() != d || novel_stats.covariance.cols() != d) {
        throw DataError("calibrate: novel covariance shape mismatch");
    }
    Vector mean_sum = novel_stats.mean;
    Matrix cov_sum = novel_stats.covariance;
    CalibratedDistribution out;
    out.class_id = novel_stats.class_id;
    out.alpha = alpha;
    for (const auto& b : selected_base_stats) {
        if (b.mean.size() != d || b.covariance.rows() != d || b.covariance.cols() != d) {
            throw DataError("calibrate: dimension mismatch with base class " + std::to_string(b.class_id));
        }
        mean_sum += b.mean;
        cov_sum += b.covariance;
        out.contributing_base_ids.push_back(b.class_id);
    }
    const double contributors = static_cast<double>(selected_base_stats.size() + 1);
    out.mean = mean_sum / contributors;
    out.covariance = (cov_sum / contributors).array() + alpha;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();

    RepairedFactor rf = repair_and_factor(out.covariance);
    out.sampling_factor = std::move(rf.factor);
    out.repaired = rf.repaired;
    return out;
}

std::vector<Vector> sample_features(const CalibratedDistribution& dist, std::size_t n, Rng& rng) {
    if (dist.sampling_factor.rows() != dist.mean.size()) {
        throw DataError("sample_features: distribution has no sampling factor");
    }
    const GaussianSampler sampler(dist.mean, dist.sampling_factor);
    std::vector<Vector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sampler(rng));
    return out;
}

}  // namespace aldc::b2n
