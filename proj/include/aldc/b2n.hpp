#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "aldc/alt.hpp"
#include "aldc/random.hpp"

namespace aldc::b2n {

/// Population (1/N) mean and covariance of one class.
struct ClassStatistics {
    ClassId class_id = 0;
    Vector mean;
    Matrix covariance;
    std::size_t count = 0;

    bool operator==(const ClassStatistics&) const = default;
};

struct CalibratedDistribution {
    ClassId class_id = 0;
    Vector mean;
    /// Blended covariance with alpha added to every entry, before repair.
    Matrix covariance;
    double alpha = 0.0;
    std::vector<ClassId> contributing_base_ids;
    /// F with F * F^T the repaired (positive semi-definite) covariance.
    Matrix sampling_factor;
    /// True when the blended covariance had to be jittered or clipped.
    bool repaired = false;

    Matrix repaired_covariance() const { return sampling_factor * sampling_factor.transpose(); }
};

ClassStatistics class_statistics(std::span<const Vector> samples, ClassId class_id);

/// Ranks base classes by how often (base_arg = b, novel_arg = novel_class)
/// occurs among the ambiguous samples, then by cos(novel_weight, mean_b),
/// then by id, and returns the first k.
std::vector<ClassId> select_base_classes(ClassId novel_class,
                                         std::span<const alt::AmbiguousSample> ambiguous,
                                         const std::map<ClassId, ClassStatistics>& base_stats,
                                         const Vector& novel_weight, int k);

/// mean' = (sum of selected base means + novel mean) / (k + 1)
/// cov'  = (sum of selected base covs + novel cov) / (k + 1) + alpha
CalibratedDistribution calibrate(const ClassStatistics& novel_stats,
                                 std::span<const ClassStatistics> selected_base_stats, double alpha);

/// Sampling factor for a symmetric matrix. Positive semi-definite input is
/// factored as-is; otherwise 1e-6 is added to the diagonal, and if Cholesky
/// still fails negative eigenvalues are clipped to 1e-6.
struct RepairedFactor {
    Matrix factor;
    bool repaired = false;
};
RepairedFactor repair_and_factor(const Matrix& covariance);

std::vector<Vector> sample_features(const CalibratedDistribution& dist, std::size_t n, Rng& rng);

}  // namespace aldc::b2n
