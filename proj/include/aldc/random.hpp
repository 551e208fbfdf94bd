#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "aldc/core.hpp"

namespace aldc {

using Rng = std::mt19937_64;

/// Mixes a master seed with a path of stream tags into an independent seed
/// (splitmix64 finalizer chained over the path). Used to give every class
/// and session its own stream, so parallel and serial runs match.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(master, path));
}

Vector standard_normal(int dim, Rng& rng);

/// Gaussian draws as mean + factor * z, z ~ N(0, I).
class GaussianSampler {
public:
    GaussianSampler(Vector mean, Matrix factor);

    Vector operator()(Rng& rng) const;

    const Vector& mean() const { return mean_; }
    const Matrix& factor() const { return factor_; }

private:
    Vector mean_;
    Matrix factor_;
};

/// Factor L with L * L^T == cov for a symmetric positive semi-definite
/// matrix. Uses Cholesky when it succeeds and an eigen factor with negative
/// eigenvalues clipped to zero otherwise. Not necessarily triangular.
Matrix psd_factor(const Matrix& cov);

}  // namespace aldc
