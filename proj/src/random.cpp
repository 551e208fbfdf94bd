#include "aldc/random.hpp"

#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace aldc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t tag : path) h = splitmix64(h ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
    return h;
}

Vector standard_normal(int dim, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z(dim);
    for (int i = 0; i < dim; ++i) z[i] = normal(rng);
    return z;
}

GaussianSampler::GaussianSampler(Vector mean, Matrix factor)
    : mean_(std::move(mean)), factor_(std::move(factor)) {
    if (factor_.rows() != mean_.size() || factor_.cols() != mean_.size()) {
        throw std::invalid_argument("GaussianSampler: factor shape does not match mean");
    }
}

Vector GaussianSampler::operator()(Rng& rng) const {
    return mean_ + factor_ * standard_normal(static_cast<int>(mean_.size()), rng);
}

Matrix psd_factor(const Matrix& cov) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace aldc
