#pragma once

#include <random>
#include <vector>

#include <Eigen/Cholesky>

#include "liemix/lie_group.hpp"
#include "liemix/linalg.hpp"

namespace liemix {

using Rng = std::mt19937_64;

/**
 * Concentrated Gaussian distribution on a matrix Lie group, left-perturbation
 * convention: X = exp(xi) * mean with xi ~ N(0, cov) in the tangent space at
 * the identity.
 *
 * The covariance must be symmetric (to 1e-12, relative to its largest entry)
 * and positive-definite. Its Cholesky factor is cached.
 */
class CGD {
public:
    CGD(GroupElement mean, const Matrix& cov);

    /// Symmetrizes `cov` (plus optional diagonal jitter) before validating.
    /// Used for covariances produced by computation.
    static CGD repaired(GroupElement mean, const Matrix& cov, double jitter = 0.0);

    const Group& group() const { return mean_.group(); }
    const GroupElement& mean() const { return mean_; }
    const Matrix& cov() const { return cov_; }
    const Eigen::LLT<Matrix>& cov_llt() const { return llt_; }
    double cov_log_det() const { return log_det_; }

private:
    CGD(GroupElement mean, Matrix cov, Eigen::LLT<Matrix> llt);

    GroupElement mean_;
    Matrix cov_;
    Eigen::LLT<Matrix> llt_;
    double log_det_;
};

/// Classical Gaussian N(mean, cov) living in the tangent space placed at `anchor`.
struct TangentGaussian {
    GroupElement anchor;
    Vector mean;
    Matrix cov;
};

struct WeightedCgd {
    double weight;
    CGD dist;
};

/// Weighted sum of CGDs sharing one group. Weights are strictly positive but
/// need not sum to one.
class Mixture {
public:
    explicit Mixture(Group group) : group_(std::move(group)) {}
    Mixture(Group group, std::vector<WeightedCgd> components);

    const Group& group() const { return group_; }
    const std::vector<WeightedCgd>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    bool empty() const { return components_.empty(); }
    const WeightedCgd& operator[](std::size_t i) const { return components_[i]; }

    void add(double weight, CGD dist);
    double total_weight() const;

    auto begin() const { return components_.begin(); }
    auto end() const { return components_.end(); }

private:
    Group group_;
    std::vector<WeightedCgd> components_;
};

/// Draws X = exp(L z) * mean, z ~ N(0, I), L L^T = cov.
GroupElement sample(const CGD& d, Rng& rng);

/// log of the induced density with respect to the group measure:
/// log beta(X) - 0.5 |log(X mean^-1)|^2_cov, where beta carries the
/// X-dependent |Phi(log(X mean^-1))| factor.
double log_pdf(const CGD& d, const GroupElement& x);

/// Reparametrizes `d` about `anchor`: r = log(mean anchor^-1),
/// cov = phi(r) Sigma phi(r)^T.
TangentGaussian unfold(const CGD& d, const GroupElement& anchor);

/// Maps a tangent Gaussian back to the group: mean = exp(r) anchor and
/// cov = A Sigma A^T with A = Ad(exp(r)) J_r(r) = Phi(r).
CGD fold(const TangentGaussian& t, double jitter = 0.0);

/// True when the largest eigenvalue of the covariance is at most `bound`.
bool is_concentrated(const Matrix& cov, double bound);

}  // namespace liemix
