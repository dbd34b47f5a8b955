#include "liemix/cgd.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "liemix/diagnostics.hpp"
#include "liemix/errors.hpp"

namespace liemix {

namespace {

void check_concentration(const Matrix& cov) {
    const double bound = concentration_bound();
    if (!is_concentrated(cov, bound)) {
        std::ostringstream os;
        os << "covariance eigenvalue above the concentration bound " << bound;
        warn("concentration", os.str());
    }
}

}  // namespace

bool is_concentrated(const Matrix& cov, double bound) {
    // lambda_max <= trace for PSD matrices; skip the eigen-solve in the common case.
    if (cov.trace() <= bound) return true;
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() <= bound;
}

CGD::CGD(GroupElement mean, Matrix cov, Eigen::LLT<Matrix> llt)
    : mean_(std::move(mean)), cov_(std::move(cov)), llt_(std::move(llt)), log_det_(log_det(llt_)) {
    check_concentration(cov_);
}

CGD::CGD(GroupElement mean, const Matrix& cov) : mean_(std::move(mean)), cov_(cov), log_det_(0.0) {
    const int p = mean_.group().algebra_dim();
    if (cov.rows() != p || cov.cols() != p)
        throw DimensionError("CGD: covariance must be " + std::to_string(p) + "x" + std::to_string(p) + " on " +
                             mean_.group().name());
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if (asymmetry(cov) > 1e-12 * scale) throw NotPositiveDefiniteError("CGD: covariance is not symmetric");
    cov_ = symmetrize(cov);
    llt_ = checked_cholesky(cov_, "CGD");
    log_det_ = log_det(llt_);
    check_concentration(cov_);
}

CGD CGD::repaired(GroupElement mean, const Matrix& cov, double jitter) {
    const int p = mean.group().algebra_dim();
    if (cov.rows() != p || cov.cols() != p) throw DimensionError("CGD: covariance dimension mismatch");
    Matrix s = symmetrize(cov);
    if (jitter > 0.0) s.diagonal().array() += jitter;
    auto llt = checked_cholesky(s, "CGD");
    return CGD(std::move(mean), std::move(s), std::move(llt));
}

Mixture::Mixture(Group group, std::vector<WeightedCgd> components) : group_(std::move(group)) {
    components_.reserve(components.size());
    for (auto& c : components) add(c.weight, std::move(c.dist));
}

void Mixture::add(double weight, CGD dist) {
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw std::invalid_argument("Mixture: component weights must be positive and finite");
    if (dist.group() != group_)
        throw DimensionError("Mixture: component on " + dist.group().name() + " added to a mixture on " +
                             group_.name());
    components_.push_back({weight, std::move(dist)});
}

double Mixture::total_weight() const {
    double s = 0.0;
    for (const auto& c : components_) s += c.weight;
    return s;
}

GroupElement sample(const CGD& d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const int p = d.group().algebra_dim();
    Vector z(p);
    for (int i = 0; i < p; ++i) z(i) = normal(rng);
    Vector xi = d.cov_llt().matrixL() * z;
    return d.group().compose(d.group().exp(xi), d.mean());
}

double log_pdf(const CGD& d, const GroupElement& x) {
    const Group& g = d.group();
    const Vector xi = g.log(g.compose(x, g.inverse(d.mean())));
    const Matrix big_phi = g.phi_inv_jacobian(xi);
    const double det_phi = big_phi.determinant();
    if (!(std::abs(det_phi) > 0.0)) throw NotPositiveDefiniteError("log_pdf: singular Jacobian");
    const int p = g.algebra_dim();
    // |Phi Sigma Phi^T| = |Phi|^2 |Sigma|
    const double log_beta = -0.5 * (p * std::log(2.0 * std::numbers::pi) + d.cov_log_det()) - std::log(std::abs(det_phi));
    const Vector w = d.cov_llt().matrixL().solve(xi);
    return log_beta - 0.5 * w.squaredNorm();
}

TangentGaussian unfold(const CGD& d, const GroupElement& anchor) {
    const Group& g = d.group();
    Vector r = g.log(g.compose(d.mean(), g.inverse(anchor)));
    const Matrix phi = g.phi_jacobian(r);
    Matrix cov = symmetrize(phi * d.cov() * phi.transpose());
    return TangentGaussian{anchor, std::move(r), std::move(cov)};
}

CGD fold(const TangentGaussian& t, double jitter) {
    const Group& g = t.anchor.group();
    if (t.mean.size() != g.algebra_dim() || t.cov.rows() != g.algebra_dim() || t.cov.cols() != g.algebra_dim())
        throw DimensionError("fold: tangent Gaussian dimension mismatch");
    const GroupElement step = g.exp(t.mean);
    // Ad(exp r) times the right Jacobian J_r(r) = Phi(-r); equals Phi(r).
    const Vector neg = -t.mean;
    const Matrix a = g.adjoint(step) * g.phi_inv_jacobian(neg);
    return CGD::repaired(g.compose(step, t.anchor), a * t.cov * a.transpose(), jitter);
}

}  // namespace liemix
