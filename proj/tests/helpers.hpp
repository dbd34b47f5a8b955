#pragma once

#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <vector>

#include "liemix/cgd.hpp"
#include "liemix/diagnostics.hpp"
#include "liemix/lie_group.hpp"
#include "oracles.hpp"

namespace testing {

using liemix::Group;
using liemix::GroupElement;
using liemix::Matrix;
using liemix::Vector;

inline double uniform(liemix::Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector random_vector(liemix::Rng& rng, int n, double scale = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(rng, -scale, scale);
    return v;
}

/// Uniform direction scaled to a norm drawn uniformly from [0, max_norm].
inline Vector random_in_ball(liemix::Rng& rng, int n, double max_norm) {
    std::normal_distribution<double> n01;
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = n01(rng);
    return v.normalized() * uniform(rng, 0.0, max_norm);
}

/// Random SPD matrix with eigenvalues in [lo, hi].
inline Matrix random_spd(liemix::Rng& rng, int n, double lo, double hi) {
    std::normal_distribution<double> n01;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = n01(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd ev(n);
    for (int i = 0; i < n; ++i) ev(i) = uniform(rng, lo, hi);
    const Eigen::MatrixXd s = q * ev.asDiagonal() * q.transpose();
    return Matrix(0.5 * (s + s.transpose()));
}

inline GroupElement random_se2(liemix::Rng& rng, double trans = 5.0) {
    liemix::ParamVector p(3);
    p << uniform(rng, -trans, trans), uniform(rng, -trans, trans), uniform(rng, -3.1, 3.1);
    return Group::se2().from_params(p);
}

/// Heap-allocated copy of a bounded-size expression (VectorXd for column vectors).
template <typename D>
Eigen::Matrix<double, Eigen::Dynamic, D::ColsAtCompileTime == 1 ? 1 : Eigen::Dynamic> dense(
    const Eigen::MatrixBase<D>& m) {
    return m;
}

/// Random classical mixture with well-separated weights and SPD covariances.
inline std::vector<oracle::Gauss> random_flat_mixture(liemix::Rng& rng, int dim, int n, double spread) {
    std::vector<oracle::Gauss> out;
    for (int k = 0; k < n; ++k)
        out.push_back(oracle::Gauss{uniform(rng, 0.05, 1.0), Eigen::VectorXd(random_vector(rng, dim, spread)),
                                    Eigen::MatrixXd(random_spd(rng, dim, 0.05, 1.0))});
    return out;
}

inline liemix::Mixture to_mixture(const Group& g, const std::vector<oracle::Gauss>& flat) {
    liemix::Mixture m(g);
    for (const auto& c : flat) m.add(c.w, liemix::CGD(g.from_params(liemix::ParamVector(c.m)), Matrix(c.c)));
    return m;
}

/// Largest absolute difference between a reduced mixture and the flat oracle
/// output, component by component in order. Infinite when the sizes differ.
inline double mixture_gap(const liemix::Mixture& m, const std::vector<oracle::Gauss>& flat) {
    if (m.size() != flat.size()) return std::numeric_limits<double>::infinity();
    double gap = 0.0;
    for (std::size_t k = 0; k < flat.size(); ++k) {
        gap = std::max(gap, std::abs(m[k].weight - flat[k].w));
        gap = std::max(gap, (Eigen::VectorXd(m[k].dist.mean().params()) - flat[k].m).cwiseAbs().maxCoeff());
        gap = std::max(gap, (Eigen::MatrixXd(m[k].dist.cov()) - flat[k].c).cwiseAbs().maxCoeff());
    }
    return gap;
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

/// Silences concentration warnings for the lifetime of the guard.
struct QuietWarnings {
    QuietWarnings() {
        liemix::set_warning_handler([](std::string_view, std::string_view) {});
    }
    ~QuietWarnings() { liemix::reset_warning_handler(); }
};

}  // namespace testing
