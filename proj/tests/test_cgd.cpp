#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "liemix/cgd.hpp"
#include "liemix/diagnostics.hpp"
#include "liemix/errors.hpp"

using namespace liemix;
using namespace testing;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<int>(v.size()));
    int i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

Matrix diag(std::initializer_list<double> v) { return Matrix(vec(v).asDiagonal()); }

struct Moments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

template <typename F>
Moments moments(int n, int dim, F&& draw) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd x = draw();
        s += x;
        ss += x * x.transpose();
    }
    Moments m;
    m.mean = s / n;
    m.cov = ss / n - m.mean * m.mean.transpose();
    return m;
}

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("CGD validates its covariance") {
    const GroupElement mu = Group::se2().identity();
    CHECK_NOTHROW(CGD(mu, diag({1, 2, 3})));
    Matrix asym = diag({1, 1, 1});
    asym(0, 1) = 1e-6;
    CHECK_THROWS_AS(CGD(mu, asym), NotPositiveDefiniteError);
    CHECK_THROWS_AS(CGD(mu, diag({1, -1, 1})), NotPositiveDefiniteError);
    CHECK_THROWS_AS(CGD(mu, diag({1, 1})), DimensionError);
    // Symmetrization repairs round-off asymmetry from computation.
    CHECK_NOTHROW(CGD::repaired(mu, asym));
    CHECK_THROWS_AS(CGD::repaired(mu, diag({1, 0, 1})), NotPositiveDefiniteError);
    CHECK_NOTHROW(CGD::repaired(mu, diag({1, 0, 1}), 1e-9));
}

TEST_CASE("broad covariances raise a concentration warning") {
    int seen = 0;
    set_warning_handler([&](const std::string& tag, const std::string&) { seen += tag == "concentration"; });
    CGD(Group::se2().identity(), diag({0.5, 0.5, 0.5}));
    CHECK(seen == 0);
    CGD(Group::se2().identity(), diag({2.0, 0.5, 0.5}));
    CHECK(seen == 1);
    set_concentration_bound(5.0);
    CGD(Group::se2().identity(), diag({2.0, 0.5, 0.5}));
    CHECK(seen == 1);
    set_concentration_bound(1.0);
    reset_warning_handler();
    CHECK(is_concentrated(diag({0.2, 0.9}), 1.0));
    CHECK(!is_concentrated(diag({0.2, 1.1}), 1.0));
}

TEST_CASE("sampling") {
    Rng rng(1);
    const Group g = Group::se2();
    const GroupElement mu = g.exp(vec({1, -2, 0.7}));
    {
        const CGD d(mu, diag({1e-18, 1e-18, 1e-18}));
        CHECK(max_abs(sample(d, rng).matrix() - mu.matrix()) < 1e-8);
    }
    {
        const Group r2 = Group::euclidean(2);
        const CGD d(r2.from_params(liemix::ParamVector(vec({3, -1}))), diag({4.0, 0.25}));
        const int n = 100000;
        const Moments m = moments(n, 2, [&] { return Eigen::VectorXd(sample(d, rng).params()); });
        CHECK(std::abs(m.mean(0) - 3.0) < 4 * 2.0 / std::sqrt(n));
        CHECK(std::abs(m.mean(1) + 1.0) < 4 * 0.5 / std::sqrt(n));
    }
    {
        const Matrix cov = diag({0.01, 0.01, 0.001});
        const CGD d(mu, cov);
        const Moments m = moments(100000, 3, [&] { return Eigen::VectorXd(g.log(sample(d, rng) * mu.inverse())); });
        for (int i = 0; i < 3; ++i) CHECK(m.cov(i, i) == doctest::Approx(cov(i, i)).epsilon(0.05));
        CHECK(rel(m.cov, dense(cov)) < 0.05);
    }
}

TEST_CASE("log density") {
    const Group g = Group::se2();
    const GroupElement mu = g.exp(vec({0.5, 0.1, -0.4}));
    const Matrix cov = diag({0.04, 0.04, 0.01});
    const CGD d(mu, cov);
    const double at_mean = -0.5 * (3 * std::log(2 * std::numbers::pi) + std::log(0.04 * 0.04 * 0.01));
    CHECK(log_pdf(d, mu) == doctest::Approx(at_mean).epsilon(1e-14));

    Rng rng(4);
    const Group r3 = Group::euclidean(3);
    const Matrix c3 = random_spd(rng, 3, 0.1, 2.0);
    const Vector m3 = random_vector(rng, 3);
    const CGD e(r3.from_params(liemix::ParamVector(m3)), c3);
    for (int i = 0; i < 5; ++i) {
        const Vector x = random_vector(rng, 3, 2.0);
        CHECK(log_pdf(e, r3.from_params(liemix::ParamVector(x))) ==
              doctest::Approx(oracle::log_normal(dense(x), dense(m3), dense(c3))).epsilon(1e-12));
    }

    // Integrate over the tangent grid with dX = |Phi(xi)| dxi.
    const int n = 40;
    const double sd[3] = {0.2, 0.2, 0.1};
    double total = 0.0;
    double cell = 1.0;
    for (double s : sd) cell *= 12.0 * s / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const Vector xi = vec({(-6 + 12.0 * (i + 0.5) / n) * sd[0], (-6 + 12.0 * (j + 0.5) / n) * sd[1],
                                       (-6 + 12.0 * (k + 0.5) / n) * sd[2]});
                const double jac = std::abs(g.phi_inv_jacobian(xi).determinant());
                total += std::exp(log_pdf(d, g.exp(xi) * mu)) * jac * cell;
            }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-3));

    liemix::ParamVector p(3);
    p << 0, 0, std::numbers::pi;
    CHECK_THROWS_AS(log_pdf(CGD(g.identity(), cov), g.from_params(p)), SingularLogError);
}

TEST_CASE("unfolding") {
    const Group g = Group::se2();
    Rng rng(6);
    const GroupElement mu = random_se2(rng, 1.0);
    const Matrix cov = diag({0.01, 0.01, 0.005});
    const CGD d(mu, cov);
    const TangentGaussian self = unfold(d, mu);
    CHECK(self.mean.norm() == 0.0);
    CHECK(max_abs(dense(self.cov - cov)) == 0.0);

    const Group r3 = Group::euclidean(3);
    const CGD e(r3.from_params(liemix::ParamVector(vec({1, 2, 3}))), cov);
    const TangentGaussian te = unfold(e, r3.from_params(liemix::ParamVector(vec({0.5, 0, -1}))));
    CHECK(max_abs(dense(te.mean - vec({0.5, 2, 4}))) == 0.0);
    CHECK(max_abs(dense(te.cov - cov)) == 0.0);

    for (int trial = 0; trial < 3; ++trial) {
        const GroupElement anchor = g.exp(random_in_ball(rng, 3, 0.5)).inverse() * mu;
        const TangentGaussian t = unfold(d, anchor);
        CHECK(t.mean.norm() <= 0.5 + 1e-12);
        const Moments m =
            moments(100000, 3, [&] { return Eigen::VectorXd(g.log(sample(d, rng) * anchor.inverse())); });
        CHECK((m.mean - dense(t.mean)).norm() / t.mean.norm() < 0.05);
        CHECK(rel(m.cov, dense(t.cov)) < 0.05);
    }
}

TEST_CASE("folding") {
    const Group g = Group::se2();
    Rng rng(7);
    const GroupElement anchor = random_se2(rng, 2.0);
    const Matrix cov = random_spd(rng, 3, 0.001, 0.01);
    {
        const CGD f = fold(TangentGaussian{anchor, Vector::Zero(3), cov});
        CHECK(f.mean() == anchor);
        CHECK(max_abs(dense(f.cov() - cov)) < 1e-18);
    }
    {
        const Group r3 = Group::euclidean(3);
        const GroupElement a = r3.from_params(liemix::ParamVector(vec({1, 1, 1})));
        const CGD f = fold(TangentGaussian{a, vec({0.5, -1, 2}), cov});
        CHECK(max_abs(dense(f.mean().params() - vec({1.5, 0, 3}))) == 0.0);
        CHECK(max_abs(dense(f.cov() - cov)) == 0.0);
    }
    // Round trip with a tangent offset of 0.3, and with that offset halved twice.
    const Vector dir = random_in_ball(rng, 3, 1.0).normalized();
    for (double scale : {0.3, 0.15, 0.075}) {
        const GroupElement mu = g.exp(scale * dir) * anchor;
        const CGD d(mu, cov);
        const CGD back = fold(unfold(d, anchor));
        CHECK(max_abs(back.mean().matrix() - mu.matrix()) < 1e-12);
        CHECK(rel(dense(back.cov()), dense(cov)) < 0.02);
        CHECK(rel(dense(back.cov()), dense(cov)) < 1e-10);
    }
}

TEST_CASE("fold matches the distribution of exp(r + e) anchor") {
    // Monte-Carlo check that the folded covariance describes samples of the
    // tangent Gaussian pushed to the group.
    const Group g = Group::se2();
    Rng rng(12);
    const GroupElement anchor = random_se2(rng, 1.0);
    const Vector r = vec({0.2, -0.1, 0.25});
    const Matrix cov = diag({0.004, 0.002, 0.003});
    const CGD f = fold(TangentGaussian{anchor, r, cov});
    const Eigen::LLT<Eigen::MatrixXd> llt(dense(cov));
    std::normal_distribution<double> n01;
    const Moments m = moments(100000, 3, [&] {
        Eigen::Vector3d z(n01(rng), n01(rng), n01(rng));
        const Vector e = Vector(llt.matrixL() * z);
        return Eigen::VectorXd(g.log(g.exp(r + e) * anchor * f.mean().inverse()));
    });
    CHECK(rel(m.cov, dense(f.cov())) < 0.05);
}

TEST_CASE("mixtures") {
    const Group g = Group::se2();
    Mixture m(g);
    m.add(0.5, CGD(g.identity(), diag({1, 1, 1})));
    m.add(2.0, CGD(g.identity(), diag({1, 1, 1})));
    CHECK(m.total_weight() == 2.5);
    CHECK_THROWS_AS(m.add(0.0, CGD(g.identity(), diag({1, 1, 1}))), std::invalid_argument);
    CHECK_THROWS_AS(m.add(1.0, CGD(Group::so2().identity(), diag({1}))), DimensionError);
}
