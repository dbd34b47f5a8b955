#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "liemix/errors.hpp"
#include "liemix/reduction.hpp"

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

GroupElement se2(double x, double y, double th) { return Group::se2().exp(vec({x, y, th})); }

CGD se2_cgd(const GroupElement& mean, double s = 0.01) { return CGD(mean, diag({s, s, s / 2})); }

}  // namespace

TEST_CASE("kl_gaussian closed form") {
    const GroupElement id = Group::euclidean(1).identity();
    const TangentGaussian a{id, vec({0}), diag({1})};
    const TangentGaussian b{id, vec({1}), diag({1})};
    CHECK(kl_gaussian(a, a) == 0.0);
    CHECK(kl_gaussian(a, b) == doctest::Approx(0.5).epsilon(1e-15));
    const TangentGaussian elsewhere{Group::euclidean(1).from_params(ParamVector(vec({1}))), vec({0}), diag({1})};
    CHECK_THROWS_AS(kl_gaussian(a, elsewhere), std::invalid_argument);

    Rng rng(2);
    const GroupElement id3 = Group::euclidean(3).identity();
    const TangentGaussian p{id3, random_vector(rng, 3), random_spd(rng, 3, 0.2, 1.5)};
    const TangentGaussian q{id3, random_vector(rng, 3), random_spd(rng, 3, 0.2, 1.5)};
    const oracle::Gauss gp{1, dense(p.mean), dense(p.cov)};
    const oracle::Gauss gq{1, dense(q.mean), dense(q.cov)};
    CHECK(kl_gaussian(p, q) == doctest::Approx(oracle::kl(gp, gq)).epsilon(1e-12));

    // Monte-Carlo estimate of E_p[log p - log q].
    const Eigen::LLT<Eigen::MatrixXd> llt(gp.c);
    std::normal_distribution<double> n01;
    const int n = 1000000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d z(n01(rng), n01(rng), n01(rng));
        const Eigen::VectorXd x = gp.m + llt.matrixL() * z;
        const double v = oracle::log_normal(x, gp.m, gp.c) - oracle::log_normal(x, gq.m, gq.c);
        s += v;
        ss += v * v;
    }
    const double mean = s / n;
    const double se = std::sqrt((ss / n - mean * mean) / n);
    CHECK(std::abs(kl_gaussian(p, q) - mean) < 3 * se);
}

TEST_CASE("kl_cgd") {
    Rng rng(3);
    const CGD a = se2_cgd(random_se2(rng));
    CHECK(std::abs(kl_cgd(a, a, random_se2(rng, 0.3))) < 1e-10);

    const Group r3 = Group::euclidean(3);
    const oracle::Gauss ga{1, Eigen::Vector3d(1, 2, 3), dense(random_spd(rng, 3, 0.2, 1))};
    const oracle::Gauss gb{1, Eigen::Vector3d(0, 2, 4), dense(random_spd(rng, 3, 0.2, 1))};
    const CGD ea(r3.from_params(ParamVector(ga.m)), Matrix(ga.c));
    const CGD eb(r3.from_params(ParamVector(gb.m)), Matrix(gb.c));
    for (int i = 0; i < 3; ++i) {
        const GroupElement anchor = r3.from_params(ParamVector(random_vector(rng, 3, 10)));
        CHECK(kl_cgd(ea, eb, anchor) == doctest::Approx(oracle::kl(ga, gb)).epsilon(1e-12));
    }
}

TEST_CASE("kl_cgd agrees with a Monte-Carlo estimate on the group") {
    Rng rng(5);
    const Group g = Group::se2();
    const GroupElement mi = random_se2(rng, 3.0);
    const GroupElement mj = g.exp(random_in_ball(rng, 3, 0.2).normalized() * 0.2) * mi;
    const CGD i(mi, random_spd(rng, 3, 0.005, 0.03));
    const CGD j(mj, random_spd(rng, 3, 0.005, 0.03));
    const double closed = kl_cgd(i, j, mi);
    const int n = 1000000;
    double s = 0.0, ss = 0.0;
    for (int k = 0; k < n; ++k) {
        const GroupElement x = sample(i, rng);
        const double v = log_pdf(i, x) - log_pdf(j, x);
        s += v;
        ss += v * v;
    }
    const double mean = s / n;
    const double se = std::sqrt((ss / n - mean * mean) / n);
    CHECK(std::abs(closed - mean) < 3 * se);
}

TEST_CASE("skl") {
    Rng rng(8);
    const CGD a = se2_cgd(se2(1, 2, 0.3));
    const GroupElement anchor = se2(1, 2, 0.3);
    CHECK(std::abs(skl(0.5, a, 0.5, a, anchor)) < 1e-12);
    CHECK(skl(0.6, a, 0.3, a, anchor) == doctest::Approx(0.5 * 0.3 * std::log(2.0)).epsilon(1e-12));
    CHECK(0.5 * 0.3 * std::log(2.0) == doctest::Approx(0.10397).epsilon(1e-4));
    for (int k = 0; k < 20; ++k) {
        const CGD p(random_se2(rng), random_spd(rng, 3, 0.01, 0.1));
        const CGD q(random_se2(rng), random_spd(rng, 3, 0.01, 0.1));
        const GroupElement at = random_se2(rng);
        const double w1 = uniform(rng, 0.1, 1), w2 = uniform(rng, 0.1, 1);
        CHECK(skl(w1, p, w2, q, at) == skl(w2, q, w1, p, at));
        CHECK(skl(w1, p, w2, q, at) >= 0.0);
    }
    CHECK_THROWS_AS(skl(0.0, a, 0.5, a, anchor), std::invalid_argument);
    CHECK_THROWS_AS(skl(0.5, a, -1.0, a, anchor), std::invalid_argument);
}

TEST_CASE("anchor selection") {
    const Group g = Group::se2();
    Mixture m(g);
    m.add(0.1, se2_cgd(se2(1, 0, 0)));
    m.add(0.5, se2_cgd(se2(2, 0, 0)));
    m.add(0.4, se2_cgd(se2(3, 0, 0)));
    CHECK(select_anchor(TangentStrategy::Identity, m, {0, 2}) == g.identity());
    CHECK(select_anchor(TangentStrategy::GlobalMax, m, {0, 2}) == m[1].dist.mean());
    CHECK(select_anchor(TangentStrategy::GlobalMin, m, {1, 2}) == m[0].dist.mean());
    CHECK(select_anchor(TangentStrategy::PairwiseLarger, m, {0, 2}) == m[2].dist.mean());
    CHECK(select_anchor(TangentStrategy::PairwiseSmaller, m, {0, 2}) == m[0].dist.mean());

    Mixture pair(g);
    pair.add(0.3, se2_cgd(se2(1, 0, 0)));
    pair.add(0.7, se2_cgd(se2(2, 0, 0)));
    CHECK(select_anchor(TangentStrategy::PairwiseLarger, pair, {0, 1}) == pair[1].dist.mean());

    Mixture tie(g);
    tie.add(0.5, se2_cgd(se2(1, 0, 0)));
    tie.add(0.5, se2_cgd(se2(2, 0, 0)));
    CHECK(select_anchor(TangentStrategy::PairwiseLarger, tie, {1, 0}) == tie[0].dist.mean());
    CHECK(select_anchor(TangentStrategy::PairwiseSmaller, tie, {1, 0}) == tie[0].dist.mean());
    CHECK(select_anchor(TangentStrategy::GlobalMax, tie, {0, 1}) == tie[0].dist.mean());
    CHECK(select_anchor(TangentStrategy::GlobalMin, tie, {0, 1}) == tie[0].dist.mean());

    CHECK_THROWS_AS(select_anchor(TangentStrategy::Identity, Mixture(g), {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(select_anchor(TangentStrategy::PairwiseLarger, m, {0, 3}), std::out_of_range);
}

TEST_CASE("merge") {
    const Group g = Group::se2();
    Rng rng(9);
    {
        const CGD a(random_se2(rng), random_spd(rng, 3, 0.01, 0.1));
        const std::vector<WeightedCgd> one{{0.7, a}};
        const WeightedCgd out = merge(one, a.mean());
        CHECK(out.weight == 0.7);
        CHECK(max_abs(out.dist.mean().matrix() - a.mean().matrix()) < 1e-15);
        CHECK(max_abs(dense(out.dist.cov() - a.cov())) < 1e-15);
    }
    {
        const Group r1 = Group::euclidean(1);
        const std::vector<WeightedCgd> two{{0.5, CGD(r1.from_params(ParamVector(vec({0}))), diag({1}))},
                                           {0.5, CGD(r1.from_params(ParamVector(vec({2}))), diag({1}))}};
        const WeightedCgd out = merge(two, r1.identity());
        CHECK(out.weight == 1.0);
        CHECK(out.dist.mean().params()(0) == doctest::Approx(1.0));
        CHECK(out.dist.cov()(0, 0) == doctest::Approx(2.0));
    }
    {
        // Pooled sampling: draws from each component in proportion to weight,
        // logged at the anchor, reproduce the merged tangent moments.
        const GroupElement anchor = random_se2(rng, 2.0);
        const std::vector<WeightedCgd> two{
            {0.3, CGD(g.exp(random_in_ball(rng, 3, 0.3)) * anchor, random_spd(rng, 3, 0.005, 0.03))},
            {0.6, CGD(g.exp(random_in_ball(rng, 3, 0.3)) * anchor, random_spd(rng, 3, 0.005, 0.03))}};
        const TangentMerge tm = merge_in_tangent(two, anchor);
        CHECK(tm.weight == 0.3 + 0.6);
        const int n = 300000;
        Eigen::Vector3d s = Eigen::Vector3d::Zero();
        Eigen::Matrix3d ss = Eigen::Matrix3d::Zero();
        std::bernoulli_distribution pick_second(0.6 / 0.9);
        for (int k = 0; k < n; ++k) {
            const CGD& d = two[pick_second(rng) ? 1 : 0].dist;
            const Eigen::Vector3d x = dense(g.log(sample(d, rng) * anchor.inverse()));
            s += x;
            ss += x * x.transpose();
        }
        const Eigen::Vector3d mean = s / n;
        const Eigen::Matrix3d cov = ss / n - mean * mean.transpose();
        CHECK((mean - dense(tm.gaussian.mean)).norm() / tm.gaussian.mean.norm() < 0.05);
        CHECK((cov - dense(tm.gaussian.cov)).norm() / tm.gaussian.cov.norm() < 0.05);
    }
    CHECK_THROWS_AS(merge(std::vector<WeightedCgd>{}, g.identity()), std::invalid_argument);
}

TEST_CASE("reduction configuration") {
    ReductionConfig c;
    CHECK_NOTHROW(c.validate());
    c.max_components.reset();
    c.threshold.reset();
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ReductionConfig{};
    c.picking = Picking::West;
    c.strategy = TangentStrategy::GlobalMin;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ReductionConfig{};
    c.threshold = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ReductionConfig{};
    c.max_components = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    CHECK(parse_strategy("tmax") == TangentStrategy::GlobalMax);
    CHECK(parse_picking("WEST") == Picking::West);
    CHECK(to_string(parse_strategy("TS")) == "TS");
    CHECK_THROWS(parse_strategy("TX"));
    CHECK_THROWS(parse_picking("greedy"));
}

TEST_CASE("reduce leaves small enough mixtures unchanged") {
    Rng rng(10);
    Mixture m(Group::se2());
    for (int k = 0; k < 5; ++k) m.add(uniform(rng, 0.1, 1), CGD(random_se2(rng, 50), random_spd(rng, 3, 0.01, 0.1)));
    ReductionConfig c;
    c.max_components = 5;
    c.threshold.reset();
    for (Picking p : {Picking::ExhaustivePairwise, Picking::West}) {
        c.picking = p;
        const Mixture r = reduce(m, c);
        REQUIRE(r.size() == 5);
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(r[k].weight == m[k].weight);
            CHECK(r[k].dist.mean() == m[k].dist.mean());
        }
    }
}

TEST_CASE("reduce on Euclidean groups equals flat Gaussian-mixture reduction") {
    Rng rng(11);
    for (int dim : {1, 3, 6}) {
        const Group g = Group::euclidean(dim);
        for (int trial = 0; trial < 10; ++trial) {
            const auto flat = random_flat_mixture(rng, dim, 2 + trial, 1.5);
            const Mixture m = to_mixture(g, flat);
            for (Picking p : {Picking::ExhaustivePairwise, Picking::West}) {
                for (TangentStrategy s : {TangentStrategy::PairwiseLarger, TangentStrategy::PairwiseSmaller,
                                          TangentStrategy::Identity, TangentStrategy::GlobalMax,
                                          TangentStrategy::GlobalMin}) {
                    if (p == Picking::West && s == TangentStrategy::GlobalMin) continue;
                    ReductionConfig c;
                    c.picking = p;
                    c.strategy = s;
                    c.max_components = 1 + trial / 2;
                    c.threshold = 0.5;
                    const auto expected = oracle::reduce_flat(
                        flat, p == Picking::West ? oracle::Pick::West : oracle::Pick::Exhaustive, c.max_components,
                        c.threshold);
                    CHECK(mixture_gap(reduce(m, c), expected) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("near-duplicate components merge first") {
    const Group g = Group::se2();
    Rng rng(13);
    const CGD base(random_se2(rng, 20), diag({0.05, 0.05, 0.02}));
    const GroupElement nudged = g.exp(random_vector(rng, 3, 1e-3)) * base.mean();
    const CGD far(g.exp(vec({5, -3, 1})) * base.mean(), diag({0.05, 0.05, 0.02}));
    Mixture m(g);
    m.add(0.4, base);
    m.add(0.5, far);
    m.add(0.45, CGD(nudged, base.cov()));
    CHECK(skl(0.4, base, 0.45, m[2].dist, base.mean()) < 1e-2);
    CHECK(skl(0.4, base, 0.5, far, base.mean()) > 10);
    for (Picking p : {Picking::ExhaustivePairwise, Picking::West}) {
        ReductionConfig c;
        c.picking = p;
        c.max_components = 2;
        c.threshold.reset();
        const Mixture r = reduce(m, c);
        REQUIRE(r.size() == 2);
        CHECK(r[0].weight == doctest::Approx(0.85));
        CHECK(r[1].weight == 0.5);
        CHECK(r[1].dist.mean() == far.mean());
    }
}

TEST_CASE("reduce preserves weight and respects the stopping rules") {
    const Group g = Group::se2();
    Rng rng(14);
    Mixture m(g);
    for (int k = 0; k < 40; ++k) {
        const GroupElement centre = se2(20.0 * (k % 4), 0, 0.5 * (k % 4));
        m.add(uniform(rng, 0.01, 1), CGD(g.exp(random_vector(rng, 3, 0.3)) * centre, random_spd(rng, 3, 0.01, 0.2)));
    }
    for (Picking p : {Picking::ExhaustivePairwise, Picking::West}) {
        for (TangentStrategy s : {TangentStrategy::PairwiseLarger, TangentStrategy::PairwiseSmaller,
                                  TangentStrategy::Identity, TangentStrategy::GlobalMax, TangentStrategy::GlobalMin}) {
            if (p == Picking::West && s == TangentStrategy::GlobalMin) continue;
            ReductionConfig c;
            c.picking = p;
            c.strategy = s;
            c.max_components = 10;
            c.threshold = 0.05;
            const Mixture r = reduce(m, c);
            CHECK(r.size() <= 10);
            CHECK(std::abs(r.total_weight() - m.total_weight()) <= 1e-12);

            c.max_components.reset();
            const Mixture t = reduce(m, c);
            CHECK(t.size() <= m.size());
            CHECK(std::abs(t.total_weight() - m.total_weight()) <= 1e-12);
            // Under the threshold rule no remaining pair is mergeable for the
            // exhaustive algorithm.
            if (p == Picking::ExhaustivePairwise && t.size() > 1) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < t.size(); ++i)
                    for (std::size_t j = i + 1; j < t.size(); ++j)
                        best = std::min(best, skl(t[i].weight, t[i].dist, t[j].weight, t[j].dist,
                                                  select_anchor(s, t, {i, j})));
                CHECK(best > 0.05);
            }
            CHECK(reduce(m, c).size() == t.size());
        }
    }
}

TEST_CASE("anchor sensitivity of the divergence is second order") {
    const Group g = Group::se2();
    Rng rng(15);
    const GroupElement centre = random_se2(rng, 3.0);
    const Vector di = random_in_ball(rng, 3, 0.3).normalized() * 0.15;
    const Vector dj = random_in_ball(rng, 3, 0.3).normalized() * 0.15;
    const Vector da = random_in_ball(rng, 3, 0.3).normalized() * 0.15;
    const Matrix ci = random_spd(rng, 3, 0.01, 0.05);
    const Matrix cj = random_spd(rng, 3, 0.01, 0.05);
    std::vector<double> gaps;
    for (double s : {1.0, 0.5, 0.25, 0.125}) {
        const CGD i(g.exp(s * di) * centre, ci);
        const CGD j(g.exp(s * dj) * centre, cj);
        const double k1 = kl_cgd(i, j, i.mean());
        const double k2 = kl_cgd(i, j, g.exp(s * da) * centre);
        gaps.push_back(std::abs(k1 - k2));
    }
    for (std::size_t k = 1; k < gaps.size(); ++k) CHECK(gaps[k] < 0.35 * gaps[k - 1]);
}
