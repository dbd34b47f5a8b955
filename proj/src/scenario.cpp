#include "liemix/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "liemix/errors.hpp"
#include "liemix/lg_ekf.hpp"

namespace liemix {

namespace {

constexpr int kFormatVersion = 1;

bool is_probability(double p) { return p > 0.0 && p <= 1.0; }

/// Mirrors `v` into [lo, hi]; returns the number of reflections.
int reflect(double& v, double lo, double hi) {
    int flips = 0;
    while (v < lo || v > hi) {
        v = v < lo ? 2.0 * lo - v : 2.0 * hi - v;
        ++flips;
    }
    return flips;
}

/// Keeps the pose inside the region. A wall parallel to the y axis maps the
/// heading theta to pi - theta, a wall parallel to the x axis to -theta; both
/// reverse the lateral and angular body velocities.
ParamVector reflect_into(ParamVector p, const Region& r) {
    const int fx = reflect(p(0), r.x_min, r.x_max);
    const int fy = reflect(p(1), r.y_min, r.y_max);
    for (int i = 0; i < fx; ++i) p(2) = std::numbers::pi - p(2);
    for (int i = 0; i < fy; ++i) p(2) = -p(2);
    if ((fx + fy) % 2 == 1) {
        p(4) = -p(4);
        p(5) = -p(5);
    }
    p(2) = wrap_angle(p(2));
    return p;
}

class GaussianDraw {
public:
    explicit GaussianDraw(const Matrix& cov) : l_(checked_cholesky(cov, "scenario noise").matrixL()) {}

    Vector operator()(Rng& rng) const {
        std::normal_distribution<double> n01;
        Vector e(l_.rows());
        for (int i = 0; i < e.size(); ++i) e(i) = n01(rng);
        return l_ * e;
    }

private:
    Matrix l_;
};

struct Generator {
    const ScenarioConfig& cfg;
    Rng rng;
    Group state_group = pose_velocity_group();
    Group se2 = Group::se2();
    GaussianDraw velocity;
    Eigen::Vector3d velocity_mean;
    GaussianDraw process;
    GaussianDraw meas;

    explicit Generator(const ScenarioConfig& c)
        : cfg(c),
          rng(c.seed),
          velocity(Matrix(c.velocity_prior)),
          velocity_mean(c.velocity_mean),
          process(c.process_noise()),
          meas(c.measurement_noise()) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

    ParamVector random_pose() {
        ParamVector p(3);
        p << uniform(cfg.region.x_min, cfg.region.x_max), uniform(cfg.region.y_min, cfg.region.y_max),
            wrap_angle(uniform(-std::numbers::pi, std::numbers::pi));
        return p;
    }

    GroupElement new_target() {
        ParamVector p(6);
        p.head<3>() = random_pose();
        p.tail<3>() = velocity_mean + velocity(rng);
        return state_group.from_params(p);
    }

    GroupElement propagate(const GroupElement& x) {
        const GroupElement moved = state_group.exp(process(rng)) * cv_transition(x, cfg.dt);
        return state_group.from_params(reflect_into(moved.params(), cfg.region));
    }

    GroupElement measure(const GroupElement& x) { return se2.exp(meas(rng)) * pose_of(x); }

    GroupElement clutter() { return se2.from_params(random_pose()); }
};

void fnv(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ULL;
    }
}

void fnv_params(std::uint64_t& h, const GroupElement& x) {
    for (int i = 0; i < x.params().size(); ++i) {
        const double v = x.params()(i);
        fnv(h, &v, sizeof v);
    }
}

std::string expect_keyword(std::istream& is, const char* keyword) {
    std::string tok;
    if (!(is >> tok) || tok != keyword) throw ParseError(std::string("scenario file: expected '") + keyword + "', got '" + tok + "'");
    return tok;
}

template <typename T>
T read_value(std::istream& is, const char* what) {
    T v{};
    if (!(is >> v)) throw ParseError(std::string("scenario file: cannot read ") + what);
    return v;
}

GroupElement read_element(std::istream& is, const Group& g) {
    ParamVector p(g.param_dim());
    for (int i = 0; i < p.size(); ++i) p(i) = read_value<double>(is, "element parameter");
    return g.from_params(p);
}

void write_element(std::ostream& os, const GroupElement& x) {
    char buf[32];
    for (int i = 0; i < x.params().size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", x.params()(i));
        os << (i ? " " : "") << buf;
    }
    os << '\n';
}

}  // namespace

void ScenarioConfig::validate() const {
    if (steps < 0) throw std::invalid_argument("ScenarioConfig: steps must be >= 0");
    if (n0_range[0] < 0 || n0_range[1] < n0_range[0]) throw std::invalid_argument("ScenarioConfig: invalid n0_range");
    if (!(birth_rate >= 0.0) || !(clutter_rate >= 0.0)) throw std::invalid_argument("ScenarioConfig: rates must be >= 0");
    if (!is_probability(p_S) || !is_probability(p_D))
        throw std::invalid_argument("ScenarioConfig: probabilities must lie in (0, 1]");
    if (!(meas_noise.sigma_xy > 0.0) || !(meas_noise.sigma_phi > 0.0))
        throw std::invalid_argument("ScenarioConfig: measurement noise must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("ScenarioConfig: dt must be positive");
    if (!(region.x_max > region.x_min) || !(region.y_max > region.y_min))
        throw std::invalid_argument("ScenarioConfig: region is degenerate");
    checked_cholesky(Matrix(velocity_prior), "velocity_prior");
    if (!(process_noise_std.array() > 0.0).all()) throw std::invalid_argument("ScenarioConfig: process noise must be positive");
}

Matrix ScenarioConfig::process_noise() const {
    return Matrix(process_noise_std.array().square().matrix().asDiagonal());
}

Matrix ScenarioConfig::measurement_noise() const {
    const double sxy = meas_noise.sigma_xy * meas_noise.sigma_xy;
    const double sphi = meas_noise.sigma_phi * meas_noise.sigma_phi;
    return Matrix(Eigen::Vector3d(sxy, sxy, sphi).asDiagonal());
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(master) ^ index);
}

GroupElement pose_of(const GroupElement& state) {
    if (state.group() != pose_velocity_group())
        throw DimensionError("pose_of: expected a state on SE2xR3, got " + state.group().name());
    return Group::se2().from_params(state.params().head<3>());
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    Generator gen(cfg);
    Scenario s;
    s.steps = cfg.steps;
    s.measurements.resize(cfg.steps);
    if (cfg.steps == 0) return s;

    std::vector<std::size_t> alive;
    const int n0 = std::uniform_int_distribution<int>(cfg.n0_range[0], cfg.n0_range[1])(gen.rng);
    for (int i = 0; i < n0; ++i) {
        s.tracks.push_back(TruthTrack{0, 0, {gen.new_target()}});
        alive.push_back(s.tracks.size() - 1);
    }

    std::bernoulli_distribution survive(cfg.p_S), detect(cfg.p_D);
    auto poisson = [&gen](double rate) { return rate > 0.0 ? std::poisson_distribution<int>(rate)(gen.rng) : 0; };
    for (int k = 0; k < cfg.steps; ++k) {
        if (k > 0) {
            std::vector<std::size_t> next;
            for (std::size_t t : alive) {
                if (!survive(gen.rng)) continue;
                TruthTrack& track = s.tracks[t];
                track.states.push_back(gen.propagate(track.states.back()));
                track.death_step = k;
                next.push_back(t);
            }
            const int nb = poisson(cfg.birth_rate);
            for (int i = 0; i < nb; ++i) {
                s.tracks.push_back(TruthTrack{k, k, {gen.new_target()}});
                next.push_back(s.tracks.size() - 1);
            }
            alive = std::move(next);
        }
        std::vector<GroupElement>& z = s.measurements[k];
        for (std::size_t t : alive)
            if (detect(gen.rng)) z.push_back(gen.measure(s.tracks[t].states.back()));
        const int nc = poisson(cfg.clutter_rate);
        for (int i = 0; i < nc; ++i) z.push_back(gen.clutter());
        std::shuffle(z.begin(), z.end(), gen.rng);
    }
    return s;
}

std::vector<GroupElement> Scenario::truth_states(int step) const {
    std::vector<GroupElement> out;
    for (const TruthTrack& t : tracks)
        if (t.birth_step <= step && step <= t.death_step) out.push_back(t.states[step - t.birth_step]);
    return out;
}

std::vector<GroupElement> Scenario::truth_poses(int step) const {
    std::vector<GroupElement> out;
    for (const GroupElement& x : truth_states(step)) out.push_back(pose_of(x));
    return out;
}

std::uint64_t Scenario::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    fnv(h, &steps, sizeof steps);
    for (const TruthTrack& t : tracks) {
        fnv(h, &t.birth_step, sizeof t.birth_step);
        fnv(h, &t.death_step, sizeof t.death_step);
        for (const GroupElement& x : t.states) fnv_params(h, x);
    }
    for (const auto& z : measurements) {
        const std::size_t n = z.size();
        fnv(h, &n, sizeof n);
        for (const GroupElement& x : z) fnv_params(h, x);
    }
    return h;
}

void write_scenario(std::ostream& os, const Scenario& s) {
    os << "format_version " << kFormatVersion << '\n';
    os << "state_group " << pose_velocity_group().name() << '\n';
    os << "measurement_group " << Group::se2().name() << '\n';
    os << "steps " << s.steps << '\n';
    os << "tracks " << s.tracks.size() << '\n';
    for (const TruthTrack& t : s.tracks) {
        os << "track " << t.birth_step << ' ' << t.death_step << '\n';
        for (const GroupElement& x : t.states) write_element(os, x);
    }
    for (int k = 0; k < s.steps; ++k) {
        os << "scan " << k << ' ' << s.measurements[k].size() << '\n';
        for (const GroupElement& z : s.measurements[k]) write_element(os, z);
    }
}

Scenario read_scenario(std::istream& is) {
    expect_keyword(is, "format_version");
    const int version = read_value<int>(is, "format_version");
    if (version != kFormatVersion) throw ParseError("scenario file: unsupported format_version " + std::to_string(version));
    expect_keyword(is, "state_group");
    const Group state_group = Group::parse(read_value<std::string>(is, "state group"));
    expect_keyword(is, "measurement_group");
    const Group meas_group = Group::parse(read_value<std::string>(is, "measurement group"));
    if (state_group != pose_velocity_group() || meas_group != Group::se2())
        throw ParseError("scenario file: only SE2xR3 states with SE2 measurements are supported");

    Scenario s;
    expect_keyword(is, "steps");
    s.steps = read_value<int>(is, "steps");
    if (s.steps < 0) throw ParseError("scenario file: negative step count");
    expect_keyword(is, "tracks");
    const auto n_tracks = read_value<std::size_t>(is, "track count");
    for (std::size_t i = 0; i < n_tracks; ++i) {
        expect_keyword(is, "track");
        TruthTrack t;
        t.birth_step = read_value<int>(is, "birth step");
        t.death_step = read_value<int>(is, "death step");
        if (t.birth_step < 0 || t.death_step < t.birth_step || t.death_step >= s.steps)
            throw ParseError("scenario file: invalid track lifetime");
        for (int k = t.birth_step; k <= t.death_step; ++k) t.states.push_back(read_element(is, state_group));
        s.tracks.push_back(std::move(t));
    }
    s.measurements.resize(s.steps);
    for (int k = 0; k < s.steps; ++k) {
        expect_keyword(is, "scan");
        if (read_value<int>(is, "scan index") != k) throw ParseError("scenario file: scans out of order");
        const auto n = read_value<std::size_t>(is, "measurement count");
        for (std::size_t j = 0; j < n; ++j) s.measurements[k].push_back(read_element(is, meas_group));
    }
    return s;
}

}  // namespace liemix
