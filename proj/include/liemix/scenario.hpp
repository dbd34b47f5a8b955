#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "liemix/cgd.hpp"
#include "liemix/linalg.hpp"

namespace liemix {

struct Region {
    double x_min = 0.0, x_max = 100.0;
    double y_min = 0.0, y_max = 100.0;

    double area() const { return (x_max - x_min) * (y_max - y_min); }
};

struct MeasurementNoise {
    double sigma_xy = 0.5;   // m, per translation axis
    double sigma_phi = 0.1;  // rad
};

/// Random multitarget scenario on SE(2) x R^3. Defaults follow the
/// published experiment where it states a value.
struct ScenarioConfig {
    int steps = 100;
    std::array<int, 2> n0_range{5, 7};  // initial target count, uniform over the closed interval
    double p_S = 0.975;
    double birth_rate = 0.25;  // lambda_b, Poisson births per step
    double clutter_rate = 5.0;  // lambda_Z, Poisson false alarms per step
    double p_D = 0.975;
    MeasurementNoise meas_noise{};
    double dt = 1.0;
    Region region{};
    /// Mean and covariance of body velocities [v_x, v_y, omega] for new targets.
    Eigen::Vector3d velocity_mean{1.0, 0.0, 0.0};
    Eigen::Matrix3d velocity_prior = Eigen::Vector3d(0.25, 0.01, 0.01).asDiagonal();
    /// Process-noise standard deviations [x, y, theta, v_x, v_y, omega].
    Eigen::Matrix<double, 6, 1> process_noise_std = (Eigen::Matrix<double, 6, 1>() << 0.1, 0.1, 0.02, 0.1, 0.1, 0.1).finished();
    std::uint64_t seed = 1;

    void validate() const;
    Matrix process_noise() const;
    Matrix measurement_noise() const;
};

struct TruthTrack {
    int birth_step = 0;
    int death_step = 0;  // last step the target exists (inclusive)
    std::vector<GroupElement> states;  // states[k - birth_step], on SE(2) x R^3
};

struct Scenario {
    int steps = 0;
    std::vector<TruthTrack> tracks;
    std::vector<std::vector<GroupElement>> measurements;  // per step, on SE(2)

    std::vector<GroupElement> truth_states(int step) const;
    /// Poses (SE(2) part) of the targets alive at `step`.
    std::vector<GroupElement> truth_poses(int step) const;
    /// FNV-1a over every stored number; equal scenarios hash equal.
    std::uint64_t hash() const;
};

/// Deterministic given cfg.seed.
Scenario generate_scenario(const ScenarioConfig& cfg);

/// Seed of scenario `index` in a batch with `master` seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// SE(2) part of a state on SE(2) x R^3.
GroupElement pose_of(const GroupElement& state);

/// Plain-text scenario format; see README.
void write_scenario(std::ostream& os, const Scenario& s);
Scenario read_scenario(std::istream& is);

}  // namespace liemix
