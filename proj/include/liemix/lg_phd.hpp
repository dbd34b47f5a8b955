#pragma once

#include <cstddef>
#include <vector>

#include "liemix/cgd.hpp"
#include "liemix/lg_ekf.hpp"
#include "liemix/reduction.hpp"

namespace liemix {

struct PhdConfig {
    double p_S = 0.975;
    double p_D = 0.975;
    /// Clutter density per unit measurement volume (kappa).
    double clutter_intensity = 0.0;
    Mixture birth{pose_velocity_group()};
    double prune_threshold = 1e-5;
    ReductionConfig reduction{};
    double extract_threshold = 0.5;

    void validate() const;
};

/**
 * CGD-mixture intensity of the PHD filter. Unlike Mixture, weights may be
 * zero between an update and the following prune (e.g. missed-detection
 * terms when p_D = 1); pruning restores strict positivity.
 */
class Intensity {
public:
    explicit Intensity(Group group) : group_(std::move(group)) {}
    explicit Intensity(const Mixture& mixture);

    const Group& group() const { return group_; }
    const std::vector<WeightedCgd>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    bool empty() const { return components_.empty(); }
    const WeightedCgd& operator[](std::size_t i) const { return components_[i]; }
    double total_weight() const;

    /// Requires weight >= 0.
    void add(double weight, CGD dist);
    /// Components with weight >= threshold (and > 0) as a Mixture.
    Mixture to_mixture(double threshold = 0.0) const;

private:
    Group group_;
    std::vector<WeightedCgd> components_;
};

/// Survival-weighted EKF prediction of every component, then the birth
/// mixture appended unchanged.
Intensity phd_predict(const Intensity& d, const PhdConfig& cfg, const MotionModel& model);

struct PhdUpdateStats {
    std::size_t skipped = 0;  // component/measurement pairs dropped on a numerical failure
};

/// Missed-detection copies first, then one EKF-updated block per measurement:
/// w = p_D w_i q_i(z) / (kappa + p_D sum_l w_l q_l(z)).
Intensity phd_update(const Intensity& d, const std::vector<GroupElement>& measurements, const PhdConfig& cfg,
                     const MeasurementModel& model, PhdUpdateStats* stats = nullptr);

/// Drops components below cfg.prune_threshold, then reduces with cfg.reduction.
Intensity prune_reduce(const Intensity& d, const PhdConfig& cfg);

/// Means of components above cfg.extract_threshold; a component with
/// weight > 1.5 contributes round(weight) copies.
std::vector<GroupElement> extract(const Intensity& d, const PhdConfig& cfg);

}  // namespace liemix
