#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "liemix/cgd.hpp"

namespace liemix {

/// Where the tangent space hosting divergences and merges is placed.
enum class TangentStrategy {
    PairwiseLarger,   // T_L: mean of the heavier member of the pair
    PairwiseSmaller,  // T_S: mean of the lighter member of the pair
    Identity,         // T_Id: group identity
    GlobalMax,        // T_Max: mean of the heaviest component in the mixture
    GlobalMin,        // T_Min: mean of the lightest component in the mixture
};

enum class Picking {
    ExhaustivePairwise,  // merge the globally closest pair
    West,                // merge the lightest mergeable component with its closest partner
};

/**
 * Merging continues while the component count exceeds `max_components` or
 * the best candidate's sKL is at most `threshold`. At least one rule must be
 * set.
 */
struct ReductionConfig {
    Picking picking = Picking::ExhaustivePairwise;
    TangentStrategy strategy = TangentStrategy::PairwiseLarger;
    std::optional<std::size_t> max_components = 100;
    std::optional<double> threshold = 0.05;
    /// Diagonal jitter applied when re-validating merged covariances (0 = off).
    double spd_jitter = 0.0;

    /// Throws std::invalid_argument for an inconsistent configuration.
    void validate() const;
};

std::string to_string(TangentStrategy s);
std::string to_string(Picking p);
/// Accepts TL, TS, TId, TMax, TMin (case-insensitive).
TangentStrategy parse_strategy(std::string_view s);
/// Accepts exhaustive, west (case-insensitive).
Picking parse_picking(std::string_view s);

/// Closed-form KL(a || b) between Gaussians sharing a tangent space.
/// Throws std::invalid_argument when the anchors differ.
double kl_gaussian(const TangentGaussian& a, const TangentGaussian& b);

/// KL divergence between two CGDs, both unfolded about `anchor`.
double kl_cgd(const CGD& i, const CGD& j, const GroupElement& anchor);

/// Scaled symmetrized KL:
/// 0.5 ((w_i - w_j) log(w_i / w_j) + w_i KL(i, j) + w_j KL(j, i)).
double skl(double w_i, const CGD& i, double w_j, const CGD& j, const GroupElement& anchor);

/// Anchor used for the pair (first, second) of `mixture` under `strategy`.
/// Weight ties go to the lower index.
GroupElement select_anchor(TangentStrategy strategy, const Mixture& mixture,
                           std::pair<std::size_t, std::size_t> pair);

/// Moment-preserving merge of `components` in the tangent space at `anchor`,
/// mapped back to the group. The merged weight is the sum of the weights.
WeightedCgd merge(std::span<const WeightedCgd> components, const GroupElement& anchor, double jitter = 0.0);

/// Merge statistics in the tangent space at `anchor`, before folding.
struct TangentMerge {
    double weight;
    TangentGaussian gaussian;
};
TangentMerge merge_in_tangent(std::span<const WeightedCgd> components, const GroupElement& anchor);

/// Reduces `mixture` by repeated pick-and-merge until the stopping rule holds.
/// Deterministic for a given component order. The merged component takes the
/// lower index of its pair.
Mixture reduce(const Mixture& mixture, const ReductionConfig& config);

}  // namespace liemix
