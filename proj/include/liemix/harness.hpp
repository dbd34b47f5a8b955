#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <vector>

#include "liemix/lg_ekf.hpp"
#include "liemix/lg_phd.hpp"
#include "liemix/ospa.hpp"
#include "liemix/reduction.hpp"
#include "liemix/scenario.hpp"

namespace liemix {

/// Four birth components at the quadrant centres of the region.
struct BirthModelConfig {
    /// Total birth weight per step; unset takes the scenario's birth rate.
    std::optional<double> rate;
    double position_std = 25.0;                   // m, per axis
    double orientation_std = std::numbers::pi / 2;  // rad
};

/// Filter parameters that are not implied by the scenario. Unset optionals
/// take the scenario's value (p_S, p_D) or its uniform clutter density.
struct FilterSettings {
    std::optional<double> p_S;
    std::optional<double> p_D;
    std::optional<double> clutter_intensity;
    BirthModelConfig birth{};
    double prune_threshold = 1e-5;
    double extract_threshold = 0.5;
    ReductionConfig reduction{};
};

struct ExperimentConfig {
    ScenarioConfig scenario{};
    FilterSettings phd{};
    OspaConfig ospa{};
};

/// lambda_Z / (region area * 2 pi): uniform over position and orientation.
double uniform_clutter_intensity(const ScenarioConfig& cfg);
Mixture make_birth_mixture(const ScenarioConfig& cfg, const BirthModelConfig& birth);
PhdConfig make_phd_config(const ExperimentConfig& cfg);
MotionModel make_motion_model(const ScenarioConfig& cfg);
MeasurementModel make_measurement_model(const ScenarioConfig& cfg);

struct StepDiagnostics {
    std::size_t predicted = 0;           // components after prediction, births included
    std::size_t before_reduction = 0;    // components after the update
    std::size_t components = 0;          // components after prune and reduce
    std::size_t skipped = 0;             // update pairs dropped on a numerical failure
    std::size_t estimates = 0;
    std::size_t truths = 0;
    double weight_sum = 0.0;             // after the update
    double weight_sum_reduced = 0.0;     // after prune and reduce
};

struct RunResult {
    std::vector<OspaResult> ospa;  // one per step
    std::vector<StepDiagnostics> steps;
    OspaResult cumulative;         // mean over steps
    double wall_ms = 0.0;
    double mean_components() const;
};

/// predict -> update -> prune_reduce -> extract at every step, scoring the
/// extracted poses against the true poses. `reduction` replaces
/// phd.reduction. A failure at step k is rethrown as std::runtime_error
/// naming k.
RunResult run_filter(const Scenario& s, const PhdConfig& phd, const ReductionConfig& reduction, const OspaConfig& ospa,
                     const MotionModel& motion, const MeasurementModel& measurement);

/// Convenience overload deriving the filter from an experiment config.
RunResult run_filter(const Scenario& s, const ExperimentConfig& cfg);

struct GridCell {
    Picking picking;
    TangentStrategy strategy;
};

/// The nine combinations studied: exhaustive with all five tangent
/// strategies, West with all but T_Min.
std::vector<GridCell> full_grid();

struct CellResult {
    GridCell cell;
    OspaResult mean;                          // mean of the per-scenario cumulative OSPA
    double mean_components = 0.0;
    double mean_ms_per_step = 0.0;
    std::vector<OspaResult> per_scenario;     // cumulative OSPA of each scenario
    std::vector<std::uint64_t> scenario_hashes;
};

struct BenchmarkResult {
    std::vector<CellResult> cells;  // grid order
};

using ProgressCallback = std::function<void(int scenario, int n_scenarios)>;

/**
 * Runs every grid cell on the same `n_scenarios` scenarios. Scenario i uses
 * seed derive_seed(cfg.scenario.seed, i); grid cells override the picking
 * and tangent strategy of cfg.phd.reduction.
 */
BenchmarkResult run_benchmark(const ExperimentConfig& cfg, int n_scenarios, const std::vector<GridCell>& grid,
                              const ProgressCallback& progress = {});

/// Header picking,strategy,D_t,D_d,D_c,mean_components,mean_ms_per_step and
/// one row per cell, 6 significant digits. Timing is written as NA unless
/// `with_timing`, which keeps the output reproducible byte for byte.
void write_benchmark_csv(std::ostream& os, const BenchmarkResult& r, bool with_timing);
void write_benchmark_json(std::ostream& os, const BenchmarkResult& r, bool with_timing);

void write_run_csv(std::ostream& os, const RunResult& r);
void write_run_json(std::ostream& os, const RunResult& r);

struct SignTest {
    int wins = 0;    // pairs with a < b
    int losses = 0;  // pairs with a > b
    int ties = 0;
    double p_value = 1.0;  // one-sided, P(X >= wins) for X ~ Binomial(wins + losses, 1/2)
};

/// Paired sign test of the hypothesis that `a` tends to be smaller than `b`.
SignTest paired_sign_test(const std::vector<double>& a, const std::vector<double>& b);

/// "%.6g"
std::string format_number(double v);

}  // namespace liemix
