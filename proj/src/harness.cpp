#include "liemix/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace liemix {

namespace {

std::string cell_name(const GridCell& c) { return to_string(c.picking) + "/" + to_string(c.strategy); }

/**
 * Tangent covariance of a birth component at position (x, y) whose world
 * position and heading errors are independent. A left perturbation exp(xi)
 * moves the position by rho + theta (-y, x) to first order, so
 * rho = dp + dtheta (y, -x).
 */
Matrix birth_covariance(double x, double y, const BirthModelConfig& birth, const Eigen::Matrix3d& velocity_prior) {
    Matrix world = Matrix::Zero(6, 6);
    world(0, 0) = world(1, 1) = birth.position_std * birth.position_std;
    world(2, 2) = birth.orientation_std * birth.orientation_std;
    world.block(3, 3, 3, 3) = velocity_prior;
    Matrix t = Matrix::Identity(6, 6);
    t(0, 2) = y;
    t(1, 2) = -x;
    return symmetrize(t * world * t.transpose());
}

}  // namespace

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double uniform_clutter_intensity(const ScenarioConfig& cfg) {
    return cfg.clutter_rate / (cfg.region.area() * 2.0 * std::numbers::pi);
}

Mixture make_birth_mixture(const ScenarioConfig& cfg, const BirthModelConfig& birth) {
    if (!(birth.position_std > 0.0) || !(birth.orientation_std > 0.0))
        throw std::invalid_argument("birth model: standard deviations must be positive");
    const Group g = pose_velocity_group();
    Mixture m(g);
    const double rate = birth.rate.value_or(cfg.birth_rate);
    if (rate < 0.0) throw std::invalid_argument("birth model: rate must be >= 0");
    if (rate == 0.0) return m;
    const Region& r = cfg.region;
    const double xs[2] = {r.x_min + 0.25 * (r.x_max - r.x_min), r.x_min + 0.75 * (r.x_max - r.x_min)};
    const double ys[2] = {r.y_min + 0.25 * (r.y_max - r.y_min), r.y_min + 0.75 * (r.y_max - r.y_min)};
    for (double y : ys) {
        for (double x : xs) {
            ParamVector p(6);
            p << x, y, 0.0, cfg.velocity_mean;
            m.add(rate / 4.0, CGD(g.from_params(p), birth_covariance(x, y, birth, cfg.velocity_prior)));
        }
    }
    return m;
}

PhdConfig make_phd_config(const ExperimentConfig& cfg) {
    PhdConfig phd;
    phd.p_S = cfg.phd.p_S.value_or(cfg.scenario.p_S);
    phd.p_D = cfg.phd.p_D.value_or(cfg.scenario.p_D);
    phd.clutter_intensity = cfg.phd.clutter_intensity.value_or(uniform_clutter_intensity(cfg.scenario));
    phd.birth = make_birth_mixture(cfg.scenario, cfg.phd.birth);
    phd.prune_threshold = cfg.phd.prune_threshold;
    phd.extract_threshold = cfg.phd.extract_threshold;
    phd.reduction = cfg.phd.reduction;
    phd.validate();
    return phd;
}

MotionModel make_motion_model(const ScenarioConfig& cfg) {
    return constant_velocity_model(cfg.dt, cfg.process_noise());
}

MeasurementModel make_measurement_model(const ScenarioConfig& cfg) {
    return pose_measurement_model(cfg.measurement_noise());
}

double RunResult::mean_components() const {
    if (steps.empty()) return 0.0;
    double sum = 0.0;
    for (const StepDiagnostics& d : steps) sum += static_cast<double>(d.components);
    return sum / static_cast<double>(steps.size());
}

RunResult run_filter(const Scenario& s, const PhdConfig& phd_in, const ReductionConfig& reduction,
                     const OspaConfig& ospa_cfg, const MotionModel& motion, const MeasurementModel& measurement) {
    PhdConfig phd = phd_in;
    phd.reduction = reduction;
    phd.validate();
    ospa_cfg.validate();

    RunResult out;
    out.ospa.reserve(s.steps);
    out.steps.reserve(s.steps);
    Intensity d(pose_velocity_group());
    const auto start = std::chrono::steady_clock::now();
    for (int k = 0; k < s.steps; ++k) {
        try {
            const std::vector<GroupElement>& z = s.measurements.at(k);
            StepDiagnostics diag;
            const Intensity predicted = phd_predict(d, phd, motion);
            diag.predicted = predicted.size();
            PhdUpdateStats stats;
            const Intensity updated = phd_update(predicted, z, phd, measurement, &stats);
            diag.before_reduction = updated.size();
            diag.skipped = stats.skipped;
            diag.weight_sum = updated.total_weight();
            d = prune_reduce(updated, phd);
            diag.components = d.size();
            diag.weight_sum_reduced = d.total_weight();

            std::vector<GroupElement> estimates;
            for (const GroupElement& x : extract(d, phd)) estimates.push_back(pose_of(x));
            const std::vector<GroupElement> truths = s.truth_poses(k);
            diag.estimates = estimates.size();
            diag.truths = truths.size();
            out.ospa.push_back(ospa(estimates, truths, ospa_cfg));
            out.steps.push_back(diag);
        } catch (const std::exception& e) {
            throw std::runtime_error("run_filter: step " + std::to_string(k) + ": " + e.what());
        }
    }
    const auto stop = std::chrono::steady_clock::now();
    out.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    out.cumulative = out.ospa.empty() ? OspaResult{} : accumulate(out.ospa);
    return out;
}

RunResult run_filter(const Scenario& s, const ExperimentConfig& cfg) {
    return run_filter(s, make_phd_config(cfg), cfg.phd.reduction, cfg.ospa, make_motion_model(cfg.scenario),
                      make_measurement_model(cfg.scenario));
}

std::vector<GridCell> full_grid() {
    std::vector<GridCell> g;
    for (TangentStrategy t : {TangentStrategy::PairwiseLarger, TangentStrategy::PairwiseSmaller, TangentStrategy::Identity,
                              TangentStrategy::GlobalMax, TangentStrategy::GlobalMin})
        g.push_back({Picking::ExhaustivePairwise, t});
    for (TangentStrategy t :
         {TangentStrategy::PairwiseLarger, TangentStrategy::PairwiseSmaller, TangentStrategy::Identity, TangentStrategy::GlobalMax})
        g.push_back({Picking::West, t});
    return g;
}

BenchmarkResult run_benchmark(const ExperimentConfig& cfg, int n_scenarios, const std::vector<GridCell>& grid,
                              const ProgressCallback& progress) {
    if (n_scenarios < 1) throw std::invalid_argument("run_benchmark: n_scenarios must be >= 1");
    if (grid.empty()) throw std::invalid_argument("run_benchmark: empty grid");
    const PhdConfig phd = make_phd_config(cfg);
    const MotionModel motion = make_motion_model(cfg.scenario);
    const MeasurementModel measurement = make_measurement_model(cfg.scenario);

    BenchmarkResult r;
    std::vector<ReductionConfig> reductions;
    for (const GridCell& c : grid) {
        ReductionConfig red = cfg.phd.reduction;
        red.picking = c.picking;
        red.strategy = c.strategy;
        red.validate();
        reductions.push_back(red);
        r.cells.push_back(CellResult{c, {}, 0.0, 0.0, {}, {}});
    }
    std::vector<double> total_ms(grid.size(), 0.0), total_components(grid.size(), 0.0);
    double total_steps = 0.0;
    for (int i = 0; i < n_scenarios; ++i) {
        ScenarioConfig sc = cfg.scenario;
        sc.seed = derive_seed(cfg.scenario.seed, static_cast<std::uint64_t>(i));
        const Scenario s = generate_scenario(sc);
        const std::uint64_t h = s.hash();
        total_steps += s.steps;
        for (std::size_t c = 0; c < grid.size(); ++c) {
            RunResult run;
            try {
                run = run_filter(s, phd, reductions[c], cfg.ospa, motion, measurement);
            } catch (const std::exception& e) {
                throw std::runtime_error("run_benchmark: scenario " + std::to_string(i) + ", " + cell_name(grid[c]) + ": " +
                                         e.what());
            }
            r.cells[c].per_scenario.push_back(run.cumulative);
            r.cells[c].scenario_hashes.push_back(h);
            total_ms[c] += run.wall_ms;
            total_components[c] += run.mean_components() * s.steps;
        }
        if (progress) progress(i + 1, n_scenarios);
    }
    for (std::size_t c = 0; c < grid.size(); ++c) {
        r.cells[c].mean = accumulate(r.cells[c].per_scenario);
        r.cells[c].mean_components = total_steps > 0 ? total_components[c] / total_steps : 0.0;
        r.cells[c].mean_ms_per_step = total_steps > 0 ? total_ms[c] / total_steps : 0.0;
    }
    return r;
}

void write_benchmark_csv(std::ostream& os, const BenchmarkResult& r, bool with_timing) {
    os << "picking,strategy,D_t,D_d,D_c,mean_components,mean_ms_per_step\n";
    for (const CellResult& c : r.cells) {
        os << to_string(c.cell.picking) << ',' << to_string(c.cell.strategy) << ',' << format_number(c.mean.total) << ','
           << format_number(c.mean.localization) << ',' << format_number(c.mean.cardinality) << ','
           << format_number(c.mean_components) << ',' << (with_timing ? format_number(c.mean_ms_per_step) : "NA") << '\n';
    }
}

namespace {

/// Rounds to 6 significant digits so that JSON and CSV carry the same values.
double rounded(double v) { return std::stod(format_number(v)); }

}  // namespace

void write_benchmark_json(std::ostream& os, const BenchmarkResult& r, bool with_timing) {
    nlohmann::json rows = nlohmann::json::array();
    for (const CellResult& c : r.cells) {
        nlohmann::json row{{"picking", to_string(c.cell.picking)},
                           {"strategy", to_string(c.cell.strategy)},
                           {"D_t", rounded(c.mean.total)},
                           {"D_d", rounded(c.mean.localization)},
                           {"D_c", rounded(c.mean.cardinality)},
                           {"mean_components", rounded(c.mean_components)}};
        row["mean_ms_per_step"] = with_timing ? nlohmann::json(rounded(c.mean_ms_per_step)) : nlohmann::json(nullptr);
        rows.push_back(std::move(row));
    }
    os << rows.dump(2) << '\n';
}

void write_run_csv(std::ostream& os, const RunResult& r) {
    os << "step,D_t,D_d,D_c,estimates,truths,components_before_reduction,components,weight_sum\n";
    for (std::size_t k = 0; k < r.ospa.size(); ++k) {
        const StepDiagnostics& d = r.steps[k];
        os << k << ',' << format_number(r.ospa[k].total) << ',' << format_number(r.ospa[k].localization) << ','
           << format_number(r.ospa[k].cardinality) << ',' << d.estimates << ',' << d.truths << ',' << d.before_reduction
           << ',' << d.components << ',' << format_number(d.weight_sum) << '\n';
    }
}

void write_run_json(std::ostream& os, const RunResult& r) {
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t k = 0; k < r.ospa.size(); ++k) {
        const StepDiagnostics& d = r.steps[k];
        steps.push_back({{"step", k},
                         {"D_t", rounded(r.ospa[k].total)},
                         {"D_d", rounded(r.ospa[k].localization)},
                         {"D_c", rounded(r.ospa[k].cardinality)},
                         {"estimates", d.estimates},
                         {"truths", d.truths},
                         {"components_before_reduction", d.before_reduction},
                         {"components", d.components},
                         {"weight_sum", rounded(d.weight_sum)}});
    }
    nlohmann::json out{{"cumulative",
                        {{"D_t", rounded(r.cumulative.total)},
                         {"D_d", rounded(r.cumulative.localization)},
                         {"D_c", rounded(r.cumulative.cardinality)}}},
                       {"steps", std::move(steps)}};
    os << out.dump(2) << '\n';
}

SignTest paired_sign_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired_sign_test: samples differ in length");
    SignTest t;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) ++t.wins;
        else if (a[i] > b[i]) ++t.losses;
        else ++t.ties;
    }
    const int n = t.wins + t.losses;
    // P(X >= wins) for X ~ Binomial(n, 1/2), summed in log space.
    double p = 0.0;
    for (int k = t.wins; k <= n; ++k)
        p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
    t.p_value = std::min(1.0, p);
    return t;
}

}  // namespace liemix
