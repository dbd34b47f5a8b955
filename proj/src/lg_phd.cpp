#include "liemix/lg_phd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "liemix/diagnostics.hpp"
#include "liemix/errors.hpp"

namespace liemix {

void PhdConfig::validate() const {
    if (!(p_S > 0.0 && p_S <= 1.0)) throw std::invalid_argument("phd: p_S must lie in (0, 1]");
    if (!(p_D > 0.0 && p_D <= 1.0)) throw std::invalid_argument("phd: p_D must lie in (0, 1]");
    if (!(clutter_intensity >= 0.0)) throw std::invalid_argument("phd: clutter intensity must be >= 0");
    if (!(prune_threshold >= 0.0)) throw std::invalid_argument("phd: prune threshold must be >= 0");
    if (!(extract_threshold > 0.0 && extract_threshold <= 1.0))
        throw std::invalid_argument("phd: extract threshold must lie in (0, 1]");
    reduction.validate();
}

Intensity::Intensity(const Mixture& mixture) : group_(mixture.group()), components_(mixture.components()) {}

double Intensity::total_weight() const {
    double s = 0.0;
    for (const auto& c : components_) s += c.weight;
    return s;
}

void Intensity::add(double weight, CGD dist) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw std::invalid_argument("Intensity: weights must be >= 0");
    if (dist.group() != group_) throw DimensionError("Intensity: component group mismatch");
    components_.push_back({weight, std::move(dist)});
}

Mixture Intensity::to_mixture(double threshold) const {
    Mixture m(group_);
    for (const auto& c : components_)
        if (c.weight > 0.0 && c.weight >= threshold) m.add(c.weight, c.dist);
    return m;
}

Intensity phd_predict(const Intensity& d, const PhdConfig& cfg, const MotionModel& model) {
    if (!cfg.birth.empty() && cfg.birth.group() != d.group())
        throw DimensionError("phd_predict: birth mixture lives on a different group");
    Intensity out(d.group());
    for (const auto& c : d.components()) out.add(cfg.p_S * c.weight, ekf_predict(c.dist, model));
    for (const auto& b : cfg.birth) out.add(b.weight, b.dist);
    return out;
}

namespace {

double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

Intensity phd_update(const Intensity& d, const std::vector<GroupElement>& measurements, const PhdConfig& cfg,
                     const MeasurementModel& model, PhdUpdateStats* stats) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    Intensity out(d.group());
    for (const auto& c : d.components()) out.add((1.0 - cfg.p_D) * c.weight, c.dist);

    const double log_kappa = cfg.clutter_intensity > 0.0 ? std::log(cfg.clutter_intensity) : neg_inf;
    std::vector<double> log_terms(d.size());
    std::vector<std::optional<CGD>> posts(d.size());
    for (const auto& z : measurements) {
        double log_sum = neg_inf;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const auto& c = d[i];
            posts[i].reset();
            log_terms[i] = neg_inf;
            if (!(c.weight > 0.0)) {
                posts[i] = c.dist;
                continue;
            }
            try {
                UpdateResult u = ekf_update(c.dist, z, model);
                posts[i] = std::move(u.posterior);
                if (!u.gated_out) log_terms[i] = std::log(cfg.p_D * c.weight) + u.log_likelihood;
            } catch (const std::runtime_error& e) {
                if (stats) ++stats->skipped;
                warn("phd_update", std::string("component skipped: ") + e.what());
                posts[i] = c.dist;
            } catch (const std::domain_error& e) {
                if (stats) ++stats->skipped;
                warn("phd_update", std::string("component skipped: ") + e.what());
                posts[i] = c.dist;
            }
            log_sum = log_add_exp(log_sum, log_terms[i]);
        }
        const double log_den = log_add_exp(log_kappa, log_sum);
        for (std::size_t i = 0; i < d.size(); ++i) {
            double w = 0.0;
            if (log_terms[i] != neg_inf && log_den != neg_inf) w = std::exp(log_terms[i] - log_den);
            out.add(w, std::move(*posts[i]));
        }
    }
    return out;
}

Intensity prune_reduce(const Intensity& d, const PhdConfig& cfg) {
    Mixture kept = d.to_mixture(cfg.prune_threshold);
    if (kept.size() < 2) return Intensity(kept);
    return Intensity(reduce(kept, cfg.reduction));
}

std::vector<GroupElement> extract(const Intensity& d, const PhdConfig& cfg) {
    std::vector<GroupElement> out;
    for (const auto& c : d.components()) {
        if (!(c.weight > cfg.extract_threshold)) continue;
        const long copies = c.weight > 1.5 ? std::lround(c.weight) : 1;
        for (long k = 0; k < copies; ++k) out.push_back(c.dist.mean());
    }
    return out;
}

}  // namespace liemix
