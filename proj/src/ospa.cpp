#include "liemix/ospa.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "liemix/assignment.hpp"
#include "liemix/errors.hpp"

namespace liemix {

void OspaConfig::validate() const {
    if (!(cutoff > 0.0)) throw std::invalid_argument("ospa: cutoff must be > 0");
    if (!(order >= 1.0)) throw std::invalid_argument("ospa: order must be >= 1");
}

std::string to_string(BaseDistance b) { return b == BaseDistance::PositionOnly ? "position-only" : "pose-log-norm"; }

BaseDistance parse_base_distance(std::string_view s) {
    if (s == "pose-log-norm") return BaseDistance::PoseLogNorm;
    if (s == "position-only") return BaseDistance::PositionOnly;
    throw std::invalid_argument("unknown OSPA base distance '" + std::string(s) + "'");
}

namespace {

// Translation coordinates: the first two parameters of a leading SE(2)
// factor, or all parameters of a Euclidean group.
Eigen::VectorXd position_of(const GroupElement& x) {
    const Group& g = x.group();
    const std::string lead = g.factor(0).name();
    if (lead == "SE2") return x.params().head(2);
    if (!g.is_product() && lead.front() == 'R') return x.params();
    throw DimensionError("ospa: position-only distance needs an SE2 or Euclidean group, got " + g.name());
}

}  // namespace

double base_distance(const GroupElement& x, const GroupElement& y, BaseDistance kind) {
    if (x.group() != y.group()) throw DimensionError("ospa: elements live on different groups");
    if (kind == BaseDistance::PositionOnly) return (position_of(x) - position_of(y)).norm();
    try {
        return x.group().distance(x, y);
    } catch (const SingularLogError&) {
        return std::numeric_limits<double>::infinity();
    }
}

OspaResult ospa(const std::vector<GroupElement>& estimates, const std::vector<GroupElement>& truths,
                const OspaConfig& cfg) {
    cfg.validate();
    const std::vector<GroupElement>* small = &estimates;
    const std::vector<GroupElement>* large = &truths;
    if (small->size() > large->size()) std::swap(small, large);
    const std::size_t m = small->size(), n = large->size();
    OspaResult r;
    if (n == 0) return r;

    const double c = cfg.cutoff, p = cfg.order;
    double loc_sum = 0.0;
    if (m > 0) {
        Eigen::MatrixXd cost(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                cost(i, j) = std::pow(std::min(c, base_distance((*small)[i], (*large)[j], cfg.base_distance)), p);
        loc_sum = solve_assignment(cost).cost;
    }
    const double card_sum = std::pow(c, p) * static_cast<double>(n - m);
    const double nn = static_cast<double>(n);
    r.total = std::pow((loc_sum + card_sum) / nn, 1.0 / p);
    r.localization = std::pow(loc_sum / nn, 1.0 / p);
    r.cardinality = std::pow(card_sum / nn, 1.0 / p);
    return r;
}

OspaResult accumulate(std::span<const OspaResult> series) {
    if (series.empty()) throw std::invalid_argument("accumulate: empty series");
    OspaResult acc;
    for (const auto& s : series) {
        acc.total += s.total;
        acc.localization += s.localization;
        acc.cardinality += s.cardinality;
    }
    const double k = static_cast<double>(series.size());
    acc.total /= k;
    acc.localization /= k;
    acc.cardinality /= k;
    return acc;
}

}  // namespace liemix
