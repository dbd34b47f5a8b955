#include "liemix/reduction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "liemix/errors.hpp"

namespace liemix {

void ReductionConfig::validate() const {
    if (!max_components && !threshold) throw std::invalid_argument("reduction: no stopping rule configured");
    if (max_components && *max_components < 1) throw std::invalid_argument("reduction: max_components must be >= 1");
    if (threshold && !(*threshold > 0.0)) throw std::invalid_argument("reduction: threshold must be > 0");
    if (picking == Picking::West && strategy == TangentStrategy::GlobalMin)
        throw std::invalid_argument("reduction: West picking always merges the lightest component; use TS instead of TMin");
    if (spd_jitter < 0.0) throw std::invalid_argument("reduction: spd_jitter must be >= 0");
}

std::string to_string(TangentStrategy s) {
    switch (s) {
        case TangentStrategy::PairwiseLarger: return "TL";
        case TangentStrategy::PairwiseSmaller: return "TS";
        case TangentStrategy::Identity: return "TId";
        case TangentStrategy::GlobalMax: return "TMax";
        case TangentStrategy::GlobalMin: return "TMin";
    }
    return "?";
}

std::string to_string(Picking p) { return p == Picking::West ? "west" : "exhaustive"; }

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

TangentStrategy parse_strategy(std::string_view s) {
    const std::string l = lower(s);
    if (l == "tl") return TangentStrategy::PairwiseLarger;
    if (l == "ts") return TangentStrategy::PairwiseSmaller;
    if (l == "tid") return TangentStrategy::Identity;
    if (l == "tmax") return TangentStrategy::GlobalMax;
    if (l == "tmin") return TangentStrategy::GlobalMin;
    throw std::invalid_argument("unknown tangent strategy '" + std::string(s) + "'");
}

Picking parse_picking(std::string_view s) {
    const std::string l = lower(s);
    if (l == "exhaustive") return Picking::ExhaustivePairwise;
    if (l == "west") return Picking::West;
    throw std::invalid_argument("unknown picking algorithm '" + std::string(s) + "'");
}

namespace {

/// Tangent Gaussian with its Cholesky factor, ready for divergence evaluation.
struct Prepared {
    Vector mean;
    Matrix chol;  // lower factor of the covariance
    double log_det = 0.0;
};

Prepared prepare(Vector mean, const Matrix& cov) {
    auto llt = checked_cholesky(cov, "unfolded covariance");
    Prepared p;
    p.mean = std::move(mean);
    p.chol = llt.matrixL();
    p.log_det = log_det(llt);
    return p;
}

Prepared prepare_own(const CGD& d) {
    Prepared p;
    p.mean = Vector::Zero(d.group().algebra_dim());
    p.chol = d.cov_llt().matrixL();
    p.log_det = d.cov_log_det();
    return p;
}

Prepared prepare_unfolded(const CGD& d, const GroupElement& anchor) {
    TangentGaussian t = unfold(d, anchor);
    return prepare(std::move(t.mean), t.cov);
}

double kl_prepared(const Prepared& a, const Prepared& b) {
    const auto k = static_cast<double>(a.mean.size());
    const auto lb = b.chol.triangularView<Eigen::Lower>();
    const Matrix m = lb.solve(a.chol);
    const Vector w = lb.solve(b.mean - a.mean);
    const double kl = 0.5 * (m.squaredNorm() - k + b.log_det - a.log_det + w.squaredNorm());
    return std::max(0.0, kl);
}

double weight_term(double wi, double wj) {
    if (wi == wj) return 0.0;
    // Written so that swapping the arguments flips both factors exactly.
    return (wi - wj) * (std::log(wi) - std::log(wj));
}

double skl_prepared(double wi, const Prepared& a, double wj, const Prepared& b) {
    return 0.5 * (weight_term(wi, wj) + (wi * kl_prepared(a, b) + wj * kl_prepared(b, a)));
}

/// Squared Mahalanobis norm of v under the covariance with lower factor `chol`.
double mahalanobis2(const Matrix& chol, const Vector& v) {
    return chol.triangularView<Eigen::Lower>().solve(v).squaredNorm();
}

void check_weight(double w) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("skl: weights must be positive and finite");
}

bool same_anchor(const GroupElement& a, const GroupElement& b) {
    if (a.group() != b.group()) return false;
    if ((a.params() - b.params()).cwiseAbs().maxCoeff() < 1e-12) return true;
    try {
        return a.group().distance(a, b) < 1e-12;
    } catch (const SingularLogError&) {
        return false;
    }
}

}  // namespace

double kl_gaussian(const TangentGaussian& a, const TangentGaussian& b) {
    if (a.mean.size() != b.mean.size() || a.cov.rows() != b.cov.rows())
        throw DimensionError("kl_gaussian: dimension mismatch");
    if (!same_anchor(a.anchor, b.anchor)) throw std::invalid_argument("kl_gaussian: Gaussians live in different tangent spaces");
    return kl_prepared(prepare(a.mean, a.cov), prepare(b.mean, b.cov));
}

double kl_cgd(const CGD& i, const CGD& j, const GroupElement& anchor) {
    return kl_prepared(prepare_unfolded(i, anchor), prepare_unfolded(j, anchor));
}

double skl(double w_i, const CGD& i, double w_j, const CGD& j, const GroupElement& anchor) {
    check_weight(w_i);
    check_weight(w_j);
    return skl_prepared(w_i, prepare_unfolded(i, anchor), w_j, prepare_unfolded(j, anchor));
}

namespace {

// Index of the heavier (or lighter) of two components; ties go to the lower index.
std::size_t pick_by_weight(double wa, std::size_t a, double wb, std::size_t b, bool larger) {
    if (wa == wb) return std::min(a, b);
    const bool a_wins = larger ? wa > wb : wa < wb;
    return a_wins ? a : b;
}

}  // namespace

GroupElement select_anchor(TangentStrategy strategy, const Mixture& mixture, std::pair<std::size_t, std::size_t> pair) {
    if (mixture.empty()) throw std::invalid_argument("select_anchor: empty mixture");
    const auto [a, b] = pair;
    if (a >= mixture.size() || b >= mixture.size()) throw std::out_of_range("select_anchor: index out of range");
    switch (strategy) {
        case TangentStrategy::PairwiseLarger:
        case TangentStrategy::PairwiseSmaller: {
            const bool larger = strategy == TangentStrategy::PairwiseLarger;
            return mixture[pick_by_weight(mixture[a].weight, a, mixture[b].weight, b, larger)].dist.mean();
        }
        case TangentStrategy::Identity: return mixture.group().identity();
        case TangentStrategy::GlobalMax:
        case TangentStrategy::GlobalMin: {
            const bool larger = strategy == TangentStrategy::GlobalMax;
            std::size_t best = 0;
            for (std::size_t k = 1; k < mixture.size(); ++k)
                best = pick_by_weight(mixture[best].weight, best, mixture[k].weight, k, larger);
            return mixture[best].dist.mean();
        }
    }
    throw std::logic_error("select_anchor: unhandled strategy");
}

TangentMerge merge_in_tangent(std::span<const WeightedCgd> components, const GroupElement& anchor) {
    if (components.empty()) throw std::invalid_argument("merge: no components");
    const int p = anchor.group().algebra_dim();
    std::vector<TangentGaussian> unfolded;
    unfolded.reserve(components.size());
    double total = 0.0;
    Vector mean = Vector::Zero(p);
    for (const auto& c : components) {
        check_weight(c.weight);
        unfolded.push_back(unfold(c.dist, anchor));
        total += c.weight;
        mean += c.weight * unfolded.back().mean;
    }
    mean /= total;
    Matrix cov = Matrix::Zero(p, p);
    for (std::size_t i = 0; i < components.size(); ++i) {
        const Vector d = unfolded[i].mean - mean;
        cov += components[i].weight * (unfolded[i].cov + d * d.transpose());
    }
    cov /= total;
    return TangentMerge{total, TangentGaussian{anchor, std::move(mean), symmetrize(cov)}};
}

WeightedCgd merge(std::span<const WeightedCgd> components, const GroupElement& anchor, double jitter) {
    TangentMerge m = merge_in_tangent(components, anchor);
    return WeightedCgd{m.weight, fold(m.gaussian, jitter)};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * Working state of one reduce() call.
 *
 * Pair divergences are cached lazily: an entry holds either the exact sKL or
 * a cheap lower bound (weight term plus one or two Mahalanobis terms). The
 * argmin search only evaluates pairs whose bound can beat the best exact
 * value, so the result is identical to an exhaustive evaluation.
 */
class Reducer {
public:
    Reducer(const Mixture& mixture, const ReductionConfig& config) : cfg_(config), group_(mixture.group()) {
        nodes_.reserve(mixture.size());
        for (const auto& c : mixture) nodes_.push_back(Node{c.weight, c.dist, prepare_own(c.dist), true});
        alive_ = nodes_.size();
    }

    Mixture run() {
        if (cfg_.picking == Picking::ExhaustivePairwise)
            run_exhaustive();
        else
            run_west();
        Mixture out(group_);
        for (auto& n : nodes_)
            if (n.alive) out.add(n.weight, std::move(n.dist));
        return out;
    }

private:
    struct Node {
        double weight;
        CGD dist;
        Prepared own;
        bool alive;
    };
    struct Entry {
        double value;
        bool exact;
    };

    bool global_strategy() const {
        return cfg_.strategy == TangentStrategy::Identity || cfg_.strategy == TangentStrategy::GlobalMax ||
               cfg_.strategy == TangentStrategy::GlobalMin;
    }

    bool may_continue() const {
        if (alive_ <= 1) return false;
        return (cfg_.max_components && alive_ > *cfg_.max_components) || cfg_.threshold.has_value();
    }

    bool should_merge(double best) const {
        if (cfg_.max_components && alive_ > *cfg_.max_components) return true;
        return cfg_.threshold && best <= *cfg_.threshold;
    }

    // ---- global anchors (T_Id, T_Max, T_Min)

    std::size_t extreme_index() const {
        const bool larger = cfg_.strategy == TangentStrategy::GlobalMax;
        std::size_t best = nodes_.size();
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            if (!nodes_[k].alive) continue;
            best = best == nodes_.size() ? k : pick_by_weight(nodes_[best].weight, best, nodes_[k].weight, k, larger);
        }
        return best;
    }

    void refresh_unfolded(std::size_t k) {
        if (anchor_index_ == k)
            unfolded_[k] = nodes_[k].own;
        else
            unfolded_[k] = prepare_unfolded(nodes_[k].dist, *anchor_);
    }

    /// (Re)selects the global anchor. Returns true when it changed and every
    /// unfolded component was recomputed.
    bool update_global_anchor(bool force) {
        std::size_t idx = nodes_.size();
        if (cfg_.strategy != TangentStrategy::Identity) idx = extreme_index();
        if (!force && anchor_ && idx == anchor_index_) return false;
        anchor_index_ = idx;
        anchor_ = idx == nodes_.size() ? group_.identity() : nodes_[idx].dist.mean();
        unfolded_.resize(nodes_.size());
        for (std::size_t k = 0; k < nodes_.size(); ++k)
            if (nodes_[k].alive) refresh_unfolded(k);
        return true;
    }

    // ---- pair divergences

    double lower_bound(std::size_t i, std::size_t j) const {
        const Node& a = nodes_[i];
        const Node& b = nodes_[j];
        const double wt = weight_term(a.weight, b.weight);
        if (global_strategy()) {
            const Vector d = unfolded_[j].mean - unfolded_[i].mean;
            return 0.5 * (wt + 0.5 * a.weight * mahalanobis2(unfolded_[j].chol, d) +
                          0.5 * b.weight * mahalanobis2(unfolded_[i].chol, d));
        }
        const bool larger = cfg_.strategy == TangentStrategy::PairwiseLarger;
        const std::size_t ai = pick_by_weight(a.weight, i, b.weight, j, larger);
        const Node& anchor = nodes_[ai];
        const Node& other = nodes_[ai == i ? j : i];
        const Vector r = group_.log(group_.compose(other.dist.mean(), group_.inverse(anchor.dist.mean())));
        return 0.5 * (wt + 0.5 * other.weight * mahalanobis2(anchor.own.chol, r));
    }

    double exact(std::size_t i, std::size_t j) const {
        const Node& a = nodes_[i];
        const Node& b = nodes_[j];
        if (global_strategy()) return skl_prepared(a.weight, unfolded_[i], b.weight, unfolded_[j]);
        const bool larger = cfg_.strategy == TangentStrategy::PairwiseLarger;
        const std::size_t ai = pick_by_weight(a.weight, i, b.weight, j, larger);
        const Node& anchor = nodes_[ai];
        const Node& other = nodes_[ai == i ? j : i];
        const Prepared u = prepare_unfolded(other.dist, anchor.dist.mean());
        return skl_prepared(anchor.weight, anchor.own, other.weight, u);
    }

    GroupElement merge_anchor(std::size_t i, std::size_t j) const {
        if (global_strategy()) return *anchor_;
        const bool larger = cfg_.strategy == TangentStrategy::PairwiseLarger;
        return nodes_[pick_by_weight(nodes_[i].weight, i, nodes_[j].weight, j, larger)].dist.mean();
    }

    /// Merges j into i (i < j) and returns nothing; the merged component keeps index i.
    void merge_pair(std::size_t i, std::size_t j) {
        const GroupElement anchor = merge_anchor(i, j);
        const WeightedCgd parts[2] = {{nodes_[i].weight, nodes_[i].dist}, {nodes_[j].weight, nodes_[j].dist}};
        WeightedCgd merged = merge(parts, anchor, cfg_.spd_jitter);
        Prepared own = prepare_own(merged.dist);
        nodes_[i] = Node{merged.weight, std::move(merged.dist), std::move(own), true};
        nodes_[j].alive = false;
        --alive_;
    }

    // ---- Exhaustive pairwise

    std::size_t slot(std::size_t i, std::size_t j) const {
        const std::size_t n = nodes_.size();
        return i * n - i * (i + 1) / 2 + (j - i - 1);
    }

    void set_bound(std::size_t i, std::size_t j) { cache_[slot(i, j)] = Entry{lower_bound(i, j), false}; }

    void bound_row(std::size_t i) {
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            if (k == i || !nodes_[k].alive) continue;
            set_bound(std::min(i, k), std::max(i, k));
        }
    }

    void bound_all() {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!nodes_[i].alive) continue;
            for (std::size_t j = i + 1; j < nodes_.size(); ++j)
                if (nodes_[j].alive) set_bound(i, j);
        }
    }

    void run_exhaustive() {
        const std::size_t n = nodes_.size();
        if (n < 2) return;
        cache_.assign(n * (n - 1) / 2, Entry{kInf, false});
        if (global_strategy()) update_global_anchor(true);
        bound_all();
        while (may_continue()) {
            // Pass 1: best exact entry. Pass 2: resolve bounds that could beat it.
            double best = kInf;
            std::size_t bi = n, bj = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (!nodes_[i].alive) continue;
                for (std::size_t j = i + 1; j < n; ++j) {
                    if (!nodes_[j].alive) continue;
                    const Entry& e = cache_[slot(i, j)];
                    if (e.exact && e.value < best) {
                        best = e.value;
                        bi = i;
                        bj = j;
                    }
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (!nodes_[i].alive) continue;
                for (std::size_t j = i + 1; j < n; ++j) {
                    if (!nodes_[j].alive) continue;
                    Entry& e = cache_[slot(i, j)];
                    if (e.exact || e.value > best) continue;
                    e = Entry{exact(i, j), true};
                    if (e.value < best || (e.value == best && std::pair(i, j) < std::pair(bi, bj))) {
                        best = e.value;
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (bi == n || !should_merge(best)) break;
            merge_pair(bi, bj);
            if (global_strategy()) {
                const bool moved = update_global_anchor(anchor_index_ == bi || anchor_index_ == bj);
                if (moved) {
                    bound_all();
                    continue;
                }
                refresh_unfolded(bi);
            }
            bound_row(bi);
        }
    }

    // ---- West

    /// Nearest live partner of component s; returns its sKL and sets partner.
    double nearest_partner(std::size_t s, std::size_t& partner) {
        const std::size_t n = nodes_.size();
        candidates_.clear();
        for (std::size_t k = 0; k < n; ++k)
            if (k != s && nodes_[k].alive) candidates_.emplace_back(lower_bound(std::min(s, k), std::max(s, k)), k);
        std::sort(candidates_.begin(), candidates_.end());
        double best = kInf;
        partner = n;
        for (const auto& [bound, k] : candidates_) {
            if (bound > best) break;
            const double v = exact(std::min(s, k), std::max(s, k));
            if (v < best || (v == best && k < partner)) {
                best = v;
                partner = k;
            }
        }
        return best;
    }

    /**
     * Components are visited in ascending weight order (ties: lower index).
     * While the count cap is exceeded the lightest component merges with its
     * nearest partner unconditionally. Under the threshold rule the lightest
     * component whose nearest partner lies within U merges; components with
     * no partner within U are passed over until the next merge changes the
     * mixture. Reduction stops when every remaining component is passed over.
     */
    void run_west() {
        const std::size_t n = nodes_.size();
        if (global_strategy()) update_global_anchor(true);
        std::vector<char> passed(n, 0);
        std::vector<std::size_t> order;
        while (may_continue()) {
            order.clear();
            for (std::size_t k = 0; k < n; ++k)
                if (nodes_[k].alive) order.push_back(k);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return nodes_[a].weight < nodes_[b].weight; });
            std::size_t s = n;
            std::size_t partner = n;
            for (std::size_t c : order) {
                if (passed[c]) continue;
                const double best = nearest_partner(c, partner);
                if (partner != n && should_merge(best)) {
                    s = c;
                    break;
                }
                passed[c] = 1;
            }
            if (s == n) break;
            const std::size_t i = std::min(s, partner);
            const std::size_t j = std::max(s, partner);
            merge_pair(i, j);
            std::fill(passed.begin(), passed.end(), 0);
            if (global_strategy() && !update_global_anchor(anchor_index_ == i || anchor_index_ == j))
                refresh_unfolded(i);
        }
    }

    ReductionConfig cfg_;
    Group group_;
    std::vector<Node> nodes_;
    std::size_t alive_ = 0;
    std::vector<Entry> cache_;
    std::optional<GroupElement> anchor_;
    std::size_t anchor_index_ = 0;
    std::vector<Prepared> unfolded_;
    std::vector<std::pair<double, std::size_t>> candidates_;
};

}  // namespace

Mixture reduce(const Mixture& mixture, const ReductionConfig& config) {
    config.validate();
    if (mixture.size() < 2) return mixture;
    return Reducer(mixture, config).run();
}

}  // namespace liemix
