#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "liabnet/errors.hpp"
#include "liabnet/network.hpp"
#include "liabnet/util.hpp"

namespace liabnet {

/// Sparse matrix of capped loss fractions. Row i holds, per creditor j of
/// i, the fraction of j's capital wiped out if i defaults:
/// w = min(amount / capital_j, 1), with capital <= 0 treated as full loss.
/// Stored weights are therefore always in (0, 1].
class ImpactMatrix {
public:
    ImpactMatrix() = default;
    explicit ImpactMatrix(std::size_t nodes) : rows_(nodes) {}

    std::size_t node_count() const { return rows_.size(); }
    std::size_t entry_count() const { return entry_count_; }

    std::span<const std::pair<NodeId, double>> row(NodeId i) const { return rows_.at(i); }

    double at(NodeId i, NodeId j) const {
        const auto& r = rows_.at(i);
        auto it = std::lower_bound(r.begin(), r.end(), j,
                                   [](const auto& e, NodeId col) { return e.first < col; });
        return (it != r.end() && it->first == j) ? it->second : 0.0;
    }

    void add(NodeId i, NodeId j, double w) { // rows must be fed in sorted order
        rows_.at(i).emplace_back(j, w);
        ++entry_count_;
    }

private:
    std::vector<std::vector<std::pair<NodeId, double>>> rows_;
    std::size_t entry_count_ = 0;
};

/// Derives the impact matrix from a network and a capital vector (one
/// entry per node, order matching node ids).
inline ImpactMatrix impact_matrix(const LiabilityNetwork& net, std::span<const double> capital) {
    if (capital.size() != net.node_count())
        raise(errc::missing_capital, "capital vector covers " + std::to_string(capital.size()) +
                                         " of " + std::to_string(net.node_count()) + " nodes");
    ImpactMatrix w(net.node_count());
    net.for_each_entry([&](NodeId i, NodeId j, double amount) {
        const double c = capital[j];
        w.add(i, j, c <= 0.0 ? 1.0 : std::min(amount / c, 1.0));
    });
    return w;
}

inline std::vector<double> capital_vector(const LiabilityNetwork& net) {
    std::vector<double> c;
    c.reserve(net.node_count());
    for (const NodeRecord& r : net.records()) c.push_back(r.capital);
    return c;
}

inline ImpactMatrix impact_matrix(const LiabilityNetwork& net) {
    return impact_matrix(net, capital_vector(net));
}

enum class NodeState : unsigned char { Undistressed, Distressed, Inactive };

/// Which network a result refers to: the entire liability network or the
/// interbank subnetwork.
enum class NetworkTag : unsigned char { F, B };

inline std::string_view to_string(NetworkTag t) { return t == NetworkTag::F ? "F" : "B"; }

enum class SetMode : unsigned char { ExcludeInitial, IncludeInitial };

struct DebtRankResult {
    std::vector<NodeId> seeds;
    double value = 0.0;          // R
    std::vector<double> final_h; // left empty by bulk runs
    std::size_t steps = 0;       // T; bounded by node count + 1
    NetworkTag network = NetworkTag::F;
};

/// Three-state synchronous distress dynamics. A node is Distressed for
/// exactly one round: it transmits w * h to its creditors using its h from
/// the previous step, then turns Inactive. Distress levels only ever grow
/// and are capped at 1. The object is reusable across seeds; reset cost is
/// proportional to the previous cascade's reach, not the node count.
class DistressCascade {
public:
    explicit DistressCascade(const ImpactMatrix& w)
        : w_(&w),
          h_(w.node_count(), 0.0),
          delta_(w.node_count(), 0.0),
          states_(w.node_count(), NodeState::Undistressed) {}

    void reset(std::span<const NodeId> seeds) {
        if (seeds.empty()) raise(errc::empty_seed_set, "cascade needs at least one seed");
        for (NodeId i : reached_) {
            h_[i] = 0.0;
            states_[i] = NodeState::Undistressed;
        }
        reached_.clear();
        active_.clear();
        step_ = 1;
        for (NodeId s : seeds) {
            if (s >= h_.size())
                raise(errc::index_out_of_range, "seed " + std::to_string(s));
            if (h_[s] != 0.0) continue; // duplicate seed
            h_[s] = 1.0;
            states_[s] = NodeState::Distressed;
            reached_.push_back(s);
            active_.push_back(s);
        }
    }

    bool settled() const { return active_.empty(); }
    std::size_t step_count() const { return step_; }
    std::span<const double> h() const { return h_; }
    std::span<const NodeState> states() const { return states_; }
    std::span<const NodeId> reached() const { return reached_; }

    /// One synchronous round. Returns false once no node is distressed.
    bool step() {
        if (active_.empty()) return false;
        touched_.clear();
        for (NodeId j : active_) {
            const double hj = h_[j]; // level from the previous step
            for (const auto& [i, w] : w_->row(j)) {
                if (delta_[i] == 0.0) touched_.push_back(i);
                delta_[i] += w * hj;
            }
            states_[j] = NodeState::Inactive;
        }
        active_.clear();
        for (NodeId i : touched_) {
            const bool was_zero = h_[i] == 0.0;
            h_[i] = std::min(1.0, h_[i] + delta_[i]);
            delta_[i] = 0.0;
            if (h_[i] > 0.0 && was_zero) reached_.push_back(i);
            if (h_[i] > 0.0 && states_[i] == NodeState::Undistressed) {
                states_[i] = NodeState::Distressed;
                active_.push_back(i);
            }
        }
        ++step_;
        return !active_.empty();
    }

    void run() {
        while (step()) {}
    }

    /// Sum of h_i * v_i over the reached nodes (h is zero elsewhere).
    double weighted_distress(std::span<const double> v) const {
        double sum = 0.0;
        for (NodeId i : reached_) sum += h_[i] * v[i];
        return sum;
    }

private:
    const ImpactMatrix* w_;
    std::vector<double> h_, delta_;
    std::vector<NodeState> states_;
    std::vector<NodeId> active_, touched_, reached_;
    std::size_t step_ = 1;
};

namespace detail {

inline DebtRankResult run_cascade(DistressCascade& cascade, const EconomicValueVector& v,
                                  std::span<const NodeId> seeds, SetMode mode, NetworkTag tag,
                                  bool keep_h) {
    cascade.reset(seeds);
    // Right after reset, reached() is exactly the deduplicated seed set.
    DebtRankResult res;
    res.seeds.assign(cascade.reached().begin(), cascade.reached().end());
    double initial = 0.0;
    if (mode == SetMode::ExcludeInitial)
        for (NodeId s : cascade.reached()) initial += v.v[s];
    cascade.run();
    res.steps = cascade.step_count();
    res.network = tag;
    // Clamp into the mathematical range; summation noise must not leak
    // past the documented bounds. The upper bound can round below zero
    // when the seeds cover the whole value vector.
    res.value = std::clamp(cascade.weighted_distress(v.v) - initial, 0.0,
                           std::max(0.0, 1.0 - initial));
    if (keep_h) {
        auto h = cascade.h();
        res.final_h.assign(h.begin(), h.end());
    }
    return res;
}

inline void check_value_cover(const ImpactMatrix& w, const EconomicValueVector& v) {
    if (v.v.size() != w.node_count())
        raise(errc::inconsistent_dimensions, "value vector covers " + std::to_string(v.v.size()) +
                                                 " of " + std::to_string(w.node_count()) + " nodes");
}

} // namespace detail

/// DebtRank of a single seed: total weighted distress at termination minus
/// the seed's own initial distress.
inline DebtRankResult debtrank_single(const ImpactMatrix& w, const EconomicValueVector& v,
                                      NodeId seed, NetworkTag tag = NetworkTag::F) {
    detail::check_value_cover(w, v);
    DistressCascade cascade(w);
    const NodeId seeds[1] = {seed};
    return detail::run_cascade(cascade, v, seeds, SetMode::ExcludeInitial, tag, /*keep_h=*/true);
}

/// Combined DebtRank of a set of simultaneously distressed seeds.
inline DebtRankResult debtrank_set(const ImpactMatrix& w, const EconomicValueVector& v,
                                   std::span<const NodeId> seeds, SetMode mode,
                                   NetworkTag tag = NetworkTag::F) {
    detail::check_value_cover(w, v);
    if (seeds.empty()) raise(errc::empty_seed_set, "seed set is empty");
    DistressCascade cascade(w);
    return detail::run_cascade(cascade, v, seeds, mode, tag, /*keep_h=*/true);
}

/// DebtRank of every node. Seeds are independent, so the sweep is split
/// across threads; each worker reuses one cascade buffer and writes to its
/// own result slots, making the output deterministic for any thread count.
/// Per-node h vectors are not retained.
inline std::vector<DebtRankResult> debtrank_all(const ImpactMatrix& w,
                                                const EconomicValueVector& v,
                                                unsigned threads = 0,
                                                NetworkTag tag = NetworkTag::F) {
    detail::check_value_cover(w, v);
    const std::size_t n = w.node_count();
    std::vector<DebtRankResult> results(n);
    if (n == 0) return results;

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n));

    auto worker = [&](std::size_t begin, std::size_t end) {
        DistressCascade cascade(w);
        for (std::size_t s = begin; s < end; ++s) {
            const NodeId seed[1] = {static_cast<NodeId>(s)};
            results[s] =
                detail::run_cascade(cascade, v, seed, SetMode::ExcludeInitial, tag, /*keep_h=*/false);
        }
    };

    if (threads == 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = std::min<std::size_t>(t * chunk, n);
            const std::size_t end = std::min<std::size_t>(begin + chunk, n);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return results;
}

/// Share of total systemic risk attributable to firms:
/// sum of firm DebtRanks over the sum of all DebtRanks.
inline double ratio_q1(const std::vector<DebtRankResult>& results_f,
                       std::span<const NodeKind> kinds) {
    if (results_f.size() != kinds.size())
        raise(errc::inconsistent_dimensions, "results and kinds differ in length");
    double firms = 0.0, all = 0.0;
    for (std::size_t i = 0; i < results_f.size(); ++i) {
        all += results_f[i].value;
        if (kinds[i] == NodeKind::Firm) firms += results_f[i].value;
    }
    if (all <= 0.0) raise(errc::zero_total_risk, "total DebtRank is zero");
    return firms / all;
}

inline double ratio_q1(const std::vector<DebtRankResult>& results_f, const LiabilityNetwork& net) {
    std::vector<NodeKind> kinds;
    kinds.reserve(net.node_count());
    for (NodeId i = 0; i < net.node_count(); ++i) kinds.push_back(net.kind_of(i));
    return ratio_q1(results_f, kinds);
}

/// Interbank systemic risk relative to the entire network, rescaled by the
/// two networks' economic volumes, which makes the relative DebtRanks
/// comparable. Returns 0 when the interbank side carries no volume or no
/// risk; fails only when the denominator vanishes.
inline double ratio_q2(const std::vector<DebtRankResult>& results_b,
                       const std::vector<DebtRankResult>& results_f,
                       double volume_b, double volume_f) {
    if (!(volume_f > 0.0)) raise(errc::zero_total_risk, "entire network has zero volume");
    if (volume_b < 0.0) raise(errc::invalid_argument, "negative interbank volume");
    double risk_b = 0.0, risk_f = 0.0;
    for (const auto& r : results_b) risk_b += r.value;
    for (const auto& r : results_f) risk_f += r.value;
    const double denom = volume_f * risk_f;
    if (denom <= 0.0) raise(errc::zero_total_risk, "entire network carries zero DebtRank");
    return (volume_b * risk_b) / denom;
}

} // namespace liabnet
