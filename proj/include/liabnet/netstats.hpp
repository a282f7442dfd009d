#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

#include "liabnet/errors.hpp"
#include "liabnet/network.hpp"

namespace liabnet {

struct HistogramSpec {
    std::size_t bins = 60;
    double lo = 0.0;
    double hi = 3000.0;
};

/// Uniform-bin histogram; [lo, hi) half-open bins, top edge closed.
struct Histogram {
    HistogramSpec spec;
    std::vector<std::size_t> counts;
    std::size_t underflow = 0;
    std::size_t overflow = 0;

    void accumulate(double x) {
        if (x < spec.lo) { ++underflow; return; }
        if (x > spec.hi) { ++overflow; return; }
        std::size_t bin = (x == spec.hi)
                              ? spec.bins - 1
                              : static_cast<std::size_t>((x - spec.lo) / (spec.hi - spec.lo) * double(spec.bins));
        if (bin >= spec.bins) bin = spec.bins - 1;
        ++counts[bin];
    }
};

inline Histogram make_histogram(const HistogramSpec& spec) {
    if (spec.bins == 0 || !(spec.hi > spec.lo))
        raise(errc::invalid_argument, "histogram needs bins > 0 and hi > lo");
    Histogram h;
    h.spec = spec;
    h.counts.assign(spec.bins, 0);
    return h;
}

struct DegreeDistribution {
    std::vector<std::size_t> in_degree;
    std::vector<std::size_t> out_degree;
    Histogram in_hist;
    Histogram out_hist;
};

/// Exact per-node degree counts plus histograms over the requested range.
inline DegreeDistribution degree_stats(const LiabilityNetwork& net,
                                       const HistogramSpec& spec = {}) {
    DegreeDistribution d;
    d.in_degree.assign(net.node_count(), 0);
    d.out_degree.assign(net.node_count(), 0);
    net.for_each_entry([&](NodeId i, NodeId j, double) {
        ++d.out_degree[i];
        ++d.in_degree[j];
    });
    d.in_hist = make_histogram(spec);
    d.out_hist = make_histogram(spec);
    for (std::size_t v : d.in_degree) d.in_hist.accumulate(double(v));
    for (std::size_t v : d.out_degree) d.out_hist.accumulate(double(v));
    return d;
}

/// Simple undirected view: an edge joins u and v iff any liability runs
/// between them in either direction.
struct UndirectedGraph {
    std::vector<std::vector<NodeId>> adj; // sorted neighbor lists, no self-loops
    std::size_t edge_count = 0;
};

inline UndirectedGraph collapse_undirected(const LiabilityNetwork& net) {
    UndirectedGraph g;
    g.adj.assign(net.node_count(), {});
    net.for_each_entry([&](NodeId i, NodeId j, double) {
        g.adj[i].push_back(j);
        g.adj[j].push_back(i);
    });
    for (auto& nbrs : g.adj) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        g.edge_count += nbrs.size();
    }
    g.edge_count /= 2;
    return g;
}

/// Which coefficient a report's headline value uses.
enum class ClusteringConvention : unsigned char { MeanLocal, Transitivity };

inline std::string_view to_string(ClusteringConvention c) {
    return c == ClusteringConvention::MeanLocal ? "mean-local" : "transitivity";
}

struct ClusteringReport {
    double mean_local_clustering = 0.0; // average of per-node coefficients; degree < 2 counts 0
    double transitivity = 0.0;          // 3 * triangles / wedges
    double random_baseline = 0.0;       // edge density of a same-size uniform random graph
    std::size_t node_count = 0;
    std::size_t undirected_edge_count = 0;
};

namespace detail {

struct LocalClustering {
    std::vector<double> local; // per node; 0 for degree < 2
    double mean = 0.0;
    double transitivity = 0.0;
};

inline LocalClustering local_clustering(const std::vector<std::vector<NodeId>>& adj) {
    const std::size_t n = adj.size();
    LocalClustering out;
    out.local.assign(n, 0.0);
    if (n == 0) return out;

    // Each triangle {a, b, c} is discovered exactly once per edge, each
    // time crediting the vertex opposite that edge.
    std::vector<std::size_t> triangles(n, 0);
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : adj[u]) {
            if (v <= u) continue;
            const auto& a = adj[u];
            const auto& b = adj[v];
            std::size_t x = 0, y = 0;
            while (x < a.size() && y < b.size()) {
                if (a[x] < b[y]) ++x;
                else if (a[x] > b[y]) ++y;
                else { ++triangles[a[x]]; ++x; ++y; }
            }
        }
    }

    double mean_sum = 0.0;
    double wedges = 0.0;
    std::size_t total_triangles = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double k = double(adj[i].size());
        const double pairs = k * (k - 1.0) / 2.0;
        wedges += pairs;
        total_triangles += triangles[i];
        if (pairs > 0.0) out.local[i] = double(triangles[i]) / pairs;
        mean_sum += out.local[i];
    }
    out.mean = mean_sum / double(n);
    out.transitivity = wedges > 0.0 ? double(total_triangles) / wedges : 0.0;
    return out;
}

} // namespace detail

inline ClusteringReport global_clustering(const LiabilityNetwork& net) {
    UndirectedGraph g = collapse_undirected(net);
    auto lc = detail::local_clustering(g.adj);

    ClusteringReport rep;
    rep.node_count = net.node_count();
    rep.undirected_edge_count = g.edge_count;
    rep.mean_local_clustering = lc.mean;
    rep.transitivity = lc.transitivity;
    const double n = double(net.node_count());
    rep.random_baseline = n >= 2.0 ? 2.0 * double(g.edge_count) / (n * (n - 1.0)) : 0.0;
    return rep;
}

/// Monte-Carlo cross-check of the analytic baseline: mean of the
/// mean-local coefficient over uniform random graphs with the same node
/// and edge count.
inline double sampled_clustering_baseline(std::size_t nodes, std::size_t edges,
                                          std::size_t samples = 100, std::uint64_t seed = 1) {
    if (nodes < 2) return 0.0;
    const std::size_t max_edges = nodes * (nodes - 1) / 2;
    if (edges > max_edges)
        raise(errc::invalid_argument, "edge count exceeds simple-graph capacity");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, nodes - 1);
    double total = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        std::unordered_set<std::uint64_t> chosen;
        std::vector<std::vector<NodeId>> adj(nodes);
        while (chosen.size() < edges) {
            std::uint64_t u = pick(rng), v = pick(rng);
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            if (!chosen.insert(u * nodes + v).second) continue;
            adj[u].push_back(static_cast<NodeId>(v));
            adj[v].push_back(static_cast<NodeId>(u));
        }
        for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
        total += detail::local_clustering(adj).mean;
    }
    return total / double(samples);
}

} // namespace liabnet
