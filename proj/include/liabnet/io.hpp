#pragma once

// Delimited-text exports: network triplets, key-value reports, per-node
// degrees and histograms for external plotting, and the DebtRank table.
// Rendering is locale-free and reproducible byte for byte.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "liabnet/debtrank.hpp"
#include "liabnet/netstats.hpp"
#include "liabnet/network.hpp"
#include "liabnet/util.hpp"

namespace liabnet {

inline void write_network_triplets(std::ostream& os, const LiabilityNetwork& net) {
    os << "n " << net.node_count() << "\n";
    net.for_each_entry([&](NodeId i, NodeId j, double a) {
        os << i << ' ' << j << ' ' << fmt_double(a) << "\n";
    });
}

inline void write_kv(std::ostream& os, std::string_view key, std::string_view value) {
    os << key << ": " << value << "\n";
}

inline void write_kv(std::ostream& os, std::string_view key, double value) {
    os << key << ": " << fmt_ratio(value) << "\n";
}

inline void write_kv(std::ostream& os, std::string_view key, std::size_t value) {
    os << key << ": " << value << "\n";
}

inline void write_histogram_csv(std::ostream& os, const Histogram& h) {
    os << "bin_lo,bin_hi,count\n";
    const double width = (h.spec.hi - h.spec.lo) / double(h.spec.bins);
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        os << fmt_ratio(h.spec.lo + width * double(b)) << ','
           << fmt_ratio(h.spec.lo + width * double(b + 1)) << ',' << h.counts[b] << "\n";
    if (h.underflow) os << "underflow,," << h.underflow << "\n";
    if (h.overflow) os << "overflow,," << h.overflow << "\n";
}

inline void write_degrees_csv(std::ostream& os, const LiabilityNetwork& net,
                              const DegreeDistribution& d) {
    os << "node_label,kind,in_degree,out_degree\n";
    for (NodeId i = 0; i < net.node_count(); ++i)
        os << net.record(i).name << ',' << to_string(net.kind_of(i)) << ',' << d.in_degree[i]
           << ',' << d.out_degree[i] << "\n";
}

/// Per-node systemic importance table. Ranks follow R on the entire
/// network, descending; ties go to the larger balance sheet, then to the
/// label. The interbank column is only defined for banks.
struct DebtRankRow {
    std::string node_label;
    NodeKind kind = NodeKind::Bank;
    std::string sector_code;
    double total_assets = 0.0;
    double r_entire = 0.0;
    double r_interbank = 0.0; // banks only
    bool has_interbank = false;
    std::size_t rank = 0; // 1-based
};

inline std::vector<DebtRankRow> debtrank_table(const LiabilityNetwork& net,
                                               const std::vector<DebtRankResult>& results_f,
                                               const std::vector<DebtRankResult>& results_b) {
    if (results_f.size() != net.node_count())
        raise(errc::inconsistent_dimensions, "entire-network results do not cover every node");
    if (!results_b.empty() && results_b.size() != net.bank_count())
        raise(errc::inconsistent_dimensions, "interbank results do not cover every bank");

    std::vector<DebtRankRow> rows(net.node_count());
    for (NodeId i = 0; i < net.node_count(); ++i) {
        DebtRankRow& r = rows[i];
        const NodeRecord& rec = net.record(i);
        r.node_label = rec.name;
        r.kind = rec.kind;
        r.sector_code = rec.sector_code;
        r.total_assets = rec.total_assets;
        r.r_entire = results_f[i].value;
        if (net.is_bank(i) && !results_b.empty()) {
            r.r_interbank = results_b[i].value;
            r.has_interbank = true;
        }
    }
    std::sort(rows.begin(), rows.end(), [](const DebtRankRow& a, const DebtRankRow& b) {
        if (a.r_entire != b.r_entire) return a.r_entire > b.r_entire;
        if (a.total_assets != b.total_assets) return a.total_assets > b.total_assets;
        return a.node_label < b.node_label;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = i + 1;
    return rows;
}

inline void write_debtrank_table(std::ostream& os, const std::vector<DebtRankRow>& rows) {
    os << "node_label,kind,total_assets,r_f,r_b,rank\n";
    for (const DebtRankRow& r : rows) {
        os << r.node_label << ',' << to_string(r.kind) << ',' << fmt_double(r.total_assets) << ','
           << fmt_double(r.r_entire) << ',';
        if (r.has_interbank) os << fmt_double(r.r_interbank);
        else os << '-';
        os << ',' << r.rank << "\n";
    }
}

inline void write_top_table(std::ostream& os, const std::vector<DebtRankRow>& rows,
                            std::size_t limit) {
    os << "rank,node_label,kind,sector_code,total_assets,r_f\n";
    const std::size_t n = std::min(limit, rows.size());
    for (std::size_t i = 0; i < n; ++i) {
        const DebtRankRow& r = rows[i];
        os << r.rank << ',' << r.node_label << ',' << to_string(r.kind) << ','
           << (r.sector_code.empty() ? "-" : r.sector_code) << ',' << fmt_double(r.total_assets)
           << ',' << fmt_double(r.r_entire) << "\n";
    }
}

} // namespace liabnet
