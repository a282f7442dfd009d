#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "liabnet/errors.hpp"
#include "liabnet/util.hpp"

namespace liabnet {

/// Dense node index. Banks occupy [0, b), firms [b, b + c).
using NodeId = std::uint32_t;

enum class NodeKind : unsigned char { Bank, Firm };

inline std::string_view to_string(NodeKind k) {
    return k == NodeKind::Bank ? "bank" : "firm";
}

/// Balance-sheet facts attached to one node. Firms carry the aggregate
/// they owe to banks; banks leave it unset. Capital may be negative
/// (distressed equity) and is surfaced by non_positive_capital_nodes().
struct NodeRecord {
    NodeId id = 0;
    NodeKind kind = NodeKind::Bank;
    std::string name;
    double total_assets = 0.0;
    double capital = 0.0;
    std::optional<double> aggregated_bank_liabilities; // firms only
    std::string sector_code;                           // first-level letter, empty if unknown
};

/// One liability: debtor owes creditor `amount` EUR.
struct Entry {
    NodeId debtor = 0;
    NodeId creditor = 0;
    double amount = 0.0;
};

/// Weighted directed liability graph partitioned into the interbank block
/// (bank -> bank), the deposit block (bank -> firm) and the loan block
/// (firm -> bank). The firm -> firm block is structurally empty.
///
/// Immutable after construction; safe for concurrent reads. Rows are
/// sorted by creditor, so iteration order is deterministic.
class LiabilityNetwork {
public:
    LiabilityNetwork() = default;

    std::size_t bank_count() const { return banks_; }
    std::size_t firm_count() const { return records_.size() - banks_; }
    std::size_t node_count() const { return records_.size(); }
    std::size_t entry_count() const { return entry_count_; }

    /// Sum of all liability amounts (the network's economic volume).
    double total_liabilities() const { return total_liabilities_; }

    bool is_bank(NodeId i) const { return i < banks_; }
    NodeKind kind_of(NodeId i) const {
        return is_bank(i) ? NodeKind::Bank : NodeKind::Firm;
    }

    const std::vector<NodeRecord>& records() const { return records_; }
    const NodeRecord& record(NodeId i) const { return records_.at(i); }

    /// Outgoing liabilities of `debtor` as (creditor, amount), ascending by creditor.
    std::span<const std::pair<NodeId, double>> row(NodeId debtor) const {
        return rows_.at(debtor);
    }

    /// Amount debtor owes creditor, 0 when no such liability exists.
    double amount(NodeId debtor, NodeId creditor) const {
        const auto& r = rows_.at(debtor);
        auto it = std::lower_bound(r.begin(), r.end(), creditor,
                                   [](const auto& e, NodeId j) { return e.first < j; });
        return (it != r.end() && it->first == creditor) ? it->second : 0.0;
    }

    template <typename Fn> // fn(debtor, creditor, amount), (debtor, creditor) ascending
    void for_each_entry(Fn&& fn) const {
        for (NodeId i = 0; i < rows_.size(); ++i)
            for (const auto& [j, a] : rows_[i])
                fn(i, j, a);
    }

    std::vector<Entry> entries() const {
        std::vector<Entry> out;
        out.reserve(entry_count_);
        for_each_entry([&](NodeId i, NodeId j, double a) { out.push_back({i, j, a}); });
        return out;
    }

    /// Nodes whose capital is at or below zero; any exposure to them is a
    /// full-impact edge.
    std::vector<NodeId> non_positive_capital_nodes() const {
        std::vector<NodeId> out;
        for (const auto& r : records_)
            if (r.capital <= 0.0) out.push_back(r.id);
        return out;
    }

private:
    friend LiabilityNetwork build_network(std::vector<NodeRecord>, const std::vector<Entry>&);

    std::size_t banks_ = 0;
    std::size_t entry_count_ = 0;
    double total_liabilities_ = 0.0;
    std::vector<std::vector<std::pair<NodeId, double>>> rows_;
    std::vector<NodeRecord> records_;
};

/// Validates and assembles a network. Records must be dense (record i has
/// id i), ordered banks first. Rejects out-of-range indices, self-loops,
/// firm->firm entries, non-positive or non-finite amounts and duplicates.
/// Firms with no stated aggregate get 0 so every firm carries one.
inline LiabilityNetwork build_network(std::vector<NodeRecord> records,
                                      const std::vector<Entry>& entries) {
    const std::size_t n = records.size();
    std::size_t banks = 0;
    bool firm_seen = false;
    for (std::size_t i = 0; i < n; ++i) {
        NodeRecord& r = records[i];
        if (r.id != i)
            raise(errc::invalid_record,
                  "record at position " + std::to_string(i) + " has id " + std::to_string(r.id));
        if (r.kind == NodeKind::Bank) {
            if (firm_seen)
                raise(errc::invalid_record, "bank record after firm record at index " + std::to_string(i));
            if (r.aggregated_bank_liabilities)
                raise(errc::invalid_record, "bank record carries aggregated_bank_liabilities: " + r.name);
            ++banks;
        } else {
            firm_seen = true;
            if (!r.aggregated_bank_liabilities) r.aggregated_bank_liabilities = 0.0;
        }
        if (!(r.total_assets >= 0.0))
            raise(errc::invalid_record, "negative or non-finite total_assets for " + r.name);
    }

    LiabilityNetwork net;
    net.banks_ = banks;
    net.records_ = std::move(records);
    net.rows_.assign(n, {});

    for (const Entry& e : entries) {
        if (e.debtor >= n || e.creditor >= n)
            raise(errc::index_out_of_range,
                  "entry (" + std::to_string(e.debtor) + ", " + std::to_string(e.creditor) + ")");
        if (e.debtor >= banks && e.creditor >= banks)
            raise(errc::forbidden_block_entry,
                  "firm->firm entry (" + std::to_string(e.debtor) + ", " + std::to_string(e.creditor) + ")");
        if (e.debtor == e.creditor)
            raise(errc::self_loop, "entry (" + std::to_string(e.debtor) + ", " + std::to_string(e.creditor) + ")");
        if (!std::isfinite(e.amount))
            raise(errc::non_finite_amount, "entry (" + std::to_string(e.debtor) + ", " + std::to_string(e.creditor) + ")");
        if (e.amount <= 0.0)
            raise(errc::non_positive_amount,
                  "entry (" + std::to_string(e.debtor) + ", " + std::to_string(e.creditor) + ") = " +
                      std::to_string(e.amount));
        net.rows_[e.debtor].emplace_back(e.creditor, e.amount);
    }

    std::vector<double> amounts;
    amounts.reserve(entries.size());
    for (auto& row : net.rows_) {
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 1; k < row.size(); ++k)
            if (row[k].first == row[k - 1].first)
                raise(errc::duplicate_entry, "duplicate creditor " + std::to_string(row[k].first));
        for (const auto& [j, a] : row) amounts.push_back(a);
        net.entry_count_ += row.size();
    }
    net.total_liabilities_ = compensated_sum(amounts);
    return net;
}

/// Reading of the per-node value formula. AsWritten credits a node with
/// the amounts others owe it; Transposed credits what the node itself owes.
enum class ValueDirection : unsigned char { AsWritten, Transposed };

/// Per-node share of the network's total liability volume. Shares are
/// non-negative and sum to 1 within 1e-12.
struct EconomicValueVector {
    std::vector<double> v;
    double total_liabilities = 0.0;
};

inline EconomicValueVector economic_value(const LiabilityNetwork& net,
                                          ValueDirection dir = ValueDirection::AsWritten) {
    if (net.entry_count() == 0)
        raise(errc::empty_network, "economic value needs at least one liability");
    EconomicValueVector out;
    out.v.assign(net.node_count(), 0.0);
    net.for_each_entry([&](NodeId debtor, NodeId creditor, double a) {
        out.v[dir == ValueDirection::AsWritten ? creditor : debtor] += a;
    });
    // Normalize by the recomputed, compensated total of the per-node sums
    // so the shares sum to 1 within 1e-12 even at six-figure node counts.
    const double total = compensated_sum(out.v);
    for (double& x : out.v) x /= total;
    out.total_liabilities = total;
    return out;
}

/// Induced subgraph on `keep`, reindexed densely. Relative order is
/// preserved, so banks stay ahead of firms and block membership survives.
inline LiabilityNetwork subnetwork(const LiabilityNetwork& net, std::span<const NodeId> keep) {
    if (keep.empty())
        raise(errc::empty_selection, "subnetwork selection is empty");
    std::vector<NodeId> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    if (kept.back() >= net.node_count())
        raise(errc::index_out_of_range, "kept node " + std::to_string(kept.back()));

    const NodeId absent = static_cast<NodeId>(-1);
    std::vector<NodeId> remap(net.node_count(), absent);
    std::vector<NodeRecord> records;
    records.reserve(kept.size());
    for (std::size_t pos = 0; pos < kept.size(); ++pos) {
        remap[kept[pos]] = static_cast<NodeId>(pos);
        NodeRecord r = net.record(kept[pos]);
        r.id = static_cast<NodeId>(pos);
        records.push_back(std::move(r));
    }

    std::vector<Entry> entries;
    for (NodeId old : kept) {
        for (const auto& [j, a] : net.row(old)) {
            if (remap[j] != absent)
                entries.push_back({remap[old], remap[j], a});
        }
    }
    return build_network(std::move(records), entries);
}

/// All bank ids of `net`, the selection forming the interbank network.
inline std::vector<NodeId> bank_ids(const LiabilityNetwork& net) {
    std::vector<NodeId> ids(net.bank_count());
    for (NodeId i = 0; i < ids.size(); ++i) ids[i] = i;
    return ids;
}

} // namespace liabnet
