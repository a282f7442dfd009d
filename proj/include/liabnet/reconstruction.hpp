#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "liabnet/errors.hpp"
#include "liabnet/ingest.hpp"
#include "liabnet/network.hpp"
#include "liabnet/util.hpp"

namespace liabnet {

/// Unweighted bipartite adjacency between firms and banks. Firm slot f
/// corresponds to node id bank_count + f in the assembled network.
struct RelationshipGraph {
    std::size_t bank_count = 0;
    std::vector<std::vector<NodeId>> firm_banks; // sorted, unique, each < bank_count
};

/// Whether and how the deposit block is synthesized. Proportional applies
/// the loan-side rule to a firm's deposit aggregate over the same
/// adjacency; Off leaves the block empty.
enum class DepositWeighting : unsigned char { Off, Proportional };

inline std::string_view to_string(DepositWeighting d) {
    return d == DepositWeighting::Off ? "off" : "proportional";
}

struct ReconstructionReport {
    std::size_t included_firms = 0;
    std::size_t single_bank_firms = 0;        // entries equal the stated aggregate, nothing to reconstruct
    double included_bank_liabilities = 0.0;   // EUR represented by the network
    double coverage_share = 1.0;              // included / denominator (all firms incl. excluded)
    double exact_share = 0.0;                 // share of included liabilities with exact aggregates
    std::vector<double> residuals;            // per firm |sum of assigned entries - aggregate|
    double max_relative_residual = 0.0;
    std::vector<NodeId> uniform_fallback_firms; // firms whose connected banks all had zero assets
    std::size_t deposit_entries = 0;
};

struct PartitionResult {
    std::vector<std::pair<NodeId, double>> amounts;
    bool uniform_fallback = false;
};

/// Splits a firm's aggregate across its connected banks proportionally to
/// bank total assets (weights are L1-normalized, so the parts sum back to
/// the aggregate). Degenerate all-zero-assets lists fall back to the
/// uniform split and are flagged.
inline PartitionResult partition_firm_liabilities(
    double aggregate_liabilities, std::span<const std::pair<NodeId, double>> connected_banks) {

    if (connected_banks.empty())
        raise(errc::no_connected_banks, "firm has no connected banks");
    if (!(aggregate_liabilities >= 0.0) || !std::isfinite(aggregate_liabilities))
        raise(errc::invalid_argument, "aggregate liabilities must be finite and >= 0");

    double asset_sum = 0.0;
    for (const auto& [id, assets] : connected_banks) {
        if (!(assets >= 0.0) || !std::isfinite(assets))
            raise(errc::invalid_argument, "bank assets must be finite and >= 0");
        asset_sum += assets;
    }

    PartitionResult out;
    out.amounts.reserve(connected_banks.size());
    if (asset_sum == 0.0) {
        out.uniform_fallback = true;
        const double share = aggregate_liabilities / double(connected_banks.size());
        for (const auto& [id, assets] : connected_banks) out.amounts.emplace_back(id, share);
        return out;
    }
    for (const auto& [id, assets] : connected_banks)
        out.amounts.emplace_back(id, aggregate_liabilities * (assets / asset_sum));
    return out;
}

/// Builds the firm->banks adjacency from firm statements, resolving bank
/// labels through the rank matching. Every firm must resolve to at least
/// one bank; unconnected firms are excluded before this point.
inline RelationshipGraph build_relationship_graph(const std::vector<FirmStatement>& firms,
                                                  const RankMatching& matching,
                                                  std::size_t bank_count) {
    RelationshipGraph g;
    g.bank_count = bank_count;
    g.firm_banks.reserve(firms.size());
    for (const FirmStatement& f : firms) {
        std::vector<NodeId> banks;
        banks.reserve(f.bank_labels.size());
        for (const std::string& label : f.bank_labels) {
            auto it = matching.anon_index_of.find(label);
            if (it == matching.anon_index_of.end())
                raise(errc::inconsistent_dimensions,
                      "firm " + f.firm_label + " references unknown bank " + label);
            banks.push_back(static_cast<NodeId>(it->second));
        }
        std::sort(banks.begin(), banks.end());
        banks.erase(std::unique(banks.begin(), banks.end()), banks.end());
        if (banks.empty())
            raise(errc::no_connected_banks, "firm " + f.firm_label + " has no connected banks");
        g.firm_banks.push_back(std::move(banks));
    }
    return g;
}

struct AssembleOptions {
    DepositWeighting deposits = DepositWeighting::Off;
    // Total firm bank liabilities including excluded firms; feeds
    // coverage_share. Defaults to the included total (share 1).
    std::optional<double> coverage_denominator;
};

struct AssembledNetwork {
    LiabilityNetwork network;
    ReconstructionReport report;
};

/// Assembles the full partitioned liability matrix: the interbank block is
/// copied verbatim, the loan block comes from per-firm proportional
/// partitioning, the deposit block mirrors the adjacency when enabled, and
/// the firm->firm block stays empty.
inline AssembledNetwork assemble_liability_matrix(const InterbankMatrix& interbank,
                                                  const RelationshipGraph& relations,
                                                  const std::vector<FirmStatement>& firms,
                                                  const std::vector<BankStatement>& banks,
                                                  const RankMatching& matching,
                                                  const AssembleOptions& options = {}) {
    const std::size_t b = interbank.size;
    if (banks.size() != b)
        raise(errc::inconsistent_dimensions,
              "bank table has " + std::to_string(banks.size()) + " rows, interbank has " + std::to_string(b));
    if (matching.anon_index_of.size() != b)
        raise(errc::inconsistent_dimensions, "rank matching does not cover every bank");
    if (relations.bank_count != b)
        raise(errc::inconsistent_dimensions, "relationship graph bank count mismatch");
    if (relations.firm_banks.size() != firms.size())
        raise(errc::inconsistent_dimensions, "relationship graph firm count mismatch");

    // Bank records live at their anonymized interbank index so the copied
    // block keeps its coordinates.
    std::vector<NodeRecord> records(b);
    std::vector<bool> filled(b, false);
    for (const BankStatement& stmt : banks) {
        auto it = matching.anon_index_of.find(stmt.bank_label);
        if (it == matching.anon_index_of.end())
            raise(errc::inconsistent_dimensions, "bank " + stmt.bank_label + " missing from rank matching");
        const std::size_t idx = it->second;
        if (idx >= b || filled[idx])
            raise(errc::inconsistent_dimensions, "rank matching is not a bijection");
        filled[idx] = true;
        NodeRecord& r = records[idx];
        r.id = static_cast<NodeId>(idx);
        r.kind = NodeKind::Bank;
        r.name = stmt.bank_label;
        r.total_assets = stmt.total_assets;
        r.capital = stmt.equity;
    }

    for (std::size_t f = 0; f < firms.size(); ++f) {
        const FirmStatement& stmt = firms[f];
        if (!stmt.connected())
            raise(errc::no_connected_banks, "firm " + stmt.firm_label + " is unconnected");
        if (!stmt.bank_liabilities)
            raise(errc::missing_bank_liabilities,
                  "firm " + stmt.firm_label + " has no aggregate; run estimation first");
        NodeRecord r;
        r.id = static_cast<NodeId>(b + f);
        r.kind = NodeKind::Firm;
        r.name = stmt.firm_label;
        r.total_assets = stmt.total_assets;
        r.capital = stmt.equity;
        r.aggregated_bank_liabilities = *stmt.bank_liabilities;
        r.sector_code = stmt.sector_code;
        records.push_back(std::move(r));
    }

    std::vector<Entry> entries(interbank.entries); // interbank block, verbatim

    ReconstructionReport report;
    report.included_firms = firms.size();
    report.residuals.reserve(firms.size());

    CompensatedAccumulator included;
    CompensatedAccumulator exact;
    std::vector<std::pair<NodeId, double>> weighted;
    for (std::size_t f = 0; f < firms.size(); ++f) {
        const FirmStatement& stmt = firms[f];
        const double aggregate = *stmt.bank_liabilities;
        const NodeId firm_id = static_cast<NodeId>(b + f);

        weighted.clear();
        for (NodeId bank : relations.firm_banks[f])
            weighted.emplace_back(bank, records[bank].total_assets);
        if (weighted.size() == 1) ++report.single_bank_firms;

        PartitionResult part = partition_firm_liabilities(aggregate, weighted);
        if (part.uniform_fallback) report.uniform_fallback_firms.push_back(firm_id);

        double assigned = 0.0;
        for (const auto& [bank, amount] : part.amounts) {
            assigned += amount;
            if (amount > 0.0) entries.push_back({firm_id, bank, amount});
        }
        const double residual = std::abs(assigned - aggregate);
        report.residuals.push_back(residual);
        if (aggregate > 0.0)
            report.max_relative_residual = std::max(report.max_relative_residual, residual / aggregate);

        included.add(aggregate);
        if (stmt.bank_liabilities_origin == BankLiabilityOrigin::Exact) exact.add(aggregate);

        if (options.deposits == DepositWeighting::Proportional && stmt.bank_deposits &&
            *stmt.bank_deposits > 0.0) {
            PartitionResult dep = partition_firm_liabilities(*stmt.bank_deposits, weighted);
            for (const auto& [bank, amount] : dep.amounts) {
                if (amount > 0.0) {
                    entries.push_back({bank, firm_id, amount});
                    ++report.deposit_entries;
                }
            }
        }
    }

    report.included_bank_liabilities = included.value();
    report.exact_share =
        report.included_bank_liabilities > 0.0 ? exact.value() / report.included_bank_liabilities : 0.0;
    const double denom = options.coverage_denominator.value_or(report.included_bank_liabilities);
    report.coverage_share = denom > 0.0 ? report.included_bank_liabilities / denom : 1.0;

    return {build_network(std::move(records), entries), std::move(report)};
}

} // namespace liabnet
