#pragma once

#include <filesystem>
#include <fstream>
#include <locale>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "liabnet/debtrank.hpp"
#include "liabnet/errors.hpp"
#include "liabnet/ingest.hpp"
#include "liabnet/io.hpp"
#include "liabnet/netstats.hpp"
#include "liabnet/network.hpp"
#include "liabnet/reconstruction.hpp"
#include "liabnet/synthgen.hpp"
#include "liabnet/util.hpp"

namespace liabnet {

/// Everything one end-to-end run needs. Identical manifests over identical
/// inputs produce byte-identical report bundles.
struct RunManifest {
    // Either the four input files ...
    std::string firms_path;
    std::string banks_path;
    std::string interbank_path;
    std::string interbank_assets_path; // defaults to interbank_path + ".assets"
    std::string relations_path;        // optional; overrides the firm table's bank_labels
    // ... or a synthetic economy.
    std::optional<SynthConfig> synthetic;

    std::string out_dir;
    std::size_t top_firms = 5000; // analysis subgraph: all banks + top-k firms by liabilities
    std::size_t top_table_rows = 45;
    ValueDirection v_direction = ValueDirection::AsWritten;
    DepositWeighting deposits = DepositWeighting::Off;
    ClusteringConvention clustering = ClusteringConvention::MeanLocal;
    unsigned threads = 0; // 0 = hardware concurrency; never affects output bytes
};

struct PipelineSummary {
    double q1 = 0.0;
    double q2 = 0.0;
    std::size_t banks = 0;
    std::size_t firms_included = 0;
    std::size_t firms_excluded = 0;
    std::size_t analysis_nodes = 0;
    std::vector<std::string> files_written; // paths relative to out_dir
};

/// Analysis subgraph policy: every bank plus the top-k firms by
/// aggregated bank liabilities (ties to the lower node id).
inline std::vector<NodeId> select_analysis_nodes(const LiabilityNetwork& net, std::size_t top_firms) {
    std::vector<NodeId> keep = bank_ids(net);
    std::vector<NodeId> firms;
    firms.reserve(net.firm_count());
    for (NodeId i = static_cast<NodeId>(net.bank_count()); i < net.node_count(); ++i)
        firms.push_back(i);
    std::sort(firms.begin(), firms.end(), [&](NodeId a, NodeId b) {
        const double la = net.record(a).aggregated_bank_liabilities.value_or(0.0);
        const double lb = net.record(b).aggregated_bank_liabilities.value_or(0.0);
        if (la != lb) return la > lb;
        return a < b;
    });
    if (top_firms < firms.size()) firms.resize(top_firms);
    keep.insert(keep.end(), firms.begin(), firms.end());
    return keep;
}

/// The top-n rows of the systemic-importance ranking.
inline std::vector<DebtRankRow> emit_top_table(const LiabilityNetwork& net,
                                               const std::vector<DebtRankResult>& results_f,
                                               std::size_t n) {
    if (results_f.empty()) raise(errc::invalid_argument, "no results to rank");
    std::vector<DebtRankRow> rows = debtrank_table(net, results_f, {});
    if (n < rows.size()) rows.resize(n);
    return rows;
}

namespace detail {

struct LoadedInputs {
    std::vector<FirmStatement> firms;
    std::vector<BankStatement> banks;
    InterbankMatrix interbank;
    std::vector<RowReject> rejects;
    std::vector<RowNote> warnings;
};

inline void require_file(const std::string& path, const char* what) {
    if (path.empty())
        raise(errc::invalid_config, std::string(what) + " path is empty");
    if (!std::filesystem::exists(path))
        raise(errc::invalid_config, std::string(what) + " file does not exist: " + path);
}

inline LoadedInputs load_inputs(const RunManifest& m) {
    LoadedInputs in;
    if (m.synthetic) {
        SynthData synth = generate(*m.synthetic);
        in.firms = std::move(synth.firms);
        in.banks = std::move(synth.banks);
        in.interbank = std::move(synth.interbank);
        return in;
    }
    const std::string side_path =
        m.interbank_assets_path.empty() ? m.interbank_path + ".assets" : m.interbank_assets_path;
    require_file(m.firms_path, "firm table");
    require_file(m.banks_path, "bank table");
    require_file(m.interbank_path, "interbank matrix");
    require_file(side_path, "interbank side");
    if (!m.relations_path.empty()) require_file(m.relations_path, "relations");

    auto firms = parse_firm_table(std::filesystem::path(m.firms_path));
    auto banks = parse_bank_table(std::filesystem::path(m.banks_path));
    in.firms = std::move(firms.rows);
    in.banks = std::move(banks.rows);
    in.rejects = std::move(firms.rejects);
    in.rejects.insert(in.rejects.end(), banks.rejects.begin(), banks.rejects.end());
    in.warnings = std::move(firms.warnings);
    in.warnings.insert(in.warnings.end(), banks.warnings.begin(), banks.warnings.end());
    in.interbank = parse_interbank(std::filesystem::path(m.interbank_path),
                                   std::filesystem::path(side_path));

    if (!m.relations_path.empty()) {
        auto rel = parse_relation_list(std::filesystem::path(m.relations_path));
        in.rejects.insert(in.rejects.end(), rel.rejects.begin(), rel.rejects.end());
        std::unordered_map<std::string, std::vector<std::string>> by_firm;
        for (const auto& [firm, bank] : rel.rows) by_firm[firm].push_back(bank);
        for (FirmStatement& f : in.firms) {
            auto it = by_firm.find(f.firm_label);
            f.bank_labels = it == by_firm.end() ? std::vector<std::string>{} : it->second;
        }
    }
    return in;
}

} // namespace detail

inline PipelineSummary run_pipeline(const RunManifest& manifest) {
    if (manifest.out_dir.empty())
        raise(errc::invalid_config, "output directory is empty");
    if (manifest.synthetic) manifest.synthetic->validate();

    // 1. Load and estimate. Nothing is written until every stage is done.
    detail::LoadedInputs inputs = detail::load_inputs(manifest);

    // Serialize synthetic inputs now, before estimation mutates the rows.
    std::vector<std::pair<std::string, std::string>> synth_files;
    if (manifest.synthetic) {
        std::ostringstream firms_os, banks_os, matrix_os, side_os;
        write_firm_table(firms_os, inputs.firms);
        write_bank_table(banks_os, inputs.banks);
        write_interbank(matrix_os, side_os, inputs.interbank);
        synth_files.emplace_back("inputs/firms.csv", firms_os.str());
        synth_files.emplace_back("inputs/banks.csv", banks_os.str());
        synth_files.emplace_back("inputs/interbank.txt", matrix_os.str());
        synth_files.emplace_back("inputs/interbank.txt.assets", side_os.str());
    }

    inputs.firms = estimate_bank_liabilities(std::move(inputs.firms));

    // 2. Join the anonymized interbank data with the public statements.
    RankMatching matching = match_banks_by_rank(inputs.banks, inputs.interbank);

    // 3. Exclude firms that cannot be associated with a bank.
    std::vector<FirmStatement> included;
    std::vector<std::pair<std::string, std::string>> excluded; // label, reason
    CompensatedAccumulator all_liabilities;
    for (FirmStatement& f : inputs.firms) {
        all_liabilities.add(f.bank_liabilities.value_or(0.0));
        if (!f.connected()) {
            excluded.emplace_back(f.firm_label, "no_bank_links");
            continue;
        }
        bool known = true;
        for (const std::string& label : f.bank_labels)
            if (!matching.anon_index_of.count(label)) { known = false; break; }
        if (!known) {
            excluded.emplace_back(f.firm_label, "unknown_bank_label");
            continue;
        }
        included.push_back(std::move(f));
    }

    // 4. Assemble the full liability network.
    RelationshipGraph relations = build_relationship_graph(included, matching, inputs.interbank.size);
    AssembleOptions opts;
    opts.deposits = manifest.deposits;
    opts.coverage_denominator = all_liabilities.value();
    AssembledNetwork assembled =
        assemble_liability_matrix(inputs.interbank, relations, included, inputs.banks, matching, opts);
    const LiabilityNetwork& full = assembled.network;
    if (full.node_count() == 0)
        raise(errc::empty_network, "no nodes survived ingestion");

    // 5. Analysis subgraph and the interbank subnetwork.
    std::vector<NodeId> keep = select_analysis_nodes(full, manifest.top_firms);
    LiabilityNetwork analysis = subnetwork(full, keep);
    if (analysis.entry_count() == 0)
        raise(errc::empty_network, "analysis network has no liabilities");
    LiabilityNetwork interbank_net = subnetwork(analysis, bank_ids(analysis));

    // 6. DebtRank on both networks.
    EconomicValueVector v_f = economic_value(analysis, manifest.v_direction);
    ImpactMatrix w_f = impact_matrix(analysis);
    std::vector<DebtRankResult> results_f =
        debtrank_all(w_f, v_f, manifest.threads, NetworkTag::F);

    std::vector<DebtRankResult> results_b;
    double volume_b = 0.0;
    if (interbank_net.entry_count() > 0) {
        EconomicValueVector v_b = economic_value(interbank_net, manifest.v_direction);
        ImpactMatrix w_b = impact_matrix(interbank_net);
        results_b = debtrank_all(w_b, v_b, manifest.threads, NetworkTag::B);
        volume_b = v_b.total_liabilities;
    } else {
        DebtRankResult blank;
        blank.network = NetworkTag::B;
        results_b.assign(interbank_net.node_count(), blank);
    }

    double risk_f = 0.0;
    for (const auto& r : results_f) risk_f += r.value;
    const double q1 = risk_f > 0.0 ? ratio_q1(results_f, analysis) : 0.0;
    const double q2 =
        risk_f > 0.0 ? ratio_q2(results_b, results_f, volume_b, v_f.total_liabilities) : 0.0;

    // 7. Statistics.
    DegreeDistribution deg_f = degree_stats(analysis, {.bins = 60, .lo = 0.0, .hi = 3000.0});
    DegreeDistribution deg_b = degree_stats(interbank_net, {.bins = 60, .lo = 0.0, .hi = 360.0});
    ClusteringReport clus_f = global_clustering(analysis);
    ClusteringReport clus_b = global_clustering(interbank_net);

    std::vector<DebtRankRow> table = debtrank_table(analysis, results_f, results_b);

    // 8. Render the whole bundle in memory, then write.
    std::vector<std::pair<std::string, std::string>> files;
    auto render = [&files](std::string name, auto&& fn) {
        std::ostringstream os;
        os.imbue(std::locale::classic());
        fn(os);
        files.emplace_back(std::move(name), os.str());
    };

    render("network.txt", [&](std::ostream& os) { write_network_triplets(os, full); });

    render("nodes.csv", [&](std::ostream& os) {
        os << "node_id,node_label,kind,sector_code,total_assets,capital,aggregated_bank_liabilities\n";
        for (const NodeRecord& r : full.records()) {
            os << r.id << ',' << r.name << ',' << to_string(r.kind) << ','
               << (r.sector_code.empty() ? "-" : r.sector_code) << ',' << fmt_double(r.total_assets)
               << ',' << fmt_double(r.capital) << ',';
            if (r.aggregated_bank_liabilities) os << fmt_double(*r.aggregated_bank_liabilities);
            else os << '-';
            os << "\n";
        }
    });

    render("reconstruction_report.txt", [&](std::ostream& os) {
        const ReconstructionReport& rep = assembled.report;
        write_kv(os, "included_firms", rep.included_firms);
        write_kv(os, "excluded_firms", excluded.size());
        write_kv(os, "coverage_share", rep.coverage_share);
        write_kv(os, "exact_share", rep.exact_share);
        write_kv(os, "single_bank_firms", rep.single_bank_firms);
        write_kv(os, "uniform_fallback_firms", rep.uniform_fallback_firms.size());
        write_kv(os, "max_relative_residual", rep.max_relative_residual);
        write_kv(os, "included_bank_liabilities", rep.included_bank_liabilities);
        write_kv(os, "deposit_entries", rep.deposit_entries);
        write_kv(os, "deposit_weighting", to_string(manifest.deposits));
    });

    render("excluded_firms.csv", [&](std::ostream& os) {
        os << "firm_label,reason\n";
        for (const auto& [label, reason] : excluded) os << label << ',' << reason << "\n";
    });

    render("rejects.csv", [&](std::ostream& os) {
        os << "line_no,reason,raw\n";
        for (const RowReject& r : inputs.rejects)
            os << r.line_no << ',' << to_string(r.reason) << ',' << r.raw << "\n";
    });

    render("warnings.csv", [&](std::ostream& os) {
        os << "line_no,warning,label\n";
        for (const RowNote& w : inputs.warnings)
            os << w.line_no << ',' << to_string(w.warning) << ',' << w.label << "\n";
    });

    render("debtrank.csv", [&](std::ostream& os) { write_debtrank_table(os, table); });

    render("top_nodes.csv",
           [&](std::ostream& os) { write_top_table(os, table, manifest.top_table_rows); });

    render("degrees_entire.csv", [&](std::ostream& os) { write_degrees_csv(os, analysis, deg_f); });
    render("degrees_interbank.csv",
           [&](std::ostream& os) { write_degrees_csv(os, interbank_net, deg_b); });
    render("hist_in_entire.csv", [&](std::ostream& os) { write_histogram_csv(os, deg_f.in_hist); });
    render("hist_out_entire.csv", [&](std::ostream& os) { write_histogram_csv(os, deg_f.out_hist); });
    render("hist_in_interbank.csv",
           [&](std::ostream& os) { write_histogram_csv(os, deg_b.in_hist); });
    render("hist_out_interbank.csv",
           [&](std::ostream& os) { write_histogram_csv(os, deg_b.out_hist); });

    render("clustering.txt", [&](std::ostream& os) {
        auto section = [&](const char* tag, const ClusteringReport& rep) {
            const double headline = manifest.clustering == ClusteringConvention::MeanLocal
                                        ? rep.mean_local_clustering
                                        : rep.transitivity;
            write_kv(os, std::string(tag) + ".nodes", rep.node_count);
            write_kv(os, std::string(tag) + ".undirected_links", rep.undirected_edge_count);
            write_kv(os, std::string(tag) + ".clustering", headline);
            write_kv(os, std::string(tag) + ".mean_local", rep.mean_local_clustering);
            write_kv(os, std::string(tag) + ".transitivity", rep.transitivity);
            write_kv(os, std::string(tag) + ".random_baseline", rep.random_baseline);
        };
        section("entire", clus_f);
        section("interbank", clus_b);
        write_kv(os, "convention", to_string(manifest.clustering));
        write_kv(os, "low_degree_rule", "nodes with degree < 2 contribute 0 to the mean");
    });

    render("summary.txt", [&](std::ostream& os) {
        write_kv(os, "q1", q1);
        write_kv(os, "q2", q2);
        write_kv(os, "total_debtrank_entire", risk_f);
        write_kv(os, "volume_entire", v_f.total_liabilities);
        write_kv(os, "volume_interbank", volume_b);
        write_kv(os, "banks", full.bank_count());
        write_kv(os, "firms_full_network", full.firm_count());
        write_kv(os, "non_positive_capital_nodes", full.non_positive_capital_nodes().size());
        write_kv(os, "firms_analysis", analysis.firm_count());
        write_kv(os, "analysis_nodes", analysis.node_count());
        write_kv(os, "analysis_entries", analysis.entry_count());
        write_kv(os, "top_firms", manifest.top_firms);
        write_kv(os, "v_direction",
                 manifest.v_direction == ValueDirection::AsWritten ? "as-written" : "transposed");
        write_kv(os, "deposits", to_string(manifest.deposits));
        write_kv(os, "clustering_convention", to_string(manifest.clustering));
    });

    for (auto& f : synth_files) files.push_back(std::move(f));

    namespace fs = std::filesystem;
    fs::create_directories(manifest.out_dir);
    if (manifest.synthetic) fs::create_directories(fs::path(manifest.out_dir) / "inputs");
    PipelineSummary summary;
    for (auto& [name, content] : files) {
        const fs::path path = fs::path(manifest.out_dir) / name;
        std::ofstream os(path, std::ios::binary);
        if (!os) raise(errc::io_error, "cannot write " + path.string());
        os << content;
        summary.files_written.push_back(name);
    }

    summary.q1 = q1;
    summary.q2 = q2;
    summary.banks = full.bank_count();
    summary.firms_included = full.firm_count();
    summary.firms_excluded = excluded.size();
    summary.analysis_nodes = analysis.node_count();
    return summary;
}

} // namespace liabnet
