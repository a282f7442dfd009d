#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "liabnet/csv.hpp"
#include "liabnet/errors.hpp"
#include "liabnet/network.hpp"

namespace liabnet {

/// How a firm's aggregated bank liabilities were obtained.
enum class BankLiabilityOrigin : unsigned char {
    Missing,    // no breakdown filed, estimation not yet run
    Exact,      // stated on the balance sheet
    SectorMean, // estimated from same-sector average ratio
    GlobalMean, // estimated from the global average ratio (sector had no exact filers)
    ZeroTotal,  // firm has zero or missing total liabilities; estimate pinned to 0
};

inline std::string_view to_string(BankLiabilityOrigin o) {
    switch (o) {
        case BankLiabilityOrigin::Missing:    return "missing";
        case BankLiabilityOrigin::Exact:      return "exact";
        case BankLiabilityOrigin::SectorMean: return "sector_mean";
        case BankLiabilityOrigin::GlobalMean: return "global_mean";
        case BankLiabilityOrigin::ZeroTotal:  return "zero_total";
    }
    return "unknown";
}

struct FirmStatement {
    std::string firm_label;
    double total_assets = 0.0;
    double equity = 0.0;
    double total_liabilities = 0.0;
    std::optional<double> bank_liabilities;
    BankLiabilityOrigin bank_liabilities_origin = BankLiabilityOrigin::Missing;
    std::string sector_code;              // first-level letter, may be empty
    std::vector<std::string> bank_labels; // associated banks; empty firms are excluded downstream
    std::optional<double> bank_deposits;  // optional deposit aggregate

    bool connected() const { return !bank_labels.empty(); }
};

struct BankStatement {
    std::string bank_label;
    double total_assets = 0.0;
    double equity = 0.0;
    double liabilities_to_banks = 0.0;
    double assets_due_from_banks = 0.0;
};

/// Anonymized interbank liabilities. Indices are their own id space,
/// unrelated to public bank labels until rank matching joins them.
struct InterbankMatrix {
    std::size_t size = 0;
    std::vector<Entry> entries;       // positive amounts, no self-loops, unique (i, j)
    std::vector<double> side_assets;  // per-index total assets on the anonymized scale
};

enum class RejectReason : unsigned char {
    field_count,
    malformed_number,
    negative_value,
    bank_liabilities_exceed_total,
    duplicate_label,
    missing_label,
};

inline std::string_view to_string(RejectReason r) {
    switch (r) {
        case RejectReason::field_count:                   return "field_count";
        case RejectReason::malformed_number:              return "malformed_number";
        case RejectReason::negative_value:                return "negative_value";
        case RejectReason::bank_liabilities_exceed_total: return "bank_liabilities_exceed_total";
        case RejectReason::duplicate_label:               return "duplicate_label";
        case RejectReason::missing_label:                 return "missing_label";
    }
    return "unknown";
}

enum class RowWarning : unsigned char { negative_equity, unconnected_firm };

inline std::string_view to_string(RowWarning w) {
    return w == RowWarning::negative_equity ? "negative_equity" : "unconnected_firm";
}

struct RowReject {
    std::size_t line_no = 0; // 1-based, header is line 1
    RejectReason reason{};
    std::string raw;
};

struct RowNote {
    std::size_t line_no = 0;
    RowWarning warning{};
    std::string label;
};

/// Rows are never dropped silently: anything malformed lands in
/// `rejects` with a machine-readable reason.
template <typename T>
struct ParseResult {
    std::vector<T> rows;
    std::vector<RowReject> rejects;
    std::vector<RowNote> warnings;
};

namespace detail {

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io_error, "cannot open " + path.string());
    return in;
}

inline void expect_header(std::istream& in, std::string_view required,
                          std::string_view optional_tail, bool& has_tail) {
    std::string line;
    if (!csv::next_line(in, line))
        raise(errc::schema_mismatch, "missing header row");
    if (line == required) {
        has_tail = false;
    } else if (!optional_tail.empty() && line == std::string(required) + "," + std::string(optional_tail)) {
        has_tail = true;
    } else {
        raise(errc::schema_mismatch, "unexpected header: " + line);
    }
}

} // namespace detail

/// Parses the firm table. Schema (header row required):
///   firm_label,total_assets,equity,total_liabilities,bank_liabilities,sector_code,bank_labels[,bank_deposits]
/// bank_labels is semicolon-separated; "-" or empty marks an absent value.
inline ParseResult<FirmStatement> parse_firm_table(std::istream& in) {
    bool has_deposits = false;
    detail::expect_header(
        in, "firm_label,total_assets,equity,total_liabilities,bank_liabilities,sector_code,bank_labels",
        "bank_deposits", has_deposits);

    ParseResult<FirmStatement> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 1;
    const std::size_t want_fields = has_deposits ? 8 : 7;

    while (csv::next_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = csv::split(line);
        auto reject = [&](RejectReason r) { out.rejects.push_back({line_no, r, line}); };

        if (fields.size() != want_fields) { reject(RejectReason::field_count); continue; }

        FirmStatement f;
        f.firm_label = std::string(csv::trim(fields[0]));
        if (f.firm_label.empty()) { reject(RejectReason::missing_label); continue; }
        if (!seen.insert(f.firm_label).second) { reject(RejectReason::duplicate_label); continue; }

        auto assets = csv::parse_number(fields[1]);
        auto equity = csv::parse_number(fields[2]);
        auto total_liab = csv::parse_number(fields[3]);
        if (!assets || !equity || !total_liab) { reject(RejectReason::malformed_number); continue; }
        if (*assets < 0.0 || *total_liab < 0.0) { reject(RejectReason::negative_value); continue; }
        f.total_assets = *assets;
        f.equity = *equity;
        f.total_liabilities = *total_liab;

        if (!csv::is_absent(fields[4])) {
            auto bl = csv::parse_number(fields[4]);
            if (!bl) { reject(RejectReason::malformed_number); continue; }
            if (*bl < 0.0) { reject(RejectReason::negative_value); continue; }
            if (*bl > f.total_liabilities) { reject(RejectReason::bank_liabilities_exceed_total); continue; }
            f.bank_liabilities = *bl;
            f.bank_liabilities_origin = BankLiabilityOrigin::Exact;
        }

        if (!csv::is_absent(fields[5])) f.sector_code = std::string(csv::trim(fields[5]));

        if (!csv::is_absent(fields[6])) {
            for (auto part : csv::split(fields[6], ';')) {
                part = csv::trim(part);
                if (!part.empty()) f.bank_labels.emplace_back(part);
            }
        }

        if (has_deposits && !csv::is_absent(fields[7])) {
            auto dep = csv::parse_number(fields[7]);
            if (!dep) { reject(RejectReason::malformed_number); continue; }
            if (*dep < 0.0) { reject(RejectReason::negative_value); continue; }
            f.bank_deposits = *dep;
        }

        if (f.equity < 0.0)
            out.warnings.push_back({line_no, RowWarning::negative_equity, f.firm_label});
        if (!f.connected())
            out.warnings.push_back({line_no, RowWarning::unconnected_firm, f.firm_label});
        out.rows.push_back(std::move(f));
    }
    return out;
}

inline ParseResult<FirmStatement> parse_firm_table(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return parse_firm_table(in);
}

/// Parses the bank table. Schema:
///   bank_label,total_assets,equity,liabilities_to_banks,assets_due_from_banks
inline ParseResult<BankStatement> parse_bank_table(std::istream& in) {
    bool unused = false;
    detail::expect_header(in, "bank_label,total_assets,equity,liabilities_to_banks,assets_due_from_banks",
                          "", unused);

    ParseResult<BankStatement> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 1;
    while (csv::next_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = csv::split(line);
        auto reject = [&](RejectReason r) { out.rejects.push_back({line_no, r, line}); };

        if (fields.size() != 5) { reject(RejectReason::field_count); continue; }
        BankStatement b;
        b.bank_label = std::string(csv::trim(fields[0]));
        if (b.bank_label.empty()) { reject(RejectReason::missing_label); continue; }
        if (!seen.insert(b.bank_label).second) { reject(RejectReason::duplicate_label); continue; }

        auto assets = csv::parse_number(fields[1]);
        auto equity = csv::parse_number(fields[2]);
        auto liab = csv::parse_number(fields[3]);
        auto due = csv::parse_number(fields[4]);
        if (!assets || !equity || !liab || !due) { reject(RejectReason::malformed_number); continue; }
        if (*assets < 0.0 || *liab < 0.0 || *due < 0.0) { reject(RejectReason::negative_value); continue; }
        b.total_assets = *assets;
        b.equity = *equity;
        b.liabilities_to_banks = *liab;
        b.assets_due_from_banks = *due;

        if (b.equity < 0.0)
            out.warnings.push_back({line_no, RowWarning::negative_equity, b.bank_label});
        out.rows.push_back(std::move(b));
    }
    return out;
}

inline ParseResult<BankStatement> parse_bank_table(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return parse_bank_table(in);
}

/// Parses the interbank triplet file and its side file of per-index total
/// assets. Both start with a "n <count>" line; the matrix then holds
/// "<i> <j> <amount>" lines, the side file "<i> <assets>" lines covering
/// every index once. Zero amounts are dropped; anything inconsistent
/// (self-loop, negative, duplicate, bad index) is fatal.
inline InterbankMatrix parse_interbank(std::istream& matrix_in, std::istream& side_in) {
    auto read_count = [](std::istream& in, const char* what) -> std::size_t {
        std::string line;
        if (!csv::next_line(in, line))
            raise(errc::schema_mismatch, std::string("missing n header in ") + what);
        auto parts = csv::split(line, ' ');
        if (parts.size() != 2 || parts[0] != "n")
            raise(errc::schema_mismatch, std::string("bad n header in ") + what + ": " + line);
        auto n = csv::parse_number(parts[1]);
        if (!n || *n < 0 || *n != std::floor(*n))
            raise(errc::schema_mismatch, std::string("bad count in ") + what + ": " + line);
        return static_cast<std::size_t>(*n);
    };

    InterbankMatrix m;
    m.size = read_count(matrix_in, "interbank matrix");

    std::string line;
    std::size_t line_no = 1;
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    while (csv::next_line(matrix_in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto parts = csv::split(line, ' ');
        if (parts.size() != 3)
            raise(errc::schema_mismatch, "interbank line " + std::to_string(line_no) + ": " + line);
        auto i = csv::parse_number(parts[0]);
        auto j = csv::parse_number(parts[1]);
        auto a = csv::parse_number(parts[2]);
        if (!i || !j || !a)
            raise(errc::schema_mismatch, "interbank line " + std::to_string(line_no) + ": " + line);
        if (*i < 0 || *j < 0 || *i >= double(m.size) || *j >= double(m.size))
            raise(errc::index_out_of_range, "interbank line " + std::to_string(line_no) + ": " + line);
        auto ii = static_cast<NodeId>(*i), jj = static_cast<NodeId>(*j);
        if (ii == jj)
            raise(errc::self_loop, "interbank line " + std::to_string(line_no));
        if (!std::isfinite(*a) || *a < 0.0)
            raise(errc::non_finite_amount, "interbank line " + std::to_string(line_no));
        if (!seen.insert({ii, jj}).second)
            raise(errc::duplicate_entry, "interbank line " + std::to_string(line_no));
        if (*a > 0.0) m.entries.push_back({ii, jj, *a});
    }
    std::sort(m.entries.begin(), m.entries.end(), [](const Entry& x, const Entry& y) {
        return std::pair{x.debtor, x.creditor} < std::pair{y.debtor, y.creditor};
    });

    const std::size_t side_n = read_count(side_in, "interbank side file");
    if (side_n != m.size)
        raise(errc::count_mismatch, "side file count " + std::to_string(side_n) +
                                        " vs matrix count " + std::to_string(m.size));
    m.side_assets.assign(m.size, -1.0);
    line_no = 1;
    while (csv::next_line(side_in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto parts = csv::split(line, ' ');
        if (parts.size() != 2)
            raise(errc::schema_mismatch, "side file line " + std::to_string(line_no) + ": " + line);
        auto i = csv::parse_number(parts[0]);
        auto a = csv::parse_number(parts[1]);
        if (!i || !a || *i < 0 || *i >= double(m.size))
            raise(errc::schema_mismatch, "side file line " + std::to_string(line_no) + ": " + line);
        auto ii = static_cast<std::size_t>(*i);
        if (m.side_assets[ii] >= 0.0)
            raise(errc::duplicate_entry, "side file line " + std::to_string(line_no));
        if (!std::isfinite(*a) || *a < 0.0)
            raise(errc::non_finite_amount, "side file line " + std::to_string(line_no));
        m.side_assets[ii] = *a;
    }
    for (std::size_t i = 0; i < m.size; ++i)
        if (m.side_assets[i] < 0.0)
            raise(errc::count_mismatch, "side file misses index " + std::to_string(i));
    return m;
}

inline InterbankMatrix parse_interbank(const std::filesystem::path& matrix_path,
                                       const std::filesystem::path& side_path) {
    auto m = detail::open_input(matrix_path);
    auto s = detail::open_input(side_path);
    return parse_interbank(m, s);
}

/// One firm-bank association from a standalone relations file.
struct RelationRow {
    std::string firm_label;
    std::string bank_label;
};

/// Parses the optional relations list. Schema: firm_label,bank_label —
/// one association per row; when supplied it replaces the bank_labels
/// column of the firm table.
inline ParseResult<RelationRow> parse_relation_list(std::istream& in) {
    bool unused = false;
    detail::expect_header(in, "firm_label,bank_label", "", unused);
    ParseResult<RelationRow> out;
    std::string line;
    std::size_t line_no = 1;
    while (csv::next_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = csv::split(line);
        if (fields.size() != 2) {
            out.rejects.push_back({line_no, RejectReason::field_count, line});
            continue;
        }
        RelationRow r{std::string(csv::trim(fields[0])), std::string(csv::trim(fields[1]))};
        if (r.firm_label.empty() || r.bank_label.empty()) {
            out.rejects.push_back({line_no, RejectReason::missing_label, line});
            continue;
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

inline ParseResult<RelationRow> parse_relation_list(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return parse_relation_list(in);
}

/// How a sector's representative liability ratio is formed from the firms
/// that filed an exact breakdown.
enum class SectorRatioMethod : unsigned char {
    MeanOfRatios, // arithmetic mean of per-firm bank/total ratios
    RatioOfSums,  // sum of bank liabilities over sum of total liabilities
};

/// Fills in missing firm bank-liability aggregates from same-sector
/// average ratios. Exact rows are untouched; firms in sectors without any
/// exact filer fall back to the global mean ratio; firms without positive
/// total liabilities get 0. Idempotent: a second pass finds nothing missing.
inline std::vector<FirmStatement> estimate_bank_liabilities(
    std::vector<FirmStatement> firms,
    SectorRatioMethod method = SectorRatioMethod::MeanOfRatios) {

    struct Pool {
        double ratio_sum = 0.0, bank_sum = 0.0, total_sum = 0.0;
        std::size_t n = 0;
        double ratio(SectorRatioMethod m) const {
            if (n == 0) return 0.0;
            return m == SectorRatioMethod::MeanOfRatios ? ratio_sum / double(n)
                                                        : (total_sum > 0.0 ? bank_sum / total_sum : 0.0);
        }
    };

    std::map<std::string, Pool> sector_pool;
    Pool global_pool;
    for (const FirmStatement& f : firms) {
        if (f.bank_liabilities_origin != BankLiabilityOrigin::Exact) continue;
        if (f.total_liabilities <= 0.0) continue;
        const double r = *f.bank_liabilities / f.total_liabilities;
        auto feed = [&](Pool& p) {
            p.ratio_sum += r;
            p.bank_sum += *f.bank_liabilities;
            p.total_sum += f.total_liabilities;
            ++p.n;
        };
        feed(global_pool);
        if (!f.sector_code.empty()) feed(sector_pool[f.sector_code]);
    }

    for (FirmStatement& f : firms) {
        if (f.bank_liabilities) continue; // exact or already estimated
        if (f.total_liabilities <= 0.0) {
            f.bank_liabilities = 0.0;
            f.bank_liabilities_origin = BankLiabilityOrigin::ZeroTotal;
            continue;
        }
        auto it = f.sector_code.empty() ? sector_pool.end() : sector_pool.find(f.sector_code);
        if (it != sector_pool.end() && it->second.n > 0) {
            f.bank_liabilities = f.total_liabilities * it->second.ratio(method);
            f.bank_liabilities_origin = BankLiabilityOrigin::SectorMean;
        } else {
            f.bank_liabilities = f.total_liabilities * global_pool.ratio(method);
            f.bank_liabilities_origin = BankLiabilityOrigin::GlobalMean;
        }
    }
    return firms;
}

struct RankPair {
    std::size_t rank = 0; // 0 = largest total assets
    std::string bank_label;
    double public_assets = 0.0;
    std::size_t anon_index = 0;
    double anon_assets = 0.0;
    double public_gap = 0.0; // relative asset drop to the next rank, 0 at the last
    double anon_gap = 0.0;
};

struct TieWarning {
    enum class Side : unsigned char { Public, Anon } side{};
    std::size_t rank = 0; // tied with rank + 1
};

/// Result of the rank join between public bank statements and the
/// anonymized interbank side data. Small rank-neighbor gaps mark matches
/// that a slight perturbation would swap.
struct RankMatching {
    std::vector<RankPair> pairs; // ascending rank
    std::unordered_map<std::string, std::size_t> anon_index_of;
    std::vector<TieWarning> ties;
};

/// Joins the two datasets by sorting each side by total assets descending
/// and pairing equal ranks. Ties are broken by stable input order and
/// reported. Fails when the sides disagree on the bank count.
inline RankMatching match_banks_by_rank(const std::vector<BankStatement>& public_side,
                                        const InterbankMatrix& anon) {
    if (public_side.size() != anon.size)
        raise(errc::count_mismatch, "public banks " + std::to_string(public_side.size()) +
                                        " vs interbank " + std::to_string(anon.size));

    std::vector<std::size_t> pub_order(public_side.size()), anon_order(anon.size);
    for (std::size_t i = 0; i < pub_order.size(); ++i) pub_order[i] = i;
    for (std::size_t i = 0; i < anon_order.size(); ++i) anon_order[i] = i;
    std::stable_sort(pub_order.begin(), pub_order.end(), [&](std::size_t a, std::size_t b) {
        return public_side[a].total_assets > public_side[b].total_assets;
    });
    std::stable_sort(anon_order.begin(), anon_order.end(), [&](std::size_t a, std::size_t b) {
        return anon.side_assets[a] > anon.side_assets[b];
    });

    RankMatching out;
    out.pairs.reserve(public_side.size());
    for (std::size_t r = 0; r < pub_order.size(); ++r) {
        const BankStatement& b = public_side[pub_order[r]];
        RankPair p;
        p.rank = r;
        p.bank_label = b.bank_label;
        p.public_assets = b.total_assets;
        p.anon_index = anon_order[r];
        p.anon_assets = anon.side_assets[anon_order[r]];
        out.pairs.push_back(std::move(p));
        if (!out.anon_index_of.emplace(b.bank_label, anon_order[r]).second)
            raise(errc::duplicate_entry, "duplicate bank label " + b.bank_label);
    }
    for (std::size_t r = 0; r + 1 < out.pairs.size(); ++r) {
        RankPair& p = out.pairs[r];
        const RankPair& q = out.pairs[r + 1];
        if (p.public_assets > 0.0) p.public_gap = (p.public_assets - q.public_assets) / p.public_assets;
        if (p.anon_assets > 0.0) p.anon_gap = (p.anon_assets - q.anon_assets) / p.anon_assets;
        if (p.public_assets == q.public_assets)
            out.ties.push_back({TieWarning::Side::Public, r});
        if (p.anon_assets == q.anon_assets)
            out.ties.push_back({TieWarning::Side::Anon, r});
    }
    return out;
}

} // namespace liabnet
