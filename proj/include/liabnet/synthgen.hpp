#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "liabnet/errors.hpp"
#include "liabnet/ingest.hpp"
#include "liabnet/util.hpp"

namespace liabnet {

/// Parameters of a synthetic bank-firm economy. Balance sheets are
/// heavy-tailed, most firms connect to one or two banks, and larger banks
/// attract more firms. One seed fixes every draw, so a config generates
/// byte-identical files on every run.
struct SynthConfig {
    std::size_t n_banks = 50;
    std::size_t n_firms = 500;
    std::uint64_t seed = 1;
    double asset_tail_exponent = 2.5;  // pdf ~ x^-a, must be > 1
    double interbank_density = 0.05;   // directed edge probability between banks
    std::vector<double> firm_bank_degree_weights = {0.55, 0.25, 0.12, 0.05, 0.03}; // degree 1..k
    double capital_fraction_min = 0.03;
    double capital_fraction_max = 0.20;
    double exact_breakdown_share = 0.5; // firms filing bank_liabilities exactly
    bool with_deposits = false;
    double deposit_fraction_max = 0.3;  // deposits up to this fraction of firm assets
    double interbank_scale = 1.0;       // linear transform applied to the anonymized side

    void validate() const {
        if (n_banks == 0 || n_firms == 0)
            raise(errc::invalid_config, "n_banks and n_firms must be positive");
        if (!(asset_tail_exponent > 1.0))
            raise(errc::invalid_config, "asset_tail_exponent must exceed 1");
        if (!(interbank_density > 0.0) || interbank_density > 1.0)
            raise(errc::invalid_config, "interbank_density must lie in (0, 1]");
        if (firm_bank_degree_weights.empty())
            raise(errc::invalid_config, "firm_bank_degree_weights is empty");
        double wsum = 0.0;
        for (double w : firm_bank_degree_weights) {
            if (w < 0.0) raise(errc::invalid_config, "degree weights must be >= 0");
            wsum += w;
        }
        if (!(wsum > 0.0)) raise(errc::invalid_config, "degree weights sum to zero");
        if (!(capital_fraction_min > 0.0) || !(capital_fraction_max < 1.0) ||
            capital_fraction_min > capital_fraction_max)
            raise(errc::invalid_config, "capital fractions must satisfy 0 < min <= max < 1");
        if (exact_breakdown_share < 0.0 || exact_breakdown_share > 1.0)
            raise(errc::invalid_config, "exact_breakdown_share must lie in [0, 1]");
        if (deposit_fraction_max < 0.0 || deposit_fraction_max >= 1.0)
            raise(errc::invalid_config, "deposit_fraction_max must lie in [0, 1)");
        if (!(interbank_scale > 0.0))
            raise(errc::invalid_config, "interbank_scale must be positive");
    }
};

inline SynthConfig synth_config_from_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::invalid_config, std::string("config is not valid JSON: ") + e.what());
    }
    SynthConfig c;
    static const std::vector<std::string> known = {
        "n_banks", "n_firms", "seed", "asset_tail_exponent", "interbank_density",
        "firm_bank_degree_weights", "capital_fraction_min", "capital_fraction_max",
        "exact_breakdown_share", "with_deposits", "deposit_fraction_max", "interbank_scale"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            raise(errc::invalid_config, "unknown config key: " + it.key());
    }
    try {
        c.n_banks = j.value("n_banks", c.n_banks);
        c.n_firms = j.value("n_firms", c.n_firms);
        c.seed = j.value("seed", c.seed);
        c.asset_tail_exponent = j.value("asset_tail_exponent", c.asset_tail_exponent);
        c.interbank_density = j.value("interbank_density", c.interbank_density);
        c.firm_bank_degree_weights = j.value("firm_bank_degree_weights", c.firm_bank_degree_weights);
        c.capital_fraction_min = j.value("capital_fraction_min", c.capital_fraction_min);
        c.capital_fraction_max = j.value("capital_fraction_max", c.capital_fraction_max);
        c.exact_breakdown_share = j.value("exact_breakdown_share", c.exact_breakdown_share);
        c.with_deposits = j.value("with_deposits", c.with_deposits);
        c.deposit_fraction_max = j.value("deposit_fraction_max", c.deposit_fraction_max);
        c.interbank_scale = j.value("interbank_scale", c.interbank_scale);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::invalid_config, std::string("config field has wrong type: ") + e.what());
    }
    c.validate();
    return c;
}

inline SynthConfig synth_config_from_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io_error, "cannot open " + path.string());
    return synth_config_from_json(in);
}

struct SynthData {
    std::vector<FirmStatement> firms;
    std::vector<BankStatement> banks; // public side, label order
    InterbankMatrix interbank;        // indices are a hidden permutation of the banks
};

namespace detail {

inline std::string padded_label(char prefix, std::size_t index, std::size_t width) {
    std::string digits = std::to_string(index + 1);
    std::string out(1, prefix);
    if (digits.size() < width) out.append(width - digits.size(), '0');
    return out + digits;
}

// Pareto draw with pdf ~ x^(-a) above x_min.
inline double pareto(std::mt19937_64& rng, double tail_exponent, double x_min) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double p = u(rng);
    if (p >= 1.0) p = std::nextafter(1.0, 0.0);
    return x_min * std::pow(1.0 - p, -1.0 / (tail_exponent - 1.0));
}

} // namespace detail

/// Generates firm statements, bank statements and an anonymized interbank
/// matrix that together form a valid pipeline input. The interbank index
/// space is a random permutation of the banks and its side assets carry
/// the configured linear transform, so rank matching is exercised for real.
inline SynthData generate(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SynthData out;
    const std::size_t b = cfg.n_banks;
    const std::size_t bank_width = std::to_string(b).size() + 1;
    const std::size_t firm_width = std::to_string(cfg.n_firms).size() + 1;

    // Banks: heavy-tailed assets, capital as a fraction of assets.
    std::vector<double> bank_assets(b);
    out.banks.resize(b);
    for (std::size_t i = 0; i < b; ++i) {
        bank_assets[i] = detail::pareto(rng, cfg.asset_tail_exponent, 1e8);
        BankStatement& s = out.banks[i];
        s.bank_label = detail::padded_label('B', i, bank_width);
        s.total_assets = bank_assets[i];
        s.equity = bank_assets[i] *
                   (cfg.capital_fraction_min +
                    unit(rng) * (cfg.capital_fraction_max - cfg.capital_fraction_min));
    }

    // Hidden permutation: public position -> anonymized index.
    std::vector<std::size_t> anon_of(b);
    std::iota(anon_of.begin(), anon_of.end(), 0);
    std::shuffle(anon_of.begin(), anon_of.end(), rng);

    out.interbank.size = b;
    out.interbank.side_assets.assign(b, 0.0);
    for (std::size_t i = 0; i < b; ++i)
        out.interbank.side_assets[anon_of[i]] = bank_assets[i] * cfg.interbank_scale;

    // Interbank entries, generated in anonymized coordinates.
    std::vector<std::size_t> public_of(b);
    for (std::size_t i = 0; i < b; ++i) public_of[anon_of[i]] = i;
    std::vector<double> owed_by(b, 0.0), owed_to(b, 0.0);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
            if (i == j) continue;
            if (unit(rng) >= cfg.interbank_density) continue;
            const double base = std::min(out.interbank.side_assets[i], out.interbank.side_assets[j]);
            const double amount = base * (0.001 + 0.049 * unit(rng));
            if (amount <= 0.0) continue;
            out.interbank.entries.push_back(
                {static_cast<NodeId>(i), static_cast<NodeId>(j), amount});
            owed_by[i] += amount;
            owed_to[j] += amount;
        }
    }
    for (std::size_t i = 0; i < b; ++i) {
        out.banks[public_of[i]].liabilities_to_banks = owed_by[i] / cfg.interbank_scale;
        out.banks[public_of[i]].assets_due_from_banks = owed_to[i] / cfg.interbank_scale;
    }

    // Firms: degree from the configured distribution, banks drawn with
    // probability proportional to their assets.
    std::discrete_distribution<std::size_t> degree_dist(cfg.firm_bank_degree_weights.begin(),
                                                        cfg.firm_bank_degree_weights.end());
    std::discrete_distribution<std::size_t> bank_pick(bank_assets.begin(), bank_assets.end());
    static constexpr char kSectors[] = "ABCDEFGHIJKLMNOPQRST";

    out.firms.resize(cfg.n_firms);
    for (std::size_t f = 0; f < cfg.n_firms; ++f) {
        FirmStatement& s = out.firms[f];
        s.firm_label = detail::padded_label('F', f, firm_width);
        s.total_assets = detail::pareto(rng, cfg.asset_tail_exponent, 1e5);
        const double frac = cfg.capital_fraction_min +
                            unit(rng) * (cfg.capital_fraction_max - cfg.capital_fraction_min);
        s.equity = s.total_assets * frac;
        s.total_liabilities = s.total_assets - s.equity;
        s.sector_code = std::string(1, kSectors[std::size_t(unit(rng) * (sizeof(kSectors) - 1))]);

        std::size_t degree = degree_dist(rng) + 1;
        degree = std::min(degree, b);
        std::vector<std::size_t> chosen;
        while (chosen.size() < degree) {
            std::size_t pick = bank_pick(rng);
            if (std::find(chosen.begin(), chosen.end(), pick) == chosen.end())
                chosen.push_back(pick);
        }
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t c : chosen) s.bank_labels.push_back(out.banks[c].bank_label);

        const double bank_share = 0.3 + 0.65 * unit(rng);
        const double bank_liab = s.total_liabilities * bank_share;
        if (unit(rng) < cfg.exact_breakdown_share) {
            s.bank_liabilities = bank_liab;
            s.bank_liabilities_origin = BankLiabilityOrigin::Exact;
        }
        if (cfg.with_deposits)
            s.bank_deposits = s.total_assets * cfg.deposit_fraction_max * unit(rng);
    }

    std::sort(out.interbank.entries.begin(), out.interbank.entries.end(),
              [](const Entry& x, const Entry& y) {
                  return std::pair{x.debtor, x.creditor} < std::pair{y.debtor, y.creditor};
              });
    return out;
}

// --- writers emitting exactly the formats the parsers read ---

inline void write_firm_table(std::ostream& os, const std::vector<FirmStatement>& firms) {
    bool any_deposits = false;
    for (const auto& f : firms) any_deposits |= f.bank_deposits.has_value();
    os << "firm_label,total_assets,equity,total_liabilities,bank_liabilities,sector_code,bank_labels";
    if (any_deposits) os << ",bank_deposits";
    os << "\n";
    for (const FirmStatement& f : firms) {
        os << f.firm_label << ',' << fmt_double(f.total_assets) << ',' << fmt_double(f.equity)
           << ',' << fmt_double(f.total_liabilities) << ',';
        if (f.bank_liabilities && f.bank_liabilities_origin == BankLiabilityOrigin::Exact)
            os << fmt_double(*f.bank_liabilities);
        else
            os << '-';
        os << ',' << (f.sector_code.empty() ? "-" : f.sector_code) << ',';
        for (std::size_t i = 0; i < f.bank_labels.size(); ++i) {
            if (i) os << ';';
            os << f.bank_labels[i];
        }
        if (f.bank_labels.empty()) os << '-';
        if (any_deposits) {
            os << ',';
            if (f.bank_deposits) os << fmt_double(*f.bank_deposits);
            else os << '-';
        }
        os << "\n";
    }
}

inline void write_bank_table(std::ostream& os, const std::vector<BankStatement>& banks) {
    os << "bank_label,total_assets,equity,liabilities_to_banks,assets_due_from_banks\n";
    for (const BankStatement& s : banks)
        os << s.bank_label << ',' << fmt_double(s.total_assets) << ',' << fmt_double(s.equity)
           << ',' << fmt_double(s.liabilities_to_banks) << ','
           << fmt_double(s.assets_due_from_banks) << "\n";
}

inline void write_interbank(std::ostream& matrix_os, std::ostream& side_os,
                            const InterbankMatrix& m) {
    matrix_os << "n " << m.size << "\n";
    for (const Entry& e : m.entries)
        matrix_os << e.debtor << ' ' << e.creditor << ' ' << fmt_double(e.amount) << "\n";
    side_os << "n " << m.size << "\n";
    for (std::size_t i = 0; i < m.side_assets.size(); ++i)
        side_os << i << ' ' << fmt_double(m.side_assets[i]) << "\n";
}

} // namespace liabnet
