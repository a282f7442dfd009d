#pragma once

// Shared fixture builders for the test suites.

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "liabnet/errors.hpp"
#include "liabnet/network.hpp"

namespace fixtures {

inline liabnet::NodeRecord record(liabnet::NodeId id, liabnet::NodeKind kind, double capital = 100.0,
                                  double assets = 1000.0) {
    liabnet::NodeRecord r;
    r.id = id;
    r.kind = kind;
    r.name = std::string(kind == liabnet::NodeKind::Bank ? "B" : "F") + std::to_string(id);
    r.total_assets = assets;
    r.capital = capital;
    return r;
}

/// b banks then c firms with uniform capital/assets.
inline std::vector<liabnet::NodeRecord> records(std::size_t banks, std::size_t firms,
                                                double capital = 100.0) {
    std::vector<liabnet::NodeRecord> out;
    for (std::size_t i = 0; i < banks + firms; ++i)
        out.push_back(record(static_cast<liabnet::NodeId>(i),
                             i < banks ? liabnet::NodeKind::Bank : liabnet::NodeKind::Firm,
                             capital));
    return out;
}

/// A random small network kept in both sparse (library) and dense (oracle)
/// form. Capital occasionally dips to and below zero so the impact cap is
/// exercised.
struct DenseNet {
    std::size_t banks = 0;
    std::vector<std::vector<double>> liab;
    std::vector<double> capital;
    liabnet::LiabilityNetwork net;
};

inline DenseNet random_network(std::mt19937_64& rng, std::size_t max_nodes = 8) {
    std::uniform_int_distribution<std::size_t> node_count(2, max_nodes);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> amount(0.5, 500.0);
    std::uniform_real_distribution<double> cap(-20.0, 300.0);

    const std::size_t n = node_count(rng);
    std::uniform_int_distribution<std::size_t> bank_count(1, n);
    const std::size_t b = bank_count(rng);

    DenseNet d;
    d.banks = b;
    d.liab.assign(n, std::vector<double>(n, 0.0));
    d.capital.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.capital[i] = cap(rng);

    std::vector<liabnet::Entry> entries;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (i >= b && j >= b) continue; // firm->firm stays empty
            if (unit(rng) < 0.35) {
                const double a = amount(rng);
                d.liab[i][j] = a;
                entries.push_back({static_cast<liabnet::NodeId>(i),
                                   static_cast<liabnet::NodeId>(j), a});
            }
        }
    }
    if (entries.empty()) { // force one legal entry: node 0 is always a bank
        const double a = amount(rng);
        d.liab[0][1] = a;
        entries.push_back({0, 1, a});
    }

    auto recs = records(b, n - b);
    for (std::size_t i = 0; i < n; ++i) recs[i].capital = d.capital[i];
    d.net = liabnet::build_network(std::move(recs), entries);
    return d;
}

/// Runs fn and returns the liabnet error code it throws.
template <typename Fn>
liabnet::errc thrown_code(Fn&& fn) {
    try {
        fn();
    } catch (const liabnet::error& e) {
        return e.code();
    }
    throw std::runtime_error("expected a liabnet::error, none was thrown");
}

} // namespace fixtures
