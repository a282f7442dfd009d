#pragma once

// Test-only reference implementation of the distress cascade: dense
// matrices, whole-vector scans, a literal transcription of the recursion.
// Deliberately kept free of library machinery so it can arbitrate the
// sparse implementation.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace oracle {

inline std::vector<double> value_shares(const std::vector<std::vector<double>>& liab,
                                        bool transposed = false) {
    const std::size_t n = liab.size();
    std::vector<double> v(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            total += liab[i][j];
            v[transposed ? i : j] += liab[i][j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) v[i] /= total;
    return v;
}

inline std::vector<std::vector<double>> impact(const std::vector<std::vector<double>>& liab,
                                               const std::vector<double>& capital) {
    const std::size_t n = liab.size();
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (liab[i][j] > 0.0)
                w[i][j] = capital[j] <= 0.0 ? 1.0 : std::min(liab[i][j] / capital[j], 1.0);
    return w;
}

struct Result {
    double r = 0.0;
    std::vector<double> final_h;
    std::size_t steps = 0;
    std::vector<std::vector<double>> h_trace; // h after every step, starting at t = 1
};

inline Result debtrank(const std::vector<std::vector<double>>& liab,
                       const std::vector<double>& capital,
                       const std::vector<double>& v,
                       const std::vector<std::size_t>& seeds,
                       bool include_initial = false) {
    const std::size_t n = liab.size();
    const auto w = impact(liab, capital);

    enum State { U, D, I };
    std::vector<double> h(n, 0.0);
    std::vector<State> s(n, U);
    for (std::size_t d : seeds) {
        h[d] = 1.0;
        s[d] = D;
    }

    Result res;
    res.h_trace.push_back(h);
    std::size_t t = 1;
    while (true) {
        bool any_distressed = false;
        for (std::size_t i = 0; i < n; ++i) any_distressed |= (s[i] == D);
        if (!any_distressed) break;

        std::vector<double> h_next(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double incoming = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (s[j] == D) incoming += w[j][i] * h[j];
            h_next[i] = std::min(1.0, h[i] + incoming);
        }
        std::vector<State> s_next(n, U);
        for (std::size_t i = 0; i < n; ++i) {
            if (s[i] == D) s_next[i] = I;
            else if (h_next[i] > 0.0 && s[i] != I) s_next[i] = D;
            else s_next[i] = s[i];
        }
        h = std::move(h_next);
        s = std::move(s_next);
        ++t;
        res.h_trace.push_back(h);
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += h[i] * v[i];
    double initial = 0.0;
    for (std::size_t d : seeds) initial += v[d]; // h at t = 1 is 1 on every seed
    res.r = include_initial ? total : total - initial;
    res.final_h = std::move(h);
    res.steps = t;
    return res;
}

} // namespace oracle
