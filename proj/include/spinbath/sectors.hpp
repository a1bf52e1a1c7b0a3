#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "spinbath/constants.hpp"
#include "spinbath/detail/summation.hpp"

namespace spinbath {

struct SectorEntry {
    int two_j;      // 2J
    double weight;  // n(N,J)/4^N, the probability of each (J,m) basis state
};

// Total-spin sectors of N spin-3/2 nuclei in the fully mixed state.
struct SectorTable {
    std::size_t n_spins = 0;
    std::vector<SectorEntry> entries;  // ascending in two_j

    // Σ_J w(J)(2J+1); equals 1 for a complete table.
    double normalization() const {
        detail::NeumaierSum s;
        for (const auto& e : entries) s.add(e.weight * (e.two_j + 1));
        return s.value();
    }
};

namespace detail {

// Direct coupling of one spin-3/2 at a time, carried in probabilities (each step divides by 4).
inline SectorTable sector_weights_recursive(std::size_t n_spins) {
    std::vector<double> w(3 * n_spins + 1, 0.0);
    std::vector<double> next(w.size(), 0.0);
    w[kNuclearTwoSpin] = 1.0 / kNuclearLevels;
    std::size_t top = kNuclearTwoSpin;
    for (std::size_t n = 2; n <= n_spins; ++n) {
        std::fill(next.begin(), next.begin() + static_cast<long>(top + kNuclearTwoSpin + 1), 0.0);
        for (std::size_t tj = top % 2; tj <= top; tj += 2) {
            const double share = w[tj] / kNuclearLevels;
            if (share == 0.0) continue;
            const int lo = std::abs(static_cast<int>(tj) - kNuclearTwoSpin);
            for (int t = lo; t <= static_cast<int>(tj) + kNuclearTwoSpin; t += 2) next[static_cast<std::size_t>(t)] += share;
        }
        top += kNuclearTwoSpin;
        std::swap(w, next);
    }
    SectorTable table;
    table.n_spins = n_spins;
    for (std::size_t tj = top % 2; tj <= top; tj += 2)
        if (w[tj] > 0.0) table.entries.push_back({static_cast<int>(tj), w[tj]});
    return table;
}

// Binomial(n, 1/2) pmf on [lo, hi], built by ratio recurrence outward from the mode and
// normalized over the window.
inline std::vector<double> binomial_half_window(std::size_t n, std::size_t lo, std::size_t hi) {
    std::vector<double> p(hi - lo + 1, 0.0);
    const std::size_t mode = n / 2;
    p[mode - lo] = 1.0;
    for (std::size_t k = mode; k < hi; ++k)
        p[k + 1 - lo] = p[k - lo] * static_cast<double>(n - k) / static_cast<double>(k + 1);
    for (std::size_t k = mode; k > lo; --k)
        p[k - 1 - lo] = p[k - lo] * static_cast<double>(k) / static_cast<double>(n - k + 1);
    NeumaierSum s;
    for (double v : p) s.add(v);
    const double inv = 1.0 / s.value();
    for (auto& v : p) v *= inv;
    return p;
}

// Large-N route: n(N,J)/4^N = P(M=J) − P(M=J+1), with P the distribution of total J_z.
// A uniform variable on {−3/2,…,3/2} is 2X + Y − 3/2 with X, Y fair coins, so P follows from
// two binomials.
inline SectorTable sector_weights_from_projection(std::size_t n_spins) {
    const double sd = 0.5 * std::sqrt(static_cast<double>(n_spins));
    const auto half_width = static_cast<std::size_t>(std::ceil(12.0 * sd)) + 2;
    const std::size_t mode = n_spins / 2;
    const std::size_t lo = mode > half_width ? mode - half_width : 0;
    const std::size_t hi = std::min(n_spins, mode + half_width);
    const auto pb = binomial_half_window(n_spins, lo, hi);

    // S = 2X + Y ranges over [3lo, 3hi].
    const std::size_t s_lo = 3 * lo;
    std::vector<double> ps(3 * (hi - lo) + 1, 0.0);
    for (std::size_t x = lo; x <= hi; ++x) {
        const double px = pb[x - lo];
        for (std::size_t y = lo; y <= hi; ++y) ps[2 * x + y - s_lo] += px * pb[y - lo];
    }
    // 2M = 2S − 3N; keep M ≥ 0.
    auto prob_two_m = [&](long two_m) -> double {
        const long two_s = two_m + 3 * static_cast<long>(n_spins);
        if (two_s % 2 != 0) return 0.0;
        const long s = two_s / 2;
        if (s < static_cast<long>(s_lo) || s >= static_cast<long>(s_lo + ps.size())) return 0.0;
        return ps[static_cast<std::size_t>(s) - s_lo];
    };
    SectorTable table;
    table.n_spins = n_spins;
    const long top = 3 * static_cast<long>(n_spins);
    for (long tj = top % 2; tj <= top; tj += 2) {
        const double a = prob_two_m(tj);
        if (a == 0.0) break;
        const double w = std::max(0.0, a - prob_two_m(tj + 2));
        table.entries.push_back({static_cast<int>(tj), w});
    }
    return table;
}

inline constexpr std::size_t kRecursiveSectorLimit = 4096;

}  // namespace detail

inline SectorTable sector_weights(std::size_t n_spins) {
    if (n_spins < 1 || n_spins > 10'000'000) throw std::invalid_argument("sector_weights: n_spins must be in [1, 1e7]");
    if (n_spins <= detail::kRecursiveSectorLimit) return detail::sector_weights_recursive(n_spins);
    return detail::sector_weights_from_projection(n_spins);
}

}  // namespace spinbath
