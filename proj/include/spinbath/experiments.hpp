#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "spinbath/box_channel.hpp"
#include "spinbath/dephasing.hpp"
#include "spinbath/entanglement.hpp"
#include "spinbath/material.hpp"

namespace spinbath {

struct DotConfig {
    std::size_t n_spins = 50;     // box-model nuclei actually simulated
    double a_total_uev = 83.0;    // physical Σ_k A_k
    DotGeometry geometry;         // geometry.n_cells doubles as the physical nucleus count N

    double physical_nuclei() const { return static_cast<double>(geometry.n_cells); }
    double box_coupling() const { return box_total_coupling(a_total_uev, physical_nuclei(), n_spins); }

    bool operator==(const DotConfig& o) const {
        return n_spins == o.n_spins && a_total_uev == o.a_total_uev && geometry.l_perp_nm == o.geometry.l_perp_nm &&
               geometry.l_z_nm == o.geometry.l_z_nm && geometry.n_cells == o.geometry.n_cells &&
               geometry.rng_seed == o.geometry.rng_seed && geometry.grid_extent == o.geometry.grid_extent;
    }
};

struct TimeGrid {
    double t_max_ns = 100.0;
    std::size_t t_steps = 2000;  // number of samples including t = 0 and t = t_max

    void validate() const {
        if (!(t_max_ns > 0.0)) throw std::invalid_argument("grid: t_max_ns must be positive");
        if (t_steps < 2) throw std::invalid_argument("grid: t_steps must be >= 2");
    }
    double step() const { return t_max_ns / static_cast<double>(t_steps - 1); }
    std::vector<double> times() const {
        validate();
        std::vector<double> t(t_steps);
        for (std::size_t i = 0; i < t_steps; ++i) t[i] = t_max_ns * static_cast<double>(i) / static_cast<double>(t_steps - 1);
        return t;
    }
};

struct ExperimentConfig {
    PhysicalConstants constants;
    MaterialSpec material = gaas();
    std::array<DotConfig, 2> dots{};
    TimeGrid grid;
    double horizon_ns = 100.0;
    double zero_tol = 1e-9;
    BellLabel bell = BellLabel::PsiPlus;

    void validate() const {
        material.validate();
        grid.validate();
        for (const auto& d : dots) {
            d.geometry.validate();
            if (d.n_spins < 1) throw std::invalid_argument("dot: n_spins must be >= 1");
            if (!(d.a_total_uev > 0.0)) throw std::invalid_argument("dot: a_total_uev must be positive");
        }
        if (!(horizon_ns > 0.0) || horizon_ns > grid.t_max_ns * (1.0 + 1e-12))
            throw std::invalid_argument("horizon_ns must lie in (0, t_max_ns]");
        if (!(zero_tol >= 0.0)) throw std::invalid_argument("zero_tol must be non-negative");
    }
};

// Box channels of both dots at one field; identical dots share a channel.
class DotPair {
public:
    DotPair(const ExperimentConfig& cfg, double b_tesla) {
        first_ = make(cfg, cfg.dots[0], b_tesla);
        second_ = cfg.dots[1] == cfg.dots[0] ? first_ : make(cfg, cfg.dots[1], b_tesla);
    }
    std::array<ChannelSnapshot, 2> at(double t) const {
        const auto a = first_->at(t);
        return {a, second_ == first_ ? a : second_->at(t)};
    }
    bool identical() const { return first_ == second_; }

private:
    static std::shared_ptr<const BoxChannel> make(const ExperimentConfig& cfg, const DotConfig& d, double b) {
        return std::make_shared<const BoxChannel>(sector_weights(d.n_spins), d.box_coupling(), b, cfg.constants,
                                                  cfg.material);
    }
    std::shared_ptr<const BoxChannel> first_;
    std::shared_ptr<const BoxChannel> second_;
};

struct EntanglementTrace {
    std::vector<double> times;
    std::vector<double> concurrence;
    std::vector<double> witness;
    std::vector<std::array<ChannelSnapshot, 2>> snapshots;
};

inline double witness_at(const std::array<ChannelSnapshot, 2>& s, BellLabel label) {
    return witness_w(apply_product_channel(bell_state(label), s[0], s[1]), label);
}

inline EntanglementTrace entanglement_trace(const ExperimentConfig& cfg, double b_tesla, const std::vector<double>& times) {
    const DotPair pair(cfg, b_tesla);
    EntanglementTrace out;
    out.times = times;
    out.concurrence.reserve(times.size());
    out.witness.reserve(times.size());
    out.snapshots.reserve(times.size());
    for (double t : times) {
        const auto s = pair.at(t);
        out.snapshots.push_back(s);
        out.concurrence.push_back(concurrence_closed_form(s[0], s[1]));
        out.witness.push_back(witness_at(s, cfg.bell));
    }
    return out;
}

inline std::vector<double> concurrence_trace(const ExperimentConfig& cfg, double b_tesla, const std::vector<double>& times) {
    const DotPair pair(cfg, b_tesla);
    std::vector<double> c;
    c.reserve(times.size());
    for (double t : times) {
        const auto s = pair.at(t);
        c.push_back(concurrence_closed_form(s[0], s[1]));
    }
    return c;
}

struct SuddenDeathResult {
    std::optional<double> t_sd;
    std::optional<double> witness_zero;
    double horizon = 0.0;
    int revival_count = 0;
    std::string diagnostic;
};

namespace detail {

// Shrinks [lo, hi] with pred(lo) false and pred(hi) true to width `tol`; returns the midpoint.
inline double bisect(double lo, double hi, const std::function<bool(double)>& pred, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Sudden death is the start of the terminal interval on which C ≤ zero_tol up to the horizon.
// With `evaluate`, the bracketing grid interval is refined by bisection to 1e-3 ns; otherwise the
// crossing of C − zero_tol is linearly interpolated.
inline SuddenDeathResult find_sudden_death(const std::vector<double>& times, const std::vector<double>& c, double horizon,
                                           double zero_tol = 1e-9,
                                           const std::function<double(double)>& evaluate = {}) {
    if (times.size() != c.size() || times.empty()) throw std::invalid_argument("find_sudden_death: bad trace");
    if (times.back() < horizon * (1.0 - 1e-12)) throw std::invalid_argument("find_sudden_death: trace shorter than horizon");
    SuddenDeathResult r;
    r.horizon = horizon;

    std::size_t end = 0;
    while (end < times.size() && times[end] <= horizon * (1.0 + 1e-12)) ++end;
    std::size_t first_zero = end;
    for (std::size_t i = 0; i < end; ++i)
        if (c[i] <= zero_tol) {
            first_zero = i;
            break;
        }
    if (first_zero == end) {
        r.diagnostic = "no zero of the concurrence within the horizon";
        return r;
    }
    bool inside = false;
    for (std::size_t i = first_zero; i < end; ++i) {
        const bool alive = c[i] > zero_tol;
        if (alive && !inside) ++r.revival_count;
        inside = alive;
    }
    if (c[end - 1] > zero_tol) {
        r.diagnostic = "concurrence revives and is still positive at the horizon";
        return r;
    }
    std::size_t start = end - 1;
    while (start > 0 && c[start - 1] <= zero_tol) --start;
    if (start == 0) {
        r.t_sd = times[0];
        return r;
    }
    const double lo = times[start - 1];
    const double hi = times[start];
    if (evaluate) {
        r.t_sd = detail::bisect(lo, hi, [&](double t) { return evaluate(t) <= zero_tol; }, 1e-3);
    } else {
        const double c0 = c[start - 1] - zero_tol;
        const double c1 = c[start] - zero_tol;
        r.t_sd = c0 == c1 ? hi : lo + (hi - lo) * c0 / (c0 - c1);
    }
    return r;
}

// First time W(t) reaches zero, bisected to 1e-3 ns when `evaluate` is given.
inline std::optional<double> first_witness_zero(const std::vector<double>& times, const std::vector<double>& w,
                                                double horizon, const std::function<double(double)>& evaluate = {}) {
    for (std::size_t i = 0; i < times.size() && times[i] <= horizon * (1.0 + 1e-12); ++i) {
        if (w[i] < 0.0) continue;
        if (i == 0) return times[0];
        if (evaluate) return detail::bisect(times[i - 1], times[i], [&](double t) { return evaluate(t) >= 0.0; }, 1e-3);
        return times[i - 1] + (times[i] - times[i - 1]) * (-w[i - 1]) / (w[i] - w[i - 1]);
    }
    return std::nullopt;
}

struct SweepRecord {
    double b_tesla = 0.0;
    SuddenDeathResult death;
    double max_occupation_leak = 0.0;  // max_t q over both dots
    std::string error;
};

struct SweepResult {
    std::vector<SweepRecord> records;
};

inline SweepRecord sweep_point(const ExperimentConfig& cfg, double b_tesla) {
    SweepRecord rec;
    rec.b_tesla = b_tesla;
    try {
        const auto times = cfg.grid.times();
        const DotPair pair(cfg, b_tesla);
        std::vector<double> c(times.size());
        std::vector<double> w(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto s = pair.at(times[i]);
            c[i] = concurrence_closed_form(s[0], s[1]);
            w[i] = witness_at(s, cfg.bell);
            rec.max_occupation_leak = std::max({rec.max_occupation_leak, s[0].q, s[1].q});
        }
        const auto c_at = [&](double t) {
            const auto s = pair.at(t);
            return concurrence_closed_form(s[0], s[1]);
        };
        const auto w_at = [&](double t) { return witness_at(pair.at(t), cfg.bell); };
        rec.death = find_sudden_death(times, c, cfg.horizon_ns, cfg.zero_tol, c_at);
        rec.death.witness_zero = first_witness_zero(times, w, cfg.horizon_ns, w_at);
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

// Records are computed independently and stored by index, so the result does not depend on the
// number of workers.
inline SweepResult sweep_b(const ExperimentConfig& cfg, const std::vector<double>& b_grid, unsigned threads = 1) {
    if (!std::is_sorted(b_grid.begin(), b_grid.end())) throw std::invalid_argument("sweep_b: field grid must be ordered");
    cfg.validate();
    SweepResult out;
    out.records.resize(b_grid.size());
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, b_grid.size()))));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < b_grid.size(); i = next++) out.records[i] = sweep_point(cfg, b_grid[i]);
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return out;
}

class UndefinedRegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// t_SD ≈ √(2 ln(ω/σ))/σ with ω = |g|µB B/ħ; valid once the Zeeman frequency exceeds σ.
inline double tsd_estimate_high_field(double b_tesla, double sigma_per_ns, const PhysicalConstants& c,
                                      const MaterialSpec& material) {
    const double omega = zeeman_splitting(c, material, b_tesla) / c.hbar;
    if (!(omega > sigma_per_ns)) throw UndefinedRegimeError("tsd_estimate_high_field: Zeeman frequency does not exceed sigma");
    return std::sqrt(2.0 * std::log(omega / sigma_per_ns)) / sigma_per_ns;
}

struct OscillationMetrics {
    int count = 0;                    // oscillations superimposed on the decay (bumps of dC/dt while C > 0)
    int value_maxima = 0;             // strict interior local maxima of C itself
    double envelope_amplitude = 0.0;  // max of E(t) − C(t), E the running maximum from the right
    double slope_amplitude = 0.0;     // largest rise of dC/dt into a bump, per ns
};

inline OscillationMetrics oscillation_metrics(const std::vector<double>& times, const std::vector<double>& c,
                                              double zero_tol = 1e-9) {
    if (times.size() != c.size()) throw std::invalid_argument("oscillation_metrics: size mismatch");
    OscillationMetrics m;
    const std::size_t n = c.size();
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (c[i] > c[i - 1] && c[i] > c[i + 1]) ++m.value_maxima;

    double env = n ? c[n - 1] : 0.0;
    for (std::size_t i = n; i-- > 0;) {
        env = std::max(env, c[i]);
        m.envelope_amplitude = std::max(m.envelope_amplitude, env - c[i]);
    }

    std::size_t alive = 0;
    while (alive < n && c[alive] > zero_tol) ++alive;
    if (alive < 4) return m;
    std::vector<double> slope(alive - 1);
    for (std::size_t i = 0; i + 1 < alive; ++i) slope[i] = (c[i + 1] - c[i]) / (times[i + 1] - times[i]);
    double trough = slope[0];
    for (std::size_t i = 1; i + 1 < slope.size(); ++i) {
        trough = std::min(trough, slope[i]);
        if (slope[i] > slope[i - 1] && slope[i] > slope[i + 1]) {
            ++m.count;
            m.slope_amplitude = std::max(m.slope_amplitude, slope[i] - trough);
            trough = slope[i];
        }
    }
    return m;
}

}  // namespace spinbath
