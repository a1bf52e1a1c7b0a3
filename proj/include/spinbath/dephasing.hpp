#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinbath/constants.hpp"
#include "spinbath/detail/summation.hpp"
#include "spinbath/material.hpp"

namespace spinbath {

struct DephasingTrace {
    std::vector<double> times;
    std::vector<std::complex<double>> phi;
    std::vector<double> log_abs_phi;  // ln|φ|, finite far below double underflow; −inf at exact zeros
};

struct T2Fit {
    double t2_star_ns = 0.0;
    double rms_residual = 0.0;
    std::size_t points = 0;
};

class NoFitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Distinct coupling values with multiplicities, ascending.
inline std::vector<std::pair<double, std::size_t>> group_couplings(const std::vector<double>& a) {
    std::vector<double> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, std::size_t>> groups;
    for (double v : sorted) {
        if (!groups.empty() && groups.back().first == v)
            ++groups.back().second;
        else
            groups.emplace_back(v, 1);
    }
    return groups;
}

// High-field coherence with the flip-flop term dropped, averaged over a fully mixed bath:
//   φ(t) = Π_k ¼ Σ_m e^{−i A_k m t/ħ} = Π_k cos(x_k) cos(2x_k),  x_k = A_k t / 2ħ.
// The product is accumulated as ln|φ| plus a sign so that 10⁶-factor products do not underflow.
inline DephasingTrace dephasing_factor(const CouplingSet& couplings, const std::vector<double>& times,
                                       const PhysicalConstants& c = {}) {
    for (double a : couplings.a_uev)
        if (!(a > 0.0)) throw std::invalid_argument("dephasing_factor: couplings must be positive");
    const auto groups = group_couplings(couplings.a_uev);

    DephasingTrace out;
    out.times = times;
    out.phi.reserve(times.size());
    out.log_abs_phi.reserve(times.size());
    for (double t : times) {
        detail::NeumaierSum log_abs;
        bool negative = false;
        bool zero = false;
        for (const auto& [a, count] : groups) {
            const double x = 0.5 * a * t / c.hbar;
            const double f = std::cos(x) * std::cos(2.0 * x);
            if (f == 0.0) {
                zero = true;
                break;
            }
            log_abs.add(static_cast<double>(count) * std::log(std::abs(f)));
            if (f < 0.0 && (count % 2 == 1)) negative = !negative;
        }
        if (zero) {
            out.log_abs_phi.push_back(-std::numeric_limits<double>::infinity());
            out.phi.emplace_back(0.0, 0.0);
            continue;
        }
        const double la = log_abs.value();
        out.log_abs_phi.push_back(la);
        out.phi.push_back(std::polar(std::exp(la), negative ? std::numbers::pi : 0.0));
    }
    return out;
}

// Least-squares fit of ln|φ| = −t²/T2*² over the initial stretch where |φ| ≥ 0.05.
inline T2Fit fit_t2star(const std::vector<double>& times, const std::vector<double>& log_abs_phi,
                        double floor_abs = 0.05) {
    if (times.size() != log_abs_phi.size()) throw std::invalid_argument("fit_t2star: size mismatch");
    const double log_floor = std::log(floor_abs);
    bool decayed = false;
    for (double la : log_abs_phi)
        if (la <= -1.0) decayed = true;
    if (!decayed) throw NoFitError("fit_t2star: trace never decays below 1/e");

    detail::NeumaierSum sxy;
    detail::NeumaierSum sxx;
    std::size_t used = 0;
    std::size_t end = 0;
    for (; end < times.size(); ++end) {
        if (log_abs_phi[end] < log_floor) break;
        const double x = times[end] * times[end];
        sxy.add(x * log_abs_phi[end]);
        sxx.add(x * x);
        ++used;
    }
    if (used < 2 || !(sxx.value() > 0.0)) throw NoFitError("fit_t2star: too few points in the fit window");
    const double slope = -sxy.value() / sxx.value();
    if (!(slope > 0.0)) throw NoFitError("fit_t2star: fitted decay rate is not positive");

    detail::NeumaierSum ss;
    for (std::size_t i = 0; i < end; ++i) {
        const double r = log_abs_phi[i] + slope * times[i] * times[i];
        ss.add(r * r);
    }
    return {1.0 / std::sqrt(slope), std::sqrt(ss.value() / static_cast<double>(used)), used};
}

inline T2Fit fit_t2star(const DephasingTrace& trace) { return fit_t2star(trace.times, trace.log_abs_phi); }

// Overhauser spread σ² = (I(I+1)/3)·A²/(N ħ²), in ns⁻¹. Gaussian coherence is exp(−σ²t²/2).
inline double sigma_from(double n_nuclei, double a_total_uev, const PhysicalConstants& c = {}) {
    if (!(n_nuclei >= 1.0)) throw std::invalid_argument("sigma_from: N must be >= 1");
    return std::sqrt(kNuclearSpinSquared / 3.0 / n_nuclei) * a_total_uev / c.hbar;
}

// T2* = √(6/(I(I+1)))·√N·ħ/A, i.e. √2/σ.
inline double t2star_closed_form(double n_nuclei, double a_total_uev, const PhysicalConstants& c = {}) {
    return std::sqrt(6.0 / kNuclearSpinSquared) * std::sqrt(n_nuclei) * c.hbar / a_total_uev;
}

}  // namespace spinbath
