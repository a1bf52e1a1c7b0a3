#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spinbath/constants.hpp"
#include "spinbath/detail/summation.hpp"
#include "spinbath/material.hpp"
#include "spinbath/sectors.hpp"

namespace spinbath {

using cplx = std::complex<double>;

// Coupled pair {|↑,J,m⟩, |↓,J,m+1⟩} of the uniform-coupling Hamiltonian
//   H = ω_e S_z + α S_z J_z + (α/2)(S⁺J⁻ + S⁻J⁺).
// For m = J the pair degenerates to the single state |↑,J,J⟩ (coupled == false).
struct BlockParams {
    double e_up = 0.0;
    double e_down = 0.0;
    double v = 0.0;
    bool coupled = true;
};

struct BlockAmplitudes {
    cplx a;  // ⟨↑,m|U|↑,m⟩
    cplx b;  // ⟨↓,m+1|U|↑,m⟩
    cplx d;  // ⟨↓,m+1|U|↓,m+1⟩
};

// Single-qubit phase-covariant unital channel: ρ↑↑ ↔ ρ↓↓ mix with probability q, ρ↑↓ → φ ρ↑↓.
struct ChannelSnapshot {
    double q = 0.0;
    cplx phi{1.0, 0.0};

    // Choi positivity: |φ| ≤ 1 − q.
    bool is_cp(double tol = 1e-10) const { return q >= -tol && q <= 1.0 + tol && std::abs(phi) <= 1.0 - q + tol; }
};

struct ChannelTrace {
    std::vector<double> times;
    std::vector<ChannelSnapshot> snapshots;
};

inline BlockParams block_params(int two_j, int two_m, double b_tesla, double alpha_uev, const PhysicalConstants& c,
                                const MaterialSpec& material) {
    if (two_j < 0 || two_m < -two_j || two_m > two_j || (two_j - two_m) % 2 != 0)
        throw std::out_of_range("block_params: m outside [-J, J]");
    const double omega = zeeman_energy(c, material, b_tesla);
    const double m = 0.5 * two_m;
    BlockParams p;
    p.e_up = 0.5 * omega + 0.5 * alpha_uev * m;
    p.e_down = -0.5 * omega - 0.5 * alpha_uev * (m + 1.0);
    if (two_m == two_j) {
        p.coupled = false;
        p.v = 0.0;
    } else {
        // J(J+1) − m(m+1) = (J − m)(J + m + 1), exact in doubled integers.
        const double jm = 0.25 * static_cast<double>(two_j - two_m) * static_cast<double>(two_j + two_m + 2);
        p.v = 0.5 * alpha_uev * std::sqrt(jm);
    }
    return p;
}

// Closed-form two-level propagator. Uncoupled blocks return a pure phase and b = 0, d = 0.
inline BlockAmplitudes block_amplitudes(const BlockParams& p, double t_ns, const PhysicalConstants& c) {
    if (!p.coupled) return {std::polar(1.0, -p.e_up * t_ns / c.hbar), cplx{}, cplx{}};
    const double mean = 0.5 * (p.e_up + p.e_down);
    const double delta = 0.5 * (p.e_up - p.e_down);
    const double r = std::hypot(delta, p.v);
    const cplx phase = std::polar(1.0, -mean * t_ns / c.hbar);
    if (r == 0.0) return {phase, cplx{}, phase};
    const double theta = r * t_ns / c.hbar;
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    const double dz = delta / r;
    const double vx = p.v / r;
    return {phase * cplx(cs, -dz * sn), phase * cplx(0.0, -vx * sn), phase * cplx(cs, dz * sn)};
}

// Total box coupling A_box = α·n_spins such that a box of n_spins nuclei reproduces the Overhauser
// spread α²·n_spins = A²/N of a dot with N nuclei and total coupling A.
inline double box_total_coupling(double a_total_uev, double n_physical, std::size_t n_spins) {
    if (!(n_physical > 0.0) || n_spins < 1) throw std::invalid_argument("box_total_coupling: counts must be positive");
    return a_total_uev * std::sqrt(static_cast<double>(n_spins) / n_physical);
}

namespace detail {

struct PreparedBlock {
    double mean;    // Ē
    double r;       // √(Δ² + V²)
    double dz;      // Δ / r
    double vx;      // V / r
};

struct PreparedSector {
    double weight;
    double e_top;     // |↑,J,J⟩
    double e_bottom;  // |↓,J,−J⟩
    std::vector<PreparedBlock> blocks;  // m = −J … J−1
};

inline std::vector<PreparedSector> prepare_sectors(const SectorTable& table, double b_tesla, double alpha_uev,
                                                   const PhysicalConstants& c, const MaterialSpec& material) {
    const double omega = zeeman_energy(c, material, b_tesla);
    std::vector<PreparedSector> out;
    out.reserve(table.entries.size());
    for (const auto& e : table.entries) {
        PreparedSector s;
        s.weight = e.weight;
        const double j = 0.5 * e.two_j;
        s.e_top = 0.5 * omega + 0.5 * alpha_uev * j;
        s.e_bottom = -0.5 * omega + 0.5 * alpha_uev * j;
        s.blocks.reserve(static_cast<std::size_t>(e.two_j));
        for (int tm = -e.two_j; tm < e.two_j; tm += 2) {
            const auto p = block_params(e.two_j, tm, b_tesla, alpha_uev, c, material);
            const double mean = 0.5 * (p.e_up + p.e_down);
            const double delta = 0.5 * (p.e_up - p.e_down);
            const double r = std::hypot(delta, p.v);
            s.blocks.push_back({mean, r, r > 0.0 ? delta / r : 0.0, r > 0.0 ? p.v / r : 0.0});
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline ChannelSnapshot evaluate_sectors(const std::vector<PreparedSector>& sectors, double t, double hbar) {
    NeumaierSum q;
    ComplexNeumaierSum phi;
    for (const auto& s : sectors) {
        // d of the current m; for m = −J the down state is uncoupled.
        cplx d_prev = std::polar(1.0, -s.e_bottom * t / hbar);
        for (const auto& blk : s.blocks) {
            const cplx phase = std::polar(1.0, -blk.mean * t / hbar);
            const double theta = blk.r * t / hbar;
            const double cs = std::cos(theta);
            const double sn = std::sin(theta);
            const cplx a = phase * cplx(cs, -blk.dz * sn);
            const double b2 = blk.vx * blk.vx * sn * sn;
            phi.add(s.weight * (a * std::conj(d_prev)));
            q.add(s.weight * b2);
            d_prev = phase * cplx(cs, blk.dz * sn);
        }
        const cplx a_top = std::polar(1.0, -s.e_top * t / hbar);
        phi.add(s.weight * (a_top * std::conj(d_prev)));
    }
    return {q.value(), phi.value()};
}

}  // namespace detail

// Exact single-qubit channel of an electron coupled uniformly (α = a_total/n_spins) to n_spins
// spin-3/2 nuclei in the fully mixed state:
//   q(t) = Σ_J w(J) Σ_{m<J} |b_{J,m}|²,   φ(t) = Σ_J w(J) Σ_m a_{J,m} d*_{J,m}.
// Sector data is prepared once; at() may then be called for any t ≥ 0.
class BoxChannel {
public:
    BoxChannel(const SectorTable& table, double a_total_uev, double b_tesla, const PhysicalConstants& c,
               const MaterialSpec& material)
        : hbar_(c.hbar) {
        if (table.n_spins < 1) throw std::invalid_argument("BoxChannel: empty sector table");
        const double alpha = a_total_uev / static_cast<double>(table.n_spins);
        sectors_ = detail::prepare_sectors(table, b_tesla, alpha, c, material);
    }

    ChannelSnapshot at(double t_ns) const {
        if (!(t_ns >= 0.0)) throw std::invalid_argument("BoxChannel: time must be non-negative");
        return detail::evaluate_sectors(sectors_, t_ns, hbar_);
    }

    ChannelTrace trace(const std::vector<double>& times) const {
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1])) throw std::invalid_argument("BoxChannel: times must increase");
        ChannelTrace out;
        out.times = times;
        out.snapshots.reserve(times.size());
        for (double t : times) out.snapshots.push_back(at(t));
        return out;
    }

private:
    double hbar_;
    std::vector<detail::PreparedSector> sectors_;
};

inline ChannelTrace compute_channel(const SectorTable& table, double a_total_uev, double b_tesla,
                                    const std::vector<double>& times, const PhysicalConstants& c,
                                    const MaterialSpec& material) {
    return BoxChannel(table, a_total_uev, b_tesla, c, material).trace(times);
}

inline ChannelTrace compute_channel(std::size_t n_spins, double a_total_uev, double b_tesla,
                                    const std::vector<double>& times, const PhysicalConstants& c = {},
                                    const MaterialSpec& material = gaas()) {
    return compute_channel(sector_weights(n_spins), a_total_uev, b_tesla, times, c, material);
}

inline Eigen::Matrix2cd apply_snapshot(const ChannelSnapshot& s, const Eigen::Matrix2cd& rho, double tol = 1e-10) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) throw std::invalid_argument("apply_snapshot: state is not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0, 0.0)) > tol) throw std::invalid_argument("apply_snapshot: trace differs from 1");
    Eigen::Matrix2cd out;
    // Written as a transfer of population so that equal occupations are reproduced exactly.
    const cplx transfer = s.q * (rho(1, 1) - rho(0, 0));
    out(0, 0) = rho(0, 0) + transfer;
    out(1, 1) = rho(1, 1) - transfer;
    out(0, 1) = s.phi * rho(0, 1);
    out(1, 0) = std::conj(s.phi) * rho(1, 0);
    return out;
}

}  // namespace spinbath
