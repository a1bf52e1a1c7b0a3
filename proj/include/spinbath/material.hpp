#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinbath/constants.hpp"
#include "spinbath/detail/summation.hpp"

namespace spinbath {

struct IsotopeSpec {
    std::string name;
    double a0_uev = 0.0;       // total hyperfine constant of a fully occupied cell
    double abundance = 1.0;    // fraction within its sublattice
    double spin = kNuclearSpin;
    std::string sublattice;    // isotopes sharing a sublattice compete for one site per cell
};

struct MaterialSpec {
    std::vector<IsotopeSpec> isotopes;
    double cell_volume_nm3 = 0.0;
    double g_factor = 0.0;

    // Abundance-weighted sum of A0 over one unit cell.
    double unit_cell_coupling() const {
        double total = 0.0;
        for (const auto& iso : isotopes) total += iso.a0_uev * iso.abundance;
        return total;
    }

    std::vector<std::string> sublattices() const {
        std::vector<std::string> out;
        for (const auto& iso : isotopes)
            if (std::find(out.begin(), out.end(), iso.sublattice) == out.end()) out.push_back(iso.sublattice);
        return out;
    }

    void validate() const {
        if (isotopes.empty()) throw std::invalid_argument("material: no isotopes");
        if (!(cell_volume_nm3 > 0.0)) throw std::invalid_argument("material: cell volume must be positive");
        for (const auto& iso : isotopes) {
            if (!(iso.a0_uev > 0.0)) throw std::invalid_argument("material: isotope " + iso.name + " has A0 <= 0");
            if (iso.abundance < 0.0 || iso.abundance > 1.0)
                throw std::invalid_argument("material: isotope " + iso.name + " abundance outside [0,1]");
            if (iso.spin != kNuclearSpin)
                throw std::invalid_argument("material: only spin-3/2 nuclei are supported");
        }
        for (const auto& sub : sublattices()) {
            double sum = 0.0;
            for (const auto& iso : isotopes)
                if (iso.sublattice == sub) sum += iso.abundance;
            if (std::abs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("material: abundances on sublattice " + sub + " do not sum to 1");
        }
    }
};

// GaAs: one Ga and one As per two-atom cell; v0 from a = 0.565 nm with four cells per cube.
inline MaterialSpec gaas() {
    MaterialSpec m;
    m.isotopes = {
        {"Ga69", 36.0, 0.604, kNuclearSpin, "Ga"},
        {"Ga71", 46.0, 0.396, kNuclearSpin, "Ga"},
        {"As75", 43.0, 1.0, kNuclearSpin, "As"},
    };
    m.cell_volume_nm3 = 0.0451;
    m.g_factor = -0.44;
    return m;
}

struct DotGeometry {
    double l_perp_nm = 20.0;
    double l_z_nm = 2.0;
    std::size_t n_cells = 1'500'000;
    std::uint64_t rng_seed = 1;
    // Half-width of the candidate grid in units of the envelope length along each axis.
    double grid_extent = 3.5;

    void validate() const {
        if (!(l_perp_nm > 0.0) || !(l_z_nm > 0.0)) throw std::invalid_argument("geometry: envelope lengths must be positive");
        if (n_cells < 1) throw std::invalid_argument("geometry: n_cells must be >= 1");
        if (!(grid_extent > 0.0)) throw std::invalid_argument("geometry: grid extent must be positive");
    }
};

struct CouplingSet {
    std::vector<std::string> labels;        // isotope names, indexed by `isotope`
    std::vector<std::uint8_t> isotope;      // per nucleus
    std::vector<double> a_uev;              // per nucleus
    double a_total_uev = 0.0;
    // Cell centres (nm); nucleus k sits in cell k / nuclei_per_cell. Empty for uniform sets.
    std::vector<std::array<double, 3>> cell_positions;
    std::size_t nuclei_per_cell = 1;

    std::size_t size() const { return a_uev.size(); }
};

// |g|·µB·|B|, in µeV.
inline double zeeman_splitting(const PhysicalConstants& c, const MaterialSpec& m, double b_tesla) {
    return std::abs(m.g_factor) * c.bohr_magneton * std::abs(b_tesla);
}

// Signed electron Zeeman coefficient −g·µB·B multiplying S_z in the Hamiltonian, in µeV.
inline double zeeman_energy(const PhysicalConstants& c, const MaterialSpec& m, double b_tesla) {
    return -m.g_factor * c.bohr_magneton * b_tesla;
}

inline CouplingSet uniform_couplings(double a_total_uev, std::size_t n_nuclei) {
    if (n_nuclei < 1) throw std::invalid_argument("uniform_couplings: n_nuclei must be >= 1");
    CouplingSet set;
    set.labels = {"uniform"};
    set.isotope.assign(n_nuclei, 0);
    set.a_uev.assign(n_nuclei, a_total_uev / static_cast<double>(n_nuclei));
    set.a_total_uev = a_total_uev;
    return set;
}

namespace detail {

// 53-bit uniform in [0,1) from the raw engine output; std distributions are not portable.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct GridSite {
    double x, y, z;
};

}  // namespace detail

// Hyperfine constants A_k = A0_k · v0|Ψ(r_k)|² for a Gaussian envelope sampled on a cubic grid.
// The n_cells sites of largest envelope weight are kept and renormalized so their weights sum to 1.
inline CouplingSet generate_couplings(const MaterialSpec& material, const DotGeometry& geometry) {
    material.validate();
    geometry.validate();

    const double h = std::cbrt(material.cell_volume_nm3);
    const auto nx = static_cast<long>(std::floor(geometry.grid_extent * geometry.l_perp_nm / h));
    const auto nz = static_cast<long>(std::floor(geometry.grid_extent * geometry.l_z_nm / h));
    const std::size_t side_xy = static_cast<std::size_t>(2 * nx + 1);
    const std::size_t side_z = static_cast<std::size_t>(2 * nz + 1);
    const std::size_t n_sites = side_xy * side_xy * side_z;
    if (geometry.n_cells > n_sites)
        throw std::invalid_argument("generate_couplings: n_cells (" + std::to_string(geometry.n_cells) +
                                    ") exceeds the generated grid (" + std::to_string(n_sites) + " sites)");

    const double inv_lp2 = 1.0 / (geometry.l_perp_nm * geometry.l_perp_nm);
    const double inv_lz2 = 1.0 / (geometry.l_z_nm * geometry.l_z_nm);
    auto site_of = [&](std::size_t idx) {
        const long iz = static_cast<long>(idx % side_z) - nz;
        const long iy = static_cast<long>((idx / side_z) % side_xy) - nx;
        const long ix = static_cast<long>(idx / (side_z * side_xy)) - nx;
        return detail::GridSite{ix * h, iy * h, iz * h};
    };
    // Exponent of the envelope; larger weight means smaller exponent.
    std::vector<double> exponent(n_sites);
    for (std::size_t i = 0; i < n_sites; ++i) {
        const auto s = site_of(i);
        exponent[i] = (s.x * s.x + s.y * s.y) * inv_lp2 + s.z * s.z * inv_lz2;
    }

    std::vector<std::uint32_t> order(n_sites);
    std::iota(order.begin(), order.end(), 0U);
    auto heavier = [&](std::uint32_t a, std::uint32_t b) {
        return exponent[a] < exponent[b] || (exponent[a] == exponent[b] && a < b);
    };
    if (geometry.n_cells < n_sites)
        std::nth_element(order.begin(), order.begin() + static_cast<long>(geometry.n_cells), order.end(), heavier);
    order.resize(geometry.n_cells);
    std::sort(order.begin(), order.end());

    std::vector<double> weight(order.size());
    detail::NeumaierSum norm;
    for (std::size_t i = 0; i < order.size(); ++i) {
        weight[i] = std::exp(-exponent[order[i]]);
        norm.add(weight[i]);
    }
    const double inv_norm = 1.0 / norm.value();
    for (auto& w : weight) w *= inv_norm;

    const auto subs = material.sublattices();
    CouplingSet set;
    for (const auto& iso : material.isotopes) set.labels.push_back(iso.name);
    set.a_uev.reserve(order.size() * subs.size());
    set.isotope.reserve(order.size() * subs.size());
    set.nuclei_per_cell = subs.size();
    set.cell_positions.reserve(order.size());
    for (auto idx : order) {
        const auto s = site_of(idx);
        set.cell_positions.push_back({s.x, s.y, s.z});
    }

    std::mt19937_64 rng(geometry.rng_seed);
    detail::NeumaierSum total;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (const auto& sub : subs) {
            const double u = detail::unit_uniform(rng);
            double cumulative = 0.0;
            std::size_t pick = material.isotopes.size();
            std::size_t last = 0;
            for (std::size_t k = 0; k < material.isotopes.size(); ++k) {
                if (material.isotopes[k].sublattice != sub) continue;
                last = k;
                cumulative += material.isotopes[k].abundance;
                if (u < cumulative) {
                    pick = k;
                    break;
                }
            }
            if (pick == material.isotopes.size()) pick = last;
            const double a = material.isotopes[pick].a0_uev * weight[i];
            set.a_uev.push_back(a);
            set.isotope.push_back(static_cast<std::uint8_t>(pick));
            total.add(a);
        }
    }
    set.a_total_uev = total.value();
    return set;
}

}  // namespace spinbath
