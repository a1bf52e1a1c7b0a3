#pragma once

// Brute-force reference for small baths: the full 2·4^N product basis, no angular-momentum
// bookkeeping. H conserves the total S_z + Σ I_z, so it is diagonalized block by block.

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "spinbath.hpp"

namespace oracle {

using cplx = std::complex<double>;

inline std::size_t pow4(std::size_t n) { return std::size_t{1} << (2 * n); }

// 2·m for digit d ∈ {0..3}.
inline int two_m_of(int d) { return 2 * d - 3; }

inline int bath_two_m(std::size_t n, std::size_t n_spins) {
    int s = 0;
    for (std::size_t k = 0; k < n_spins; ++k) s += two_m_of(static_cast<int>((n >> (2 * k)) & 3U));
    return s;
}

// √(I(I+1) − m(m+1)) for the raising step from digit d.
inline double raise_factor(int d) {
    const double m = 0.5 * two_m_of(d);
    return std::sqrt(spinbath::kNuclearSpinSquared - m * (m + 1.0));
}

struct Block {
    std::vector<std::size_t> up;    // bath configurations n of |↑,n⟩
    std::vector<std::size_t> down;  // bath configurations n of |↓,n⟩
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;  // columns are eigenvectors; rows ordered up then down
};

class DenseBath {
public:
    DenseBath(std::size_t n_spins, double alpha_uev, double b_tesla, const spinbath::PhysicalConstants& c = {},
              const spinbath::MaterialSpec& material = spinbath::gaas())
        : n_(n_spins), hbar_(c.hbar) {
        const double omega = spinbath::zeeman_energy(c, material, b_tesla);
        std::map<int, Block> by_m;
        for (std::size_t n = 0; n < pow4(n_); ++n) {
            const int tm = bath_two_m(n, n_);
            by_m[tm + 1].up.push_back(n);
            by_m[tm - 1].down.push_back(n);
        }
        for (auto& [two_total, blk] : by_m) {
            const std::size_t nu = blk.up.size();
            const std::size_t dim = nu + blk.down.size();
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
            std::map<std::size_t, std::size_t> down_pos;
            for (std::size_t i = 0; i < blk.down.size(); ++i) down_pos[blk.down[i]] = nu + i;
            for (std::size_t i = 0; i < nu; ++i) {
                const double mb = 0.5 * bath_two_m(blk.up[i], n_);
                h(i, i) = 0.5 * omega + 0.5 * alpha_uev * mb;
            }
            for (std::size_t i = 0; i < blk.down.size(); ++i) {
                const double mb = 0.5 * bath_two_m(blk.down[i], n_);
                h(nu + i, nu + i) = -0.5 * omega - 0.5 * alpha_uev * mb;
            }
            // (α/2) S⁺ I⁻_k : |↓, n⟩ → |↑, n with digit k lowered⟩.
            for (std::size_t i = 0; i < nu; ++i) {
                const std::size_t n = blk.up[i];
                for (std::size_t k = 0; k < n_; ++k) {
                    const int d = static_cast<int>((n >> (2 * k)) & 3U);
                    if (d == 3) continue;
                    const std::size_t raised = n + (std::size_t{1} << (2 * k));
                    const std::size_t j = down_pos.at(raised);
                    const double v = 0.5 * alpha_uev * raise_factor(d);
                    h(i, j) = v;
                    h(j, i) = v;
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
            blk.energies = es.eigenvalues();
            blk.vectors = es.eigenvectors();
            blocks_.emplace(two_total, std::move(blk));
        }
        prepare();
    }

    spinbath::ChannelSnapshot at(double t) const {
        double q = 0.0;
        for (const auto& s : flips_) {
            const Eigen::VectorXcd u = phases(s.energies, t);
            q += (u.adjoint() * (s.weights * u))(0, 0).real();
        }
        cplx phi{};
        for (const auto& s : coherences_) {
            const Eigen::VectorXcd up = phases(s.e_up, t);
            const Eigen::VectorXcd down = phases(s.e_down, t);
            phi += (up.transpose() * (s.weights * down.conjugate()))(0, 0);
        }
        const double norm = static_cast<double>(pow4(n_));
        return {q / norm, phi / norm};
    }

private:
    // q = Σ_ab e^{−i(Ea−Eb)t} P_ab Q_ab with P = V↓ᵀV↓, Q = V↑ᵀV↑ (weights = P∘Q).
    struct FlipTerm {
        Eigen::VectorXd energies;
        Eigen::MatrixXcd weights;
    };
    // φ = Σ_ab e^{−i(E⁺a−E⁻b)t} G_ab², G the overlap of bath-sector rows between two blocks.
    struct CoherenceTerm {
        Eigen::VectorXd e_up;
        Eigen::VectorXd e_down;
        Eigen::MatrixXcd weights;
    };

    Eigen::VectorXcd phases(const Eigen::VectorXd& e, double t) const {
        Eigen::VectorXcd u(e.size());
        for (Eigen::Index i = 0; i < e.size(); ++i) u[i] = std::polar(1.0, -e[i] * t / hbar_);
        return u;
    }

    // q = 4^−N Tr(P↓ U P↑ U†) and φ = 4^−N Tr(U↑↑ U↓↓†) in spectral form.
    void prepare() {
        for (const auto& [two_total, blk] : blocks_) {
            const auto nu = static_cast<Eigen::Index>(blk.up.size());
            const auto nd = static_cast<Eigen::Index>(blk.down.size());
            if (nu > 0 && nd > 0) {
                const Eigen::MatrixXd vu = blk.vectors.topRows(nu);
                const Eigen::MatrixXd vd = blk.vectors.bottomRows(nd);
                const Eigen::MatrixXd p = vd.transpose() * vd;
                const Eigen::MatrixXd q = vu.transpose() * vu;
                flips_.push_back({blk.energies, p.cwiseProduct(q).cast<cplx>()});
            }
        }
        // Bath sector 2m_b: up rows live in block 2m_b + 1, down rows in block 2m_b − 1, both in increasing n.
        for (const auto& [two_total, hi] : blocks_) {
            if (hi.up.empty()) continue;
            const auto it = blocks_.find(two_total - 2);
            if (it == blocks_.end()) continue;
            const Block& lo = it->second;
            const auto nb = static_cast<Eigen::Index>(hi.up.size());
            const Eigen::MatrixXd a = hi.vectors.topRows(nb);
            const Eigen::MatrixXd b = lo.vectors.bottomRows(static_cast<Eigen::Index>(lo.down.size()));
            const Eigen::MatrixXd g = a.transpose() * b;
            coherences_.push_back({hi.energies, lo.energies, g.cwiseProduct(g).cast<cplx>()});
        }
    }

    std::size_t n_;
    double hbar_;
    std::map<int, Block> blocks_;
    std::vector<FlipTerm> flips_;
    std::vector<CoherenceTerm> coherences_;
};

// Plain propagation in the full space followed by an explicit partial trace, for N ≤ 3.
inline spinbath::ChannelSnapshot full_space_channel(std::size_t n_spins, double alpha_uev, double b_tesla, double t,
                                                    const spinbath::PhysicalConstants& c = {},
                                                    const spinbath::MaterialSpec& material = spinbath::gaas()) {
    const auto nb = static_cast<Eigen::Index>(pow4(n_spins));
    const Eigen::Index dim = 2 * nb;
    const double omega = spinbath::zeeman_energy(c, material, b_tesla);
    // index = e·4^N + n, e = 0 for ↑.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index n = 0; n < nb; ++n) {
        const double mb = 0.5 * bath_two_m(static_cast<std::size_t>(n), n_spins);
        h(n, n) = 0.5 * omega + 0.5 * alpha_uev * mb;
        h(nb + n, nb + n) = -0.5 * omega - 0.5 * alpha_uev * mb;
        for (std::size_t k = 0; k < n_spins; ++k) {
            const int d = static_cast<int>((static_cast<std::size_t>(n) >> (2 * k)) & 3U);
            if (d == 3) continue;
            const Eigen::Index raised = n + static_cast<Eigen::Index>(std::size_t{1} << (2 * k));
            const double v = 0.5 * alpha_uev * raise_factor(d);
            h(n, nb + raised) = v;
            h(nb + raised, n) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::VectorXcd phases(dim);
    for (Eigen::Index i = 0; i < dim; ++i) phases[i] = std::polar(1.0, -es.eigenvalues()[i] * t / c.hbar);
    const Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
    const Eigen::MatrixXcd u = v * phases.asDiagonal() * v.adjoint();

    // ρ(0) = |s⟩⟨s'| ⊗ 1/4^N; read off the electron block of the reduced state.
    auto reduced = [&](Eigen::Index s, Eigen::Index sp, Eigen::Index r, Eigen::Index rp) {
        cplx acc{};
        for (Eigen::Index n = 0; n < nb; ++n)
            for (Eigen::Index m = 0; m < nb; ++m) acc += u(r * nb + m, s * nb + n) * std::conj(u(rp * nb + m, sp * nb + n));
        return acc / static_cast<double>(nb);
    };
    return {reduced(0, 0, 1, 1).real(), reduced(0, 1, 0, 1)};
}

// φ(t) = 4^−N Σ_n exp(−i Σ_k A_k m_k t/ħ) by enumerating every bath configuration.
inline cplx dense_dephasing(const std::vector<double>& a_uev, double t, const spinbath::PhysicalConstants& c = {}) {
    const std::size_t n_spins = a_uev.size();
    cplx acc{};
    for (std::size_t n = 0; n < pow4(n_spins); ++n) {
        double e = 0.0;
        for (std::size_t k = 0; k < n_spins; ++k) e += a_uev[k] * 0.5 * two_m_of(static_cast<int>((n >> (2 * k)) & 3U));
        acc += std::polar(1.0, -e * t / c.hbar);
    }
    return acc / static_cast<double>(pow4(n_spins));
}

}  // namespace oracle
