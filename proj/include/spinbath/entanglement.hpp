#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "spinbath/box_channel.hpp"

namespace spinbath {

// Two-qubit density matrix in the product basis |0⟩=↑↑, |1⟩=↑↓, |2⟩=↓↑, |3⟩=↓↓.
struct TwoQubitState {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();

    static TwoQubitState maximally_mixed() {
        TwoQubitState s;
        s.rho = Eigen::Matrix4cd::Identity() * 0.25;
        return s;
    }

    void validate(double herm_tol = 1e-12, double eig_tol = 1e-10) const {
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
            throw std::invalid_argument("TwoQubitState: not Hermitian");
        if (std::abs(rho.trace() - cplx(1.0, 0.0)) > herm_tol) throw std::invalid_argument("TwoQubitState: trace != 1");
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -eig_tol) throw std::invalid_argument("TwoQubitState: not positive");
    }

    // Reduced state of qubit 0 (first factor) or 1.
    Eigen::Matrix2cd reduced(int qubit) const {
        Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int k = 0; k < 2; ++k)
                    r(a, b) += qubit == 0 ? rho(2 * a + k, 2 * b + k) : rho(2 * k + a, 2 * k + b);
        return r;
    }
};

enum class BellLabel { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

inline constexpr std::array<BellLabel, 4> kAllBellLabels = {BellLabel::PsiPlus, BellLabel::PsiMinus,
                                                            BellLabel::PhiPlus, BellLabel::PhiMinus};

inline std::string_view to_string(BellLabel l) {
    switch (l) {
        case BellLabel::PsiPlus: return "psi-plus";
        case BellLabel::PsiMinus: return "psi-minus";
        case BellLabel::PhiPlus: return "phi-plus";
        case BellLabel::PhiMinus: return "phi-minus";
    }
    return "?";
}

inline BellLabel parse_bell_label(std::string_view s) {
    for (auto l : kAllBellLabels)
        if (to_string(l) == s) return l;
    throw std::invalid_argument("unknown Bell label '" + std::string(s) + "'");
}

inline Eigen::Vector4cd bell_vector(BellLabel l) {
    const double h = 1.0 / std::sqrt(2.0);
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    switch (l) {
        case BellLabel::PsiPlus: v(1) = h; v(2) = h; break;
        case BellLabel::PsiMinus: v(1) = h; v(2) = -h; break;
        case BellLabel::PhiPlus: v(0) = h; v(3) = h; break;
        case BellLabel::PhiMinus: v(0) = h; v(3) = -h; break;
    }
    return v;
}

inline TwoQubitState bell_state(BellLabel l) {
    const Eigen::Vector4cd v = bell_vector(l);
    TwoQubitState s;
    s.rho = v * v.adjoint();
    // Exact halves rather than (1/√2)² rounding.
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double re = s.rho(i, j).real();
            s.rho(i, j) = cplx(re == 0.0 ? 0.0 : std::copysign(0.5, re), 0.0);
        }
    return s;
}

// Pairs (i,j) of the coherence and (k,l) of the complementary occupations for each Bell family.
struct BellIndices {
    int i, j, k, l;
};

inline BellIndices bell_indices(BellLabel l) {
    if (l == BellLabel::PsiPlus || l == BellLabel::PsiMinus) return {1, 2, 0, 3};
    return {0, 3, 1, 2};
}

namespace detail {

// Applies a single-qubit channel to `qubit` of a 4×4 operator. The population part is written as a
// transfer so equal occupations map to themselves exactly.
inline void apply_on_qubit(Eigen::Matrix4cd& m, int qubit, const ChannelSnapshot& s) {
    const auto idx = [qubit](int own, int other) { return qubit == 0 ? 2 * own + other : 2 * other + own; };
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const int i00 = idx(0, x), j00 = idx(0, y);
            const int i11 = idx(1, x), j11 = idx(1, y);
            const cplx r00 = m(i00, j00);
            const cplx r11 = m(i11, j11);
            const cplx transfer = s.q * (r11 - r00);
            m(i00, j00) = r00 + transfer;
            m(i11, j11) = r11 - transfer;
            m(i00, j11) *= s.phi;
            m(i11, j00) *= std::conj(s.phi);
        }
}

}  // namespace detail

inline TwoQubitState apply_product_channel(const TwoQubitState& state, const ChannelSnapshot& first,
                                           const ChannelSnapshot& second, double cp_tol = 1e-10) {
    if (!first.is_cp(cp_tol) || !second.is_cp(cp_tol))
        throw std::invalid_argument("apply_product_channel: snapshot violates complete positivity");
    TwoQubitState out = state;
    detail::apply_on_qubit(out.rho, 0, first);
    detail::apply_on_qubit(out.rho, 1, second);
    return out;
}

// Wootters: C = max{0, λ1 − λ2 − λ3 − λ4}, λ the decreasing square roots of the eigenvalues of
// ρ (σy⊗σy) ρ* (σy⊗σy).
inline double concurrence_wootters(const TwoQubitState& state) {
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const Eigen::Matrix4cd r = state.rho * yy * state.rho.conjugate() * yy;
    const Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r, false);
    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i) lam[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

// Shortcut for states with the evolved-Bell sparsity: C = 2 max{0, |ρij| − √(ρkk ρll)}.
inline double concurrence_x(const TwoQubitState& state, BellLabel label, double sparsity_tol = 1e-10) {
    const auto [i, j, k, l] = bell_indices(label);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            if (r == c || (r == i && c == j) || (r == j && c == i)) continue;
            if (std::abs(state.rho(r, c)) > sparsity_tol)
                throw std::invalid_argument("concurrence_x: state lacks the single-coherence structure");
        }
    const double occ = std::max(0.0, state.rho(k, k).real() * state.rho(l, l).real());
    return 2.0 * std::max(0.0, std::abs(state.rho(i, j)) - std::sqrt(occ));
}

// Signed form |φ1||φ2| − [q1(1−q2) + q2(1−q1)]; its zero is the sudden-death point.
inline double concurrence_margin(double q1, cplx phi1, double q2, cplx phi2) {
    return std::abs(phi1) * std::abs(phi2) - (q1 * (1.0 - q2) + q2 * (1.0 - q1));
}

// Concurrence of any Bell state after the product channel.
inline double concurrence_closed_form(double q1, cplx phi1, double q2, cplx phi2) {
    return std::max(0.0, concurrence_margin(q1, phi1, q2, phi2));
}

inline double concurrence_closed_form(const ChannelSnapshot& a, const ChannelSnapshot& b) {
    return concurrence_closed_form(a.q, a.phi, b.q, b.phi);
}

inline double bell_fidelity(const TwoQubitState& state, BellLabel label) {
    const Eigen::Vector4cd v = bell_vector(label);
    return (v.adjoint() * state.rho * v)(0, 0).real();
}

// W = 1/2 − ⟨Ψ0|ρ|Ψ0⟩.
inline double witness_w(const TwoQubitState& state, BellLabel label) { return 0.5 - bell_fidelity(state, label); }

// ρ expressed in the Bell basis ordered Ψ+, Ψ−, Φ+, Φ−.
inline Eigen::Matrix4cd to_bell_basis(const TwoQubitState& state) {
    Eigen::Matrix4cd u;
    for (int c = 0; c < 4; ++c) u.col(c) = bell_vector(kAllBellLabels[static_cast<std::size_t>(c)]);
    return u.adjoint() * state.rho * u;
}

}  // namespace spinbath
