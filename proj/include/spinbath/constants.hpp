#pragma once

// Units used throughout: energies in µeV, times in ns, magnetic fields in T.

namespace spinbath {

struct PhysicalConstants {
    double hbar = 0.6582119569;          // µeV·ns
    double bohr_magneton = 57.8838180;   // µeV/T
};

inline constexpr double kNuclearSpin = 1.5;
inline constexpr int kNuclearTwoSpin = 3;
inline constexpr int kNuclearLevels = 4;

// I(I+1) for spin-3/2.
inline constexpr double kNuclearSpinSquared = kNuclearSpin * (kNuclearSpin + 1.0);

}  // namespace spinbath
