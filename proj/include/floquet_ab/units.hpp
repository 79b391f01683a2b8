#pragma once

#include <numbers>

// Energies are carried in cm^-1 with hbar = 1, so time is measured in
// (cm^-1)^-1. Dipoles are in Debye, fields in V/m, lengths in Angstrom.
namespace floquet_ab::units {

inline constexpr double kPi = std::numbers::pi;

inline constexpr double kDebyeCoulombMeter = 3.33564e-30;
inline constexpr double kPlanckTimesLightJouleCm = 1.98645e-23;  // h*c [J cm]

// mu[D] * E[V/m] -> energy in cm^-1.
inline constexpr double kDebyeVmToCm1 = kDebyeCoulombMeter / kPlanckTimesLightJouleCm;

inline constexpr double kSpeedOfLightCmPerS = 2.99792458e10;
inline constexpr double kHbarJouleSecond = 1.054571817e-34;
inline constexpr double kPlanckJouleSecond = 6.62607015e-34;
inline constexpr double kElementaryChargeCoulomb = 1.602176634e-19;
inline constexpr double kAngstromMeter = 1e-10;

// One time unit (cm^-1)^-1 in seconds: hbar / (h c * 1 cm^-1) = 1 / (2 pi c).
inline constexpr double kTimeUnitSeconds = 1.0 / (2.0 * kPi * kSpeedOfLightCmPerS);
inline constexpr double kTimeUnitFemtoseconds = kTimeUnitSeconds * 1e15;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace floquet_ab::units
