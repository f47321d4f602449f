#pragma once

namespace qionize {

// Internal units: lengths in micrometres, wavenumbers in inverse micrometres.
// Every frequency is carried as its vacuum wavenumber omega / c.

/// hbar * c in eV * um. Single conversion constant for eV -> 1/um.
inline constexpr double kHbarC_eV_um = 0.19732698;

/// Speed of light in um / s.
inline constexpr double kSpeedOfLight_um_s = 2.99792458e14;

/// 1 um^-2 expressed in cm^-2.
inline constexpr double kInvUm2ToInvCm2 = 1.0e8;

/// Converts a photon energy in eV to its vacuum wavenumber in 1/um.
/// Throws std::domain_error for non-positive or non-finite energies.
double energy_to_wavenumber(double energy_ev);

}  // namespace qionize
