#pragma once

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qionize/amplitude.hpp"
#include "qionize/config.hpp"
#include "qionize/kernel.hpp"
#include "qionize/quadrature.hpp"

namespace qionize {

enum class Parity { Even, Odd };

std::string_view to_string(Parity parity);

/// Resonant intermediate level of a two-photon ionization pathway.
struct Channel {
  std::string name;
  double transition_energy_ev = 0.0;
  int multipole_order = 1;
  Parity parity = Parity::Odd;
  // Linewidth and the other prefactors of the transition amplitude cancel in R.
  std::optional<double> linewidth_ev;
  std::shared_ptr<const TabulatedKernel> kernel;
};

/// Sodium 3S1/2 -> 4P3/2, 4D5/2, 4F5/2, 5G7/2 (dipole ... hexadecapole).
const std::array<Channel, 4>& builtin_channels();

/// Built-in channel by name; throws std::invalid_argument for unknown names.
const Channel& find_channel(std::string_view name);

/// Copy of cfg with the carrier set to the channel's transition energy.
ExperimentConfig with_channel(ExperimentConfig cfg, const Channel& channel);

/// An integral did not meet its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, IntegralResult diagnostics)
      : std::runtime_error(what), diagnostics_(diagnostics) {}
  const IntegralResult& diagnostics() const noexcept { return diagnostics_; }

 private:
  IntegralResult diagnostics_;
};

// Reduced2D quantities omit the k_y / frequency filter integrals. Those
// constants are identical for both amplitude kinds, so they are tracked here
// only as symbols. With Phi = (pi / Omega_y^2)(pi / Omega^2):
inline constexpr std::string_view kNormalizationFactor = "Phi^(-1/2)";
inline constexpr std::string_view kFluxFactor = "Phi^(1/2)";
inline constexpr std::string_view kFFactorFactor = "(2pi/Omega_y^2)^2 (2pi/Omega^2)^2 / Phi";

/// The three amplitude integrals over the reduced (kix, ksx) domain.
struct ReducedIntegrals {
  IntegralResult coherent;       // integral of F (times the kernel, if any)
  IntegralResult norm;           // integral of F^2
  IntegralResult flux_weighted;  // integral of F^2 (k_iz/k_i + k_sz/k_s)

  bool converged() const {
    return coherent.converged && norm.converged && flux_weighted.converged;
  }
};

/// Evaluates the reduced integrals. Internally the square (-k0, k0)^2 is
/// mapped to u = kix + ksx, sin(s) = (kix - ksx) / (2 k0 - |u|) so the pump
/// ridge is axis aligned; u is truncated at 10 pump standard deviations or 2 k0.
/// In the paraxial regime the obliquity weight is the constant 2.
ReducedIntegrals reduced_integrals(AmplitudeKind kind, const ExperimentConfig& cfg,
                                   const TabulatedKernel* kernel = nullptr);

struct Normalization {
  double reduced = 0.0;  // 1 / sqrt(integral of F^2)
  IntegralResult integral;
  std::string_view common_factor = kNormalizationFactor;
};

Normalization normalization(AmplitudeKind kind, const ExperimentConfig& cfg);

struct PhotonFlux {
  double reduced = 0.0;  // c * C0 * flux-weighted integral, in um^-2 s^-1 per factor
  IntegralResult integral;
  std::string_view common_factor = kFluxFactor;
};

PhotonFlux photon_flux(AmplitudeKind kind, const ExperimentConfig& cfg);

struct FFactor {
  double reduced = 0.0;
  ReducedIntegrals integrals;
  std::string_view common_factor = kFFactorFactor;
};

FFactor f_factor(AmplitudeKind kind, const ExperimentConfig& cfg,
                 const TabulatedKernel* kernel = nullptr);

struct RatioResult {
  double R = 0.0;
  double f_ent = 0.0;
  double f_sep = 0.0;
  double C_ent = 0.0;  // reduced values, common factor kNormalizationFactor
  double C_sep = 0.0;
  double phi_ent = 0.0;  // reduced values, common factor kFluxFactor
  double phi_sep = 0.0;
  double err_R = 0.0;
  Regime regime = Regime::Exact;
  std::string kernel_label = "none";
  ReducedIntegrals ent;
  ReducedIntegrals sep;

  double C_ratio() const { return C_ent / C_sep; }
  bool converged() const { return ent.converged() && sep.converged(); }
};

/// Pure assembly of R = (C_ent / C_sep)(f_ent / f_sep) and the intermediate
/// observables from already evaluated integrals.
RatioResult assemble_ratio(const ReducedIntegrals& ent, const ReducedIntegrals& sep,
                           Regime regime);

/// Evaluates the six reduced integrals and assembles R.
/// The flag converged() is false when any integral missed its tolerance.
/// Throws std::invalid_argument for multipole channels without a kernel.
RatioResult assemble_enhancement_ratio(const ExperimentConfig& cfg, const Channel& channel);

/// Same as assemble_enhancement_ratio but throws NumericalError unless every
/// integral converged.
RatioResult enhancement_ratio(const ExperimentConfig& cfg, const Channel& channel);

/// sigma_ent = R * phi_sep * sigma_cl with phi_sep in um^-2 s^-1 and sigma_cl
/// in cm^4 s; the result is in cm^2.
double sigma_ent_from_classical(double R, double phi_sep_per_um2_s, double sigma_cl_cm4_s);

}  // namespace qionize
