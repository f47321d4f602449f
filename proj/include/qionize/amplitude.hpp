#pragma once

#include <cmath>

#include "qionize/config.hpp"

namespace qionize {

/// Photon wavevector in 1/um. kz may be negative here; amplitudes vanish there.
struct PhotonMomentum {
  double kx = 0.0;
  double ky = 0.0;
  double kz = 0.0;

  double magnitude() const { return std::sqrt(kx * kx + ky * ky + kz * kz); }
  bool forward() const { return kz >= 0.0; }
};

/// Narrowband point: both photons on shell at the carrier k0 with k_y = 0,
/// so only the transverse components kix, ksx remain.
struct ReducedPoint {
  double kix = 0.0;
  double ksx = 0.0;
  double k0 = 0.0;
};

enum class AmplitudeKind { Entangled, Separable };

std::string_view to_string(AmplitudeKind kind);

/// sin(x)/x with sinc(0) = 1; short series near the origin.
double sinc(double x);

/// Longitudinal phase mismatch k_Pz - k_iz - k_sz with all square roots kept.
/// Throws std::domain_error if |kix|, |ksx| >= k0 or |kix + ksx| >= 2 k0.
double delta_kz_exact(const ReducedPoint& p);

/// Second-order small-angle expansion of delta_kz_exact.
double delta_kz_paraxial(const ReducedPoint& p);

double delta_kz(const ReducedPoint& p, Regime regime);

/// Gaussian pump profile exp(-wx^2 kPx^2 / 2 - wy^2 kPy^2 / 2).
double pump_envelope(double kpx, double kpy, double waist_x_um, double waist_y_um);

/// Full 6-D amplitude: phase matching (entangled only), pump envelope at the
/// summed transverse momentum and the k_y / frequency filters of both photons.
/// Zero whenever either photon travels backwards or the pump would be evanescent.
double eval_amplitude(AmplitudeKind kind, const PhotonMomentum& ki, const PhotonMomentum& ks,
                      const ExperimentConfig& cfg);

/// Narrowband limit of eval_amplitude with the filter constants factored out:
/// (sinc(L dkz / 2) if entangled) * exp(-wp^2 (kix + ksx)^2 / 2).
/// Requires cfg.reduction == Reduced2D and a narrowband config.
double eval_reduced(AmplitudeKind kind, const ReducedPoint& p, const ExperimentConfig& cfg);

/// Same as eval_reduced without the configuration checks, for inner loops that
/// have already validated once.
double eval_reduced_unchecked(AmplitudeKind kind, const ReducedPoint& p,
                              const ExperimentConfig& cfg);

/// k_z / k of one photon in the reduced model (1 on axis, 0 at grazing).
inline double obliquity(double kx, double k0) {
  const double s = kx / k0;
  return std::sqrt(std::max(0.0, 1.0 - s * s));
}

}  // namespace qionize
