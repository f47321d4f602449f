#include "qionize/amplitude.hpp"

#include <algorithm>
#include <stdexcept>

namespace qionize {

std::string_view to_string(AmplitudeKind kind) {
  return kind == AmplitudeKind::Entangled ? "entangled" : "separable";
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

namespace {

void check_reduced_domain(const ReducedPoint& p) {
  if (!(p.k0 > 0.0) || !(std::abs(p.kix) < p.k0) || !(std::abs(p.ksx) < p.k0) ||
      !(std::abs(p.kix + p.ksx) < 2.0 * p.k0)) {
    throw std::domain_error("reduced point outside the open kinematic square (-k0, k0)^2");
  }
}

double paraxial_unchecked(const ReducedPoint& p) {
  const double u = p.kix + p.ksx;
  return (p.kix * p.kix + p.ksx * p.ksx) / (2.0 * p.k0) - u * u / (4.0 * p.k0);
}

double exact_unchecked(const ReducedPoint& p) {
  const double u = p.kix + p.ksx;
  const double k0sq = p.k0 * p.k0;
  // Clamped so points a rounding error past grazing stay finite.
  return std::sqrt(std::max(0.0, 4.0 * k0sq - u * u)) -
         std::sqrt(std::max(0.0, k0sq - p.kix * p.kix)) -
         std::sqrt(std::max(0.0, k0sq - p.ksx * p.ksx));
}

}  // namespace

double delta_kz_exact(const ReducedPoint& p) {
  check_reduced_domain(p);
  return exact_unchecked(p);
}

double delta_kz_paraxial(const ReducedPoint& p) {
  check_reduced_domain(p);
  return paraxial_unchecked(p);
}

double delta_kz(const ReducedPoint& p, Regime regime) {
  return regime == Regime::Exact ? delta_kz_exact(p) : delta_kz_paraxial(p);
}

double pump_envelope(double kpx, double kpy, double waist_x_um, double waist_y_um) {
  const double ax = waist_x_um * kpx;
  const double ay = waist_y_um * kpy;
  return std::exp(-0.5 * (ax * ax + ay * ay));
}

double eval_amplitude(AmplitudeKind kind, const PhotonMomentum& ki, const PhotonMomentum& ks,
                      const ExperimentConfig& cfg) {
  if (!ki.forward() || !ks.forward()) return 0.0;
  const double k0 = cfg.k0();
  const double ki_mag = ki.magnitude();
  const double ks_mag = ks.magnitude();
  const double kpx = ki.kx + ks.kx;
  const double kpy = ki.ky + ks.ky;

  double value = pump_envelope(kpx, kpy, cfg.pump_waist_um, cfg.pump_waist_y());
  for (const PhotonMomentum* k : {&ki, &ks}) {
    const double ay = cfg.filter_omega_y_um * k->ky;
    const double aw = cfg.filter_omega_um * (k->magnitude() - k0);
    value *= std::exp(-0.5 * (ay * ay + aw * aw));
  }
  if (kind == AmplitudeKind::Separable || value == 0.0) return value;

  const double kp_total = ki_mag + ks_mag;
  const double transverse_sq = kpx * kpx + kpy * kpy;
  if (transverse_sq >= kp_total * kp_total) return 0.0;  // evanescent pump
  double dkz = 0.0;
  if (cfg.regime == Regime::Exact) {
    dkz = std::sqrt(kp_total * kp_total - transverse_sq) - ki.kz - ks.kz;
  } else {
    // Each longitudinal component expanded to second order in its transverse part.
    const double ti = ki.kx * ki.kx + ki.ky * ki.ky;
    const double ts = ks.kx * ks.kx + ks.ky * ks.ky;
    dkz = ti / (2.0 * ki_mag) + ts / (2.0 * ks_mag) - transverse_sq / (2.0 * kp_total);
  }
  return value * sinc(0.5 * cfg.crystal_length_um * dkz);
}

double eval_reduced_unchecked(AmplitudeKind kind, const ReducedPoint& p,
                              const ExperimentConfig& cfg) {
  const double u = cfg.pump_waist_um * (p.kix + p.ksx);
  const double envelope = std::exp(-0.5 * u * u);
  if (kind == AmplitudeKind::Separable) return envelope;
  const double dkz =
      cfg.regime == Regime::Exact ? exact_unchecked(p) : paraxial_unchecked(p);
  return envelope * sinc(0.5 * cfg.crystal_length_um * dkz);
}

double eval_reduced(AmplitudeKind kind, const ReducedPoint& p, const ExperimentConfig& cfg) {
  if (cfg.reduction != Reduction::Reduced2D) {
    throw std::logic_error("eval_reduced: config is not in reduced2d mode; use full6d paths");
  }
  if (!cfg.narrowband()) {
    throw std::logic_error(
        "eval_reduced: filters too broad for the narrowband reduction; switch to full6d");
  }
  check_reduced_domain(p);
  return eval_reduced_unchecked(kind, p, cfg);
}

}  // namespace qionize
