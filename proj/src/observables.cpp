#include "qionize/observables.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

#include "qionize/units.hpp"

namespace qionize {

std::string_view to_string(Parity parity) { return parity == Parity::Even ? "even" : "odd"; }

const std::array<Channel, 4>& builtin_channels() {
  static const std::array<Channel, 4> channels = {
      Channel{"dipole", 3.753293, 1, Parity::Odd, std::nullopt, nullptr},
      Channel{"quadrupole", 4.283461, 2, Parity::Even, std::nullopt, nullptr},
      Channel{"octupole", 4.288194, 3, Parity::Odd, std::nullopt, nullptr},
      Channel{"hexadecapole", 4.594759, 4, Parity::Even, std::nullopt, nullptr},
  };
  return channels;
}

const Channel& find_channel(std::string_view name) {
  for (const Channel& c : builtin_channels()) {
    if (c.name == name) return c;
  }
  throw std::invalid_argument("unknown channel '" + std::string(name) +
                              "' (expected dipole, quadrupole, octupole or hexadecapole)");
}

ExperimentConfig with_channel(ExperimentConfig cfg, const Channel& channel) {
  cfg.channel_energy_ev = channel.transition_energy_ev;
  return cfg;
}

namespace {

// Integrates g(kix, ksx) over the kinematic square through (u, s) coordinates:
// kix = (u + v) / 2, ksx = (u - v) / 2, v = (2 k0 - |u|) sin(s), so
// dkix dksx = (2 k0 - |u|) cos(s) / 2 du ds. The sine map turns the square-root
// edges at |kx| = k0 into smooth behaviour in s.
template <typename G>
IntegralResult integrate_kinematic(const G& g, double k0, double u_max,
                                   const QuadratureSpec& spec) {
  const Integrand2D f = [&g, k0](double u, double s) {
    const double half_width = 2.0 * k0 - std::abs(u);
    const double v = half_width * std::sin(s);
    return 0.5 * half_width * std::cos(s) * g(0.5 * (u + v), 0.5 * (u - v));
  };
  const double h = 0.5 * std::numbers::pi;
  const IntegralResult lower = integrate_2d(f, Rect{-u_max, 0.0, -h, h}, spec);
  const IntegralResult upper = integrate_2d(f, Rect{0.0, u_max, -h, h}, spec);
  return combine(lower, upper);
}

void require_reduced(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.reduction != Reduction::Reduced2D) {
    throw std::invalid_argument(
        "reduction: observables are evaluated in reduced2d mode; full6d integrals are "
        "available through the Monte Carlo oracle");
  }
}

double relative(const IntegralResult& r) {
  return r.value == 0.0 ? 0.0 : r.error_estimate / std::abs(r.value);
}

}  // namespace

ReducedIntegrals reduced_integrals(AmplitudeKind kind, const ExperimentConfig& cfg,
                                   const TabulatedKernel* kernel) {
  require_reduced(cfg);
  const double k0 = cfg.k0();
  const double u_max = std::min(10.0 / cfg.pump_waist_um, 2.0 * k0);
  const bool paraxial = cfg.regime == Regime::Paraxial;
  auto amplitude = [&](double kix, double ksx) {
    return eval_reduced_unchecked(kind, ReducedPoint{kix, ksx, k0}, cfg);
  };

  ReducedIntegrals out;
  if (kernel != nullptr) {
    out.coherent = integrate_kinematic(
        [&](double kix, double ksx) { return amplitude(kix, ksx) * (*kernel)(kix, ksx, k0); },
        k0, u_max, cfg.quadrature);
  } else {
    out.coherent = integrate_kinematic(amplitude, k0, u_max, cfg.quadrature);
  }
  out.norm = integrate_kinematic(
      [&](double kix, double ksx) {
        const double a = amplitude(kix, ksx);
        return a * a;
      },
      k0, u_max, cfg.quadrature);
  out.flux_weighted = integrate_kinematic(
      [&](double kix, double ksx) {
        const double a = amplitude(kix, ksx);
        const double w = paraxial ? 2.0 : obliquity(kix, k0) + obliquity(ksx, k0);
        return a * a * w;
      },
      k0, u_max, cfg.quadrature);
  return out;
}

Normalization normalization(AmplitudeKind kind, const ExperimentConfig& cfg) {
  const ReducedIntegrals ints = reduced_integrals(kind, cfg);
  if (!ints.norm.converged) {
    throw NumericalError(fmt::format("normalization integral of the {} amplitude did not converge",
                                     to_string(kind)),
                         ints.norm);
  }
  return Normalization{1.0 / std::sqrt(ints.norm.value), ints.norm};
}

PhotonFlux photon_flux(AmplitudeKind kind, const ExperimentConfig& cfg) {
  const ReducedIntegrals ints = reduced_integrals(kind, cfg);
  for (const IntegralResult* r : {&ints.norm, &ints.flux_weighted}) {
    if (!r->converged) {
      throw NumericalError(
          fmt::format("flux integral of the {} amplitude did not converge", to_string(kind)), *r);
    }
  }
  const double c0 = 1.0 / std::sqrt(ints.norm.value);
  return PhotonFlux{kSpeedOfLight_um_s * c0 * ints.flux_weighted.value, ints.flux_weighted};
}

FFactor f_factor(AmplitudeKind kind, const ExperimentConfig& cfg, const TabulatedKernel* kernel) {
  FFactor out;
  out.integrals = reduced_integrals(kind, cfg, kernel);
  for (const IntegralResult* r : {&out.integrals.coherent, &out.integrals.flux_weighted}) {
    if (!r->converged) {
      throw NumericalError(
          fmt::format("f-factor integral of the {} amplitude did not converge", to_string(kind)),
          *r);
    }
  }
  const double coherent = out.integrals.coherent.value;
  out.reduced = coherent * coherent / out.integrals.flux_weighted.value;
  return out;
}

RatioResult assemble_ratio(const ReducedIntegrals& ent, const ReducedIntegrals& sep,
                           Regime regime) {
  RatioResult out;
  out.regime = regime;
  out.ent = ent;
  out.sep = sep;
  out.C_ent = 1.0 / std::sqrt(ent.norm.value);
  out.C_sep = 1.0 / std::sqrt(sep.norm.value);
  out.f_ent = ent.coherent.value * ent.coherent.value / ent.flux_weighted.value;
  out.f_sep = sep.coherent.value * sep.coherent.value / sep.flux_weighted.value;
  out.phi_ent = kSpeedOfLight_um_s * out.C_ent * ent.flux_weighted.value;
  out.phi_sep = kSpeedOfLight_um_s * out.C_sep * sep.flux_weighted.value;
  out.R = (out.C_ent / out.C_sep) * (out.f_ent / out.f_sep);

  // First-order propagation of the quadrature error estimates.
  const double rel = 0.5 * relative(ent.norm) + 0.5 * relative(sep.norm) +
                     2.0 * relative(ent.coherent) + 2.0 * relative(sep.coherent) +
                     relative(ent.flux_weighted) + relative(sep.flux_weighted);
  out.err_R = std::abs(out.R) * rel;
  return out;
}

RatioResult assemble_enhancement_ratio(const ExperimentConfig& cfg, const Channel& channel) {
  const TabulatedKernel* kernel = channel.kernel.get();
  if (channel.multipole_order > 1 && kernel == nullptr) {
    throw std::invalid_argument(fmt::format(
        "channel '{}' (multipole order {}) needs a tabulated kernel; first-principles "
        "multipole matrix elements are not modelled",
        channel.name, channel.multipole_order));
  }
  RatioResult out =
      assemble_ratio(reduced_integrals(AmplitudeKind::Entangled, cfg, kernel),
                     reduced_integrals(AmplitudeKind::Separable, cfg, kernel), cfg.regime);
  out.kernel_label = kernel ? "model_kernel:" + kernel->label() : "none";
  return out;
}

RatioResult enhancement_ratio(const ExperimentConfig& cfg, const Channel& channel) {
  RatioResult out = assemble_enhancement_ratio(cfg, channel);
  const std::array<std::pair<const char*, const IntegralResult*>, 6> all = {{
      {"entangled coherent", &out.ent.coherent},
      {"entangled norm", &out.ent.norm},
      {"entangled flux", &out.ent.flux_weighted},
      {"separable coherent", &out.sep.coherent},
      {"separable norm", &out.sep.norm},
      {"separable flux", &out.sep.flux_weighted},
  }};
  for (const auto& [name, r] : all) {
    if (!r->converged) {
      throw NumericalError(fmt::format("{} integral did not converge ({} evals, error {:.3g})",
                                       name, r->evals, r->error_estimate),
                           *r);
    }
  }
  if (out.sep.coherent.value == 0.0 ||
      std::abs(out.sep.coherent.value) <= out.sep.coherent.error_estimate) {
    throw NumericalError("separable coherent sum vanishes; R is undefined for this kernel",
                         out.sep.coherent);
  }
  return out;
}

double sigma_ent_from_classical(double R, double phi_sep_per_um2_s, double sigma_cl_cm4_s) {
  for (double v : {R, phi_sep_per_um2_s, sigma_cl_cm4_s}) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::domain_error("sigma_ent_from_classical: inputs must be positive");
    }
  }
  return R * (phi_sep_per_um2_s * kInvUm2ToInvCm2) * sigma_cl_cm4_s;
}

}  // namespace qionize
