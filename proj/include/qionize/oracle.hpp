#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "qionize/amplitude.hpp"
#include "qionize/config.hpp"
#include "qionize/quadrature.hpp"

namespace qionize {

enum class McImportance { UniformBox, GaussianProposal };

std::string_view to_string(McImportance importance);

/// Each batch of samples draws from its own std::mt19937_64 seeded with
/// std::seed_seq{seed_lo32, seed_hi32, batch_index}; batch sums are combined in
/// batch order, so the estimate does not depend on the thread count.
inline constexpr std::string_view kPrngAlgorithm =
    "mt19937_64/seed_seq(seed_lo32,seed_hi32,batch)/batch=65536";

struct McSpec {
  std::int64_t samples = 10'000'000;
  std::uint64_t seed = 1;
  McImportance importance = McImportance::GaussianProposal;
  unsigned threads = 0;  // 0: default_thread_count()

  void validate() const;
};

/// Hardware concurrency, capped by the QIONIZE_THREADS environment variable.
unsigned default_thread_count();

struct McIntegral {
  IntegralResult estimate;  // error_estimate is one standard error
  double rejection_fraction = 0.0;
};

/// Six coordinates per sample: (k_ix, k_iy, |k_i|, k_sx, k_sy, |k_s|).
using Coords6 = std::array<double, 6>;

struct Box6 {
  Coords6 lo{};
  Coords6 hi{};
  double volume() const;
};

/// Plain uniform Monte Carlo of g over the box. Used as the primitive under
/// the UniformBox mode of mc_integral.
McIntegral mc_integrate_box(const std::function<double(const Coords6&)>& g, const Box6& box,
                            const McSpec& spec);

using PairIntegrand = std::function<double(const PhotonMomentum& ki, const PhotonMomentum& ks)>;

/// Monte Carlo over the filtered 6-D two-photon momentum space, with the
/// measure dk_x dk_y d|k| per photon (|k| being the filtered frequency
/// variable omega / c). k_z = sqrt(|k|^2 - k_x^2 - k_y^2) > 0 is enforced by
/// rejection. GaussianProposal draws u = k_ix + k_sx from the pump scale,
/// k_ix - k_sx uniformly over the kinematic range, k_y and |k| from their
/// filters. Requires cfg.reduction == Full6D.
McIntegral mc_integral(const PairIntegrand& f, const ExperimentConfig& cfg, const McSpec& spec);

/// Box used by the UniformBox mode: |k_x| < k0, 10 filter standard deviations
/// in k_y and |k|.
Box6 filter_box(const ExperimentConfig& cfg);

/// Analytic 6-D / reduced ratios of the filter integrals:
/// norm: (pi / Omega_y^2)(pi / Omega^2), coherent: (2 pi / Omega_y^2)(2 pi / Omega^2).
double filter_norm_factor(const ExperimentConfig& cfg);
double filter_coherent_factor(const ExperimentConfig& cfg);

struct McRatioResult {
  double R = 0.0;
  double sigma_R = 0.0;
  double f_ent = 0.0;
  double f_sep = 0.0;
  double C_ent = 0.0;  // absolute 6-D values
  double C_sep = 0.0;
  double phi_ent = 0.0;
  double phi_sep = 0.0;
  Regime regime = Regime::Exact;
  // coherent, norm, flux-weighted; entangled then separable
  std::array<IntegralResult, 6> integrals{};
  double rejection_fraction = 0.0;
};

/// Dipole-channel R assembled entirely from 6-D Monte Carlo integrals sharing
/// one sample stream; sigma_R follows from the delta method on their full
/// covariance. Requires cfg.reduction == Full6D.
McRatioResult mc_enhancement_ratio(const ExperimentConfig& cfg, const McSpec& spec);

struct OracleCheckRow {
  ExperimentConfig cfg;
  double R_reduced = 0.0;
  double R_mc = 0.0;
  double sigma_mc = 0.0;
  double tolerance = 0.0;  // max(0.05, 3 sigma_mc / R_mc)
  bool pass = false;
};

/// Cross-validation: n seeded configs with L log-uniform in [0.05, 50] um and
/// the pump waist log-uniform in [3, 50] um, each evaluated by the reduced
/// quadrature and by mc_enhancement_ratio.
std::vector<OracleCheckRow> oracle_check(const ExperimentConfig& base, const McSpec& spec,
                                         int n_configs = 10, std::uint64_t config_seed = 2024);

}  // namespace qionize
