#include "qionize/oracle.hpp"

#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "qionize/observables.hpp"
#include "qionize/units.hpp"

namespace qionize {

std::string_view to_string(McImportance importance) {
  return importance == McImportance::UniformBox ? "uniform_box" : "gaussian_proposal";
}

void McSpec::validate() const {
  if (samples < 100'000) {
    throw std::invalid_argument(fmt::format("mc: samples must be >= 1e5, got {}", samples));
  }
}

unsigned default_thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QIONIZE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

double Box6::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < 6; ++i) v *= hi[i] - lo[i];
  return v;
}

double filter_norm_factor(const ExperimentConfig& cfg) {
  const double pi = std::numbers::pi;
  return (pi / (cfg.filter_omega_y_um * cfg.filter_omega_y_um)) *
         (pi / (cfg.filter_omega_um * cfg.filter_omega_um));
}

double filter_coherent_factor(const ExperimentConfig& cfg) {
  const double two_pi = 2.0 * std::numbers::pi;
  return (two_pi / (cfg.filter_omega_y_um * cfg.filter_omega_y_um)) *
         (two_pi / (cfg.filter_omega_um * cfg.filter_omega_um));
}

namespace {

constexpr std::int64_t kBatchSize = 65536;

template <std::size_t N>
struct Accumulator {
  std::array<double, N> sum{};
  std::array<std::array<double, N>, N> cross{};
  std::int64_t count = 0;
  std::int64_t rejected = 0;
  std::int64_t nonzero = 0;

  void add(const std::array<double, N>& x) {
    bool any = false;
    for (double v : x) any = any || v != 0.0;
    if (any) ++nonzero;
    for (std::size_t a = 0; a < N; ++a) {
      sum[a] += x[a];
      for (std::size_t b = a; b < N; ++b) cross[a][b] += x[a] * x[b];
    }
  }

  void merge(const Accumulator& o) {
    for (std::size_t a = 0; a < N; ++a) {
      sum[a] += o.sum[a];
      for (std::size_t b = a; b < N; ++b) cross[a][b] += o.cross[a][b];
    }
    count += o.count;
    rejected += o.rejected;
    nonzero += o.nonzero;
  }

  double mean(std::size_t a) const { return sum[a] / static_cast<double>(count); }

  // Covariance of the sample means.
  double cov_of_mean(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    const double n = static_cast<double>(count);
    const double c = cross[a][b] / n - mean(a) * mean(b);
    return c / (n - 1.0);
  }
};

// Draws samples in fixed-size batches, each with its own seeded engine. The
// sampler writes N weighted values and returns false for a rejected draw.
template <std::size_t N, typename Sampler>
Accumulator<N> run_batches(const McSpec& spec, const Sampler& sampler) {
  spec.validate();
  const std::int64_t n_batches = (spec.samples + kBatchSize - 1) / kBatchSize;
  std::vector<Accumulator<N>> partial(static_cast<std::size_t>(n_batches));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t b = next++; b < n_batches; b = next++) {
      std::seed_seq seq{static_cast<std::uint32_t>(spec.seed & 0xffffffffu),
                        static_cast<std::uint32_t>(spec.seed >> 32),
                        static_cast<std::uint32_t>(b)};
      std::mt19937_64 rng(seq);
      const std::int64_t n = std::min(kBatchSize, spec.samples - b * kBatchSize);
      Accumulator<N>& acc = partial[static_cast<std::size_t>(b)];
      std::array<double, N> x{};
      for (std::int64_t i = 0; i < n; ++i) {
        x.fill(0.0);
        if (!sampler(rng, x)) ++acc.rejected;
        acc.add(x);
      }
      acc.count = n;
    }
  };
  const unsigned n_threads =
      std::min<unsigned>(spec.threads ? spec.threads : default_thread_count(),
                         static_cast<unsigned>(n_batches));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  Accumulator<N> total;
  for (const auto& p : partial) total.merge(p);
  if (total.nonzero == 0) {
    throw std::runtime_error("mc: zero effective sample size (all weights are zero)");
  }
  return total;
}

IntegralResult to_result(const Accumulator<1>& acc) {
  return {acc.mean(0), std::sqrt(std::max(0.0, acc.cov_of_mean(0, 0))), acc.count, true};
}

double rejection(const auto& acc) {
  return static_cast<double>(acc.rejected) / static_cast<double>(acc.count);
}

// Maps sample coordinates to photon momenta; false when k_z would not be real
// and positive.
bool to_momenta(const Coords6& c, PhotonMomentum& ki, PhotonMomentum& ks) {
  const double zi = c[2] * c[2] - c[0] * c[0] - c[1] * c[1];
  const double zs = c[5] * c[5] - c[3] * c[3] - c[4] * c[4];
  if (!(c[2] > 0.0) || !(c[5] > 0.0) || !(zi > 0.0) || !(zs > 0.0)) return false;
  ki = {c[0], c[1], std::sqrt(zi)};
  ks = {c[3], c[4], std::sqrt(zs)};
  return true;
}

// Draws coordinates and the inverse proposal density for the chosen mode.
class Proposal {
 public:
  Proposal(const ExperimentConfig& cfg, McImportance mode)
      : mode_(mode), k0_(cfg.k0()), box_(filter_box(cfg)) {
    sigma_u_ = 1.0 / cfg.pump_waist_um;
    sigma_y_ = 1.0 / cfg.filter_omega_y_um;
    sigma_k_ = 1.0 / cfg.filter_omega_um;
  }

  double draw(std::mt19937_64& rng, Coords6& c) const {
    if (mode_ == McImportance::UniformBox) {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (std::size_t i = 0; i < 6; ++i) c[i] = box_.lo[i] + (box_.hi[i] - box_.lo[i]) * unit(rng);
      return box_.volume();
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> span(-2.0 * k0_, 2.0 * k0_);
    const double zu = normal(rng);
    const double u = sigma_u_ * zu;
    const double v = span(rng);
    const double zy1 = normal(rng), zy2 = normal(rng);
    const double zk1 = normal(rng), zk2 = normal(rng);
    c = {0.5 * (u + v), sigma_y_ * zy1, k0_ + sigma_k_ * zk1,
         0.5 * (u - v), sigma_y_ * zy2, k0_ + sigma_k_ * zk2};
    // Density in (kix, ksx) is 2 p(u) p(v); the k_y and |k| draws are normal.
    const double two_pi = 2.0 * std::numbers::pi;
    const double log_density = -0.5 * (zu * zu + zy1 * zy1 + zy2 * zy2 + zk1 * zk1 + zk2 * zk2) -
                               2.5 * std::log(two_pi);
    const double norm = sigma_u_ * sigma_y_ * sigma_y_ * sigma_k_ * sigma_k_;
    return (4.0 * k0_ / 2.0) * norm * std::exp(-log_density);
  }

 private:
  McImportance mode_;
  double k0_;
  Box6 box_;
  double sigma_u_ = 0.0, sigma_y_ = 0.0, sigma_k_ = 0.0;
};

void require_full6d(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.reduction != Reduction::Full6D) {
    throw std::invalid_argument("reduction: the Monte Carlo oracle needs a full6d config");
  }
}

}  // namespace

Box6 filter_box(const ExperimentConfig& cfg) {
  const double k0 = cfg.k0();
  const double dy = 10.0 / cfg.filter_omega_y_um;
  const double dk = 10.0 / cfg.filter_omega_um;
  return Box6{{-k0, -dy, k0 - dk, -k0, -dy, k0 - dk}, {k0, dy, k0 + dk, k0, dy, k0 + dk}};
}

McIntegral mc_integrate_box(const std::function<double(const Coords6&)>& g, const Box6& box,
                            const McSpec& spec) {
  const double volume = box.volume();
  auto sampler = [&](std::mt19937_64& rng, std::array<double, 1>& x) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Coords6 c{};
    for (std::size_t i = 0; i < 6; ++i) c[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    x[0] = volume * g(c);
    return true;
  };
  const auto acc = run_batches<1>(spec, sampler);
  return {to_result(acc), 0.0};
}

McIntegral mc_integral(const PairIntegrand& f, const ExperimentConfig& cfg, const McSpec& spec) {
  require_full6d(cfg);
  const Proposal proposal(cfg, spec.importance);
  auto sampler = [&](std::mt19937_64& rng, std::array<double, 1>& x) {
    Coords6 c{};
    const double inv_density = proposal.draw(rng, c);
    PhotonMomentum ki, ks;
    if (!to_momenta(c, ki, ks)) return false;
    x[0] = inv_density * f(ki, ks);
    return true;
  };
  const auto acc = run_batches<1>(spec, sampler);
  return {to_result(acc), rejection(acc)};
}

McRatioResult mc_enhancement_ratio(const ExperimentConfig& cfg, const McSpec& spec) {
  require_full6d(cfg);
  const Proposal proposal(cfg, spec.importance);
  const bool paraxial = cfg.regime == Regime::Paraxial;
  auto sampler = [&](std::mt19937_64& rng, std::array<double, 6>& x) {
    Coords6 c{};
    const double inv_density = proposal.draw(rng, c);
    PhotonMomentum ki, ks;
    if (!to_momenta(c, ki, ks)) return false;
    const double w = paraxial ? 2.0 : ki.kz / ki.magnitude() + ks.kz / ks.magnitude();
    const double fe = eval_amplitude(AmplitudeKind::Entangled, ki, ks, cfg);
    const double fs = eval_amplitude(AmplitudeKind::Separable, ki, ks, cfg);
    x = {inv_density * fe, inv_density * fe * fe, inv_density * fe * fe * w,
         inv_density * fs, inv_density * fs * fs, inv_density * fs * fs * w};
    return true;
  };
  const auto acc = run_batches<6>(spec, sampler);

  McRatioResult out;
  out.regime = cfg.regime;
  out.rejection_fraction = rejection(acc);
  std::array<double, 6> m{};
  for (std::size_t j = 0; j < 6; ++j) {
    m[j] = acc.mean(j);
    out.integrals[j] = {m[j], std::sqrt(std::max(0.0, acc.cov_of_mean(j, j))), acc.count, true};
  }
  const double Ie = m[0], Ne = m[1], De = m[2], Is = m[3], Ns = m[4], Ds = m[5];
  out.C_ent = 1.0 / std::sqrt(Ne);
  out.C_sep = 1.0 / std::sqrt(Ns);
  out.f_ent = Ie * Ie / De;
  out.f_sep = Is * Is / Ds;
  out.phi_ent = kSpeedOfLight_um_s * out.C_ent * De;
  out.phi_sep = kSpeedOfLight_um_s * out.C_sep * Ds;
  out.R = (out.C_ent / out.C_sep) * (out.f_ent / out.f_sep);

  // log R = 2 log Ie - 1/2 log Ne - log De - 2 log Is + 1/2 log Ns + log Ds
  const std::array<double, 6> grad = {2.0 / Ie, -0.5 / Ne, -1.0 / De,
                                      -2.0 / Is, 0.5 / Ns, 1.0 / Ds};
  double var_log = 0.0;
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) var_log += grad[a] * grad[b] * acc.cov_of_mean(a, b);
  }
  out.sigma_R = std::abs(out.R) * std::sqrt(std::max(0.0, var_log));
  return out;
}

std::vector<OracleCheckRow> oracle_check(const ExperimentConfig& base, const McSpec& spec,
                                         int n_configs, std::uint64_t config_seed) {
  std::mt19937_64 rng(config_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return lo * std::pow(hi / lo, unit(rng));
  };
  std::vector<OracleCheckRow> rows;
  for (int i = 0; i < n_configs; ++i) {
    OracleCheckRow row;
    row.cfg = base;
    row.cfg.crystal_length_um = log_uniform(0.05, 50.0);
    row.cfg.pump_waist_um = log_uniform(3.0, 50.0);
    row.cfg.pump_waist_y_um.reset();

    ExperimentConfig reduced = row.cfg;
    reduced.reduction = Reduction::Reduced2D;
    row.R_reduced = enhancement_ratio(reduced, find_channel("dipole")).R;

    ExperimentConfig full = row.cfg;
    full.reduction = Reduction::Full6D;
    McSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(i);
    const McRatioResult mc = mc_enhancement_ratio(full, s);
    row.R_mc = mc.R;
    row.sigma_mc = mc.sigma_R;
    row.tolerance = std::max(0.05, 3.0 * mc.sigma_R / std::abs(mc.R));
    row.pass = std::abs(row.R_reduced / row.R_mc - 1.0) <= row.tolerance;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qionize
