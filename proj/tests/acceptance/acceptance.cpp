// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <qionize/amplitude.hpp>
#include <qionize/kernel.hpp>
#include <qionize/observables.hpp>
#include <qionize/oracle.hpp>
#include <qionize/quadrature.hpp>
#include <qionize/sweep.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "support/oracles.hpp"

using namespace qionize;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, double limit_s,
            const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = s <= limit_s;
  if (!in_time) o.detail += fmt::format("; over time budget {:.0f} s", limit_s);
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  fmt::print("{} {} {}: {} [{:.2f} s]\n", id, pass ? "PASS" : "FAIL", title, o.detail, s);
  std::fflush(stdout);
}

ExperimentConfig point(double w, double L, Regime regime) {
  ExperimentConfig cfg;
  cfg.pump_waist_um = w;
  cfg.crystal_length_um = L;
  cfg.regime = regime;
  return cfg;
}

const Channel& dipole() { return find_channel("dipole"); }

// Shared by the magnitude and suppression criteria.
std::vector<SweepRecord> fig2a_records;

Outcome max_R(Regime regime, bool at_least, double threshold) {
  double best = -1.0;
  const SweepRecord* arg = nullptr;
  int bad = 0;
  for (const auto& r : fig2a_records) {
    if (r.regime != regime) continue;
    if (!r.converged) ++bad;
    if (r.R > best) {
      best = r.R;
      arg = &r;
    }
  }
  const bool ok = bad == 0 && (at_least ? best >= threshold : best <= threshold);
  return {ok, fmt::format("max R = {:.6g} at omega_p = {:.4g} um, L = {:.4g} um (need {} {}); "
                          "{} unconverged points",
                          best, arg ? arg->cfg.pump_waist_um : 0.0,
                          arg ? arg->cfg.crystal_length_um : 0.0, at_least ? ">=" : "<=",
                          threshold, bad)};
}

}  // namespace

int main() {
  report("AC1", "identity limit", 10.0, [] {
    double worst = 0.0;
    for (Regime regime : {Regime::Exact, Regime::Paraxial}) {
      for (double w : {3.0, 10.0, 50.0}) {
        worst = std::max(worst, std::abs(enhancement_ratio(point(w, 1e-9, regime), dipole()).R - 1.0));
      }
    }
    return Outcome{worst <= 1e-3, fmt::format("6 cases, max |R - 1| = {:.3g}", worst)};
  });

  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto preset = find_preset("fig2a");
    fig2a_records = run_sweep(preset.plan, preset.tmpl);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fmt::print("fig2a grid: {} points in {:.2f} s\n", fig2a_records.size(), s);
    report("AC2", "beyond-paraxial enhancement magnitude", 300.0 - s,
           [] { return max_R(Regime::Exact, true, 100.0); });
    report("AC3", "paraxial suppression", 300.0, [] { return max_R(Regime::Paraxial, false, 5.0); });
  }

  report("AC4", "large-L decay", 60.0, [] {
    const double R = enhancement_ratio(point(3.0, 50.0, Regime::Exact), dipole()).R;
    return Outcome{R <= 5.0, fmt::format("R(L = 50 um, omega_p = 3 um) = {:.6g} (need <= 5)", R)};
  });

  report("AC5", "waist monotonicity", 60.0, [] {
    std::vector<double> R;
    std::string list;
    for (double w : {1.0, 3.0, 10.0, 30.0, 100.0}) {
      R.push_back(enhancement_ratio(point(w, 1.0, Regime::Exact), dipole()).R);
      list += fmt::format("{}{:.6g}", list.empty() ? "" : ", ", R.back());
    }
    int violations = 0;
    for (std::size_t i = 1; i < R.size(); ++i) {
      if (R[i] < R[i - 1] * (1.0 - 0.01)) ++violations;
    }
    return Outcome{violations == 0,
                   fmt::format("R at omega_p = 1, 3, 10, 30, 100 um: {}; {} drops above 1%", list,
                               violations)};
  });

  report("AC6", "oracle equivalence", 1200.0, [] {
    McSpec spec;
    spec.samples = 10'000'000;
    const auto rows = oracle_check(ExperimentConfig{}, spec, 10);
    int passed = 0;
    double worst = 0.0;
    for (const auto& r : rows) {
      passed += r.pass ? 1 : 0;
      worst = std::max(worst, std::abs(r.R_reduced / r.R_mc - 1.0));
    }
    return Outcome{passed == static_cast<int>(rows.size()),
                   fmt::format("{}/{} configs within tolerance, worst |R_2D / R_6D - 1| = {:.3g}",
                               passed, rows.size(), worst)};
  });

  report("AC7", "invariant suite", 120.0, [] {
    std::mt19937_64 rng(2024);
    std::vector<std::string> broken;
    const double band_lo = oracle::sinc_minimum();

    // Amplitude: exchange symmetry, band, paraxial Taylor agreement.
    for (Regime regime : {Regime::Exact, Regime::Paraxial}) {
      for (double L : {0.1, 3.0, 50.0}) {
        const auto cfg = point(3.0, L, regime);
        const double k0 = cfg.k0();
        std::uniform_real_distribution<double> d(-0.9999 * k0, 0.9999 * k0);
        for (int i = 0; i < 5000; ++i) {
          const ReducedPoint p{d(rng), d(rng), k0};
          const ReducedPoint q{p.ksx, p.kix, k0};
          const double F = eval_reduced(AmplitudeKind::Entangled, p, cfg);
          if (std::abs(F - eval_reduced(AmplitudeKind::Entangled, q, cfg)) > 1e-13) {
            broken.push_back("exchange symmetry");
          }
          if (F < band_lo - 1e-12 || F > 1.0) broken.push_back("amplitude band");
        }
      }
    }
    {
      const double k0 = point(3.0, 1.0, Regime::Exact).k0();
      for (double s : {0.02, 0.01, 0.005}) {
        const ReducedPoint p{s * k0, -0.4 * s * k0, k0};
        const double rem = std::abs(delta_kz_exact(p) - delta_kz_paraxial(p));
        if (rem > 2.0 * std::pow(s, 4) * k0) broken.push_back("paraxial Taylor agreement");
      }
    }

    // Normalization residual with C and the norm integral from different rules.
    for (auto kind : {AmplitudeKind::Entangled, AmplitudeKind::Separable}) {
      auto cfg = point(10.0, 5.0, Regime::Exact);
      const double C = normalization(kind, cfg).reduced;
      cfg.quadrature.method = QuadratureMethod::TensorGauss;
      cfg.quadrature.rel_tol = 1e-9;
      const auto N = reduced_integrals(kind, cfg).norm;
      if (!N.converged || std::abs(C * C * N.value - 1.0) >= 1e-6) {
        broken.push_back("normalization residual");
      }
    }

    // Global rescaling of both amplitudes leaves R unchanged.
    {
      const auto r = enhancement_ratio(point(3.0, 5.0, Regime::Exact), dipole());
      std::uniform_real_distribution<double> d(-5.0, 5.0);
      for (int i = 0; i < 100; ++i) {
        const double a = std::exp(d(rng));
        auto scale = [a](ReducedIntegrals x) {
          x.coherent.value *= a;
          x.norm.value *= a * a;
          x.flux_weighted.value *= a * a;
          return x;
        };
        if (std::abs(assemble_ratio(scale(r.ent), scale(r.sep), r.regime).R / r.R - 1.0) > 1e-12) {
          broken.push_back("scale invariance of R");
        }
      }
    }

    // Quadrature linearity and additivity.
    {
      QuadratureSpec spec;
      spec.rel_tol = 1e-10;
      spec.abs_tol = 0.0;
      std::uniform_real_distribution<double> c(-3.0, 3.0);
      for (int i = 0; i < 20; ++i) {
        const double a = c(rng), b = c(rng), p = 1.0 + std::abs(c(rng));
        auto f = [p](double x, double y) { return std::exp(-p * (x * x + y * y)); };
        auto g = [p](double x, double y) { return std::cos(p * x + y); };
        const Rect dom{-1.5, 2.0, -1.0, 1.0};
        const double If = integrate_2d(f, dom, spec).value;
        const double Ig = integrate_2d(g, dom, spec).value;
        const double Ih =
            integrate_2d([&](double x, double y) { return a * f(x, y) + b * g(x, y); }, dom, spec).value;
        if (std::abs(Ih - a * If - b * Ig) > 1e-8 * (std::abs(a * If) + std::abs(b * Ig))) {
          broken.push_back("quadrature linearity");
        }
        const auto l = integrate_2d(f, {-1.5, 0.3, -1.0, 1.0}, spec);
        const auto r = integrate_2d(f, {0.3, 2.0, -1.0, 1.0}, spec);
        if (std::abs(combine(l, r).value / If - 1.0) > 1e-8) broken.push_back("quadrature additivity");
      }
    }

    std::sort(broken.begin(), broken.end());
    broken.erase(std::unique(broken.begin(), broken.end()), broken.end());
    std::string names;
    for (const auto& b : broken) names += (names.empty() ? "" : ", ") + b;
    return Outcome{broken.empty(), broken.empty()
                                       ? std::string("exchange symmetry, scale invariance, band, "
                                                     "normalization, Taylor, linearity/additivity")
                                       : "violated: " + names};
  });

  report("AC8", "synthetic-kernel parity", 120.0, [] {
    const auto odd = make_synthetic_kernel(SyntheticParity::Odd, 129);
    const auto even = make_synthetic_kernel(SyntheticParity::Even, 129);
    double worst_odd = 0.0;
    double least_even = 1e300;
    bool ok = true;
    for (auto kind : {AmplitudeKind::Entangled, AmplitudeKind::Separable}) {
      for (double w : {3.0, 10.0, 50.0}) {
        for (double L : {0.1, 1.0, 10.0}) {
          const auto cfg = point(w, L, Regime::Exact);
          const double plain = std::abs(reduced_integrals(kind, cfg).coherent.value);
          const auto o = reduced_integrals(kind, cfg, &odd).coherent;
          const auto e = reduced_integrals(kind, cfg, &even).coherent;
          const double tol = std::max(cfg.quadrature.rel_tol * plain, o.error_estimate);
          ok = ok && o.converged && e.converged && std::abs(o.value) <= tol &&
               std::abs(e.value) > 0.1 * plain;
          worst_odd = std::max(worst_odd, std::abs(o.value) / plain);
          least_even = std::min(least_even, std::abs(e.value) / plain);
        }
      }
    }
    return Outcome{ok, fmt::format("odd kernel: max |numerator| / |plain| = {:.3g}; even kernel: "
                                   "min |numerator| / |plain| = {:.3g}",
                                   worst_odd, least_even)};
  });

  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
