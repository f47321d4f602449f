#include <doctest.h>

#include <qionize/config.hpp>
#include <qionize/units.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

using namespace qionize;

TEST_CASE("energy converts to carrier wavenumber") {
  CHECK(energy_to_wavenumber(3.753293) == doctest::Approx(19.020678267107723).epsilon(1e-12));
  // 4.594759 eV: 23.2853 1/um quoted to four decimals.
  CHECK(std::abs(energy_to_wavenumber(4.594759) / 23.2853 - 1.0) < 1e-4);
  CHECK(energy_to_wavenumber(4.594759) == doctest::Approx(23.285001371834706).epsilon(1e-12));
}

TEST_CASE("non-positive or non-finite energies are rejected") {
  CHECK_THROWS_AS(energy_to_wavenumber(0.0), std::domain_error);
  CHECK_THROWS_AS(energy_to_wavenumber(-1.0), std::domain_error);
  CHECK_THROWS_AS(energy_to_wavenumber(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
  CHECK_THROWS_AS(energy_to_wavenumber(std::numeric_limits<double>::infinity()),
                  std::domain_error);
}

TEST_CASE("wavenumber is linear in energy") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> e(0.1, 20.0);
  std::uniform_real_distribution<double> s(0.01, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double E = e(rng);
    const double a = s(rng);
    CHECK(energy_to_wavenumber(a * E) == doctest::Approx(a * energy_to_wavenumber(E)).epsilon(1e-13));
  }
}

TEST_CASE("sample config loads") {
  const auto cfg = load_config(std::filesystem::path(QIONIZE_DATA_DIR) / "na_dipole.cfg");
  CHECK(cfg.pump_waist_um == 3.0);
  CHECK(cfg.crystal_length_um == 1.0);
  CHECK(cfg.regime == Regime::Exact);
  CHECK(cfg.reduction == Reduction::Reduced2D);
  CHECK(cfg.k0() == doctest::Approx(19.020678267107723).epsilon(1e-12));
}

TEST_CASE("vertical waist falls back to the horizontal one") {
  const auto cfg = parse_config("pump_waist_um = 7\n");
  CHECK(!cfg.pump_waist_y_um.has_value());
  CHECK(cfg.pump_waist_y() == 7.0);
  const auto cfg2 = parse_config("pump_waist_um = 7\npump_waist_y_um = 2\n");
  CHECK(cfg2.pump_waist_y() == 2.0);
}

TEST_CASE("invalid values name the offending field") {
  auto field_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(field_of("crystal_length_um = -1\n") == "crystal_length_um");
  CHECK(field_of("pump_waist_um = 0\n") == "pump_waist_um");
  CHECK(field_of("channel_energy_ev = abc\n") == "channel_energy_ev");
  CHECK(field_of("regime = sideways\n") == "regime");
  CHECK(field_of("bogus = 1\n") == "bogus");
  CHECK(field_of("quadrature.rel_tol = 2\n") == "quadrature.rel_tol");
  CHECK(field_of("quadrature.max_evals = 10\n") == "quadrature.max_evals");
  CHECK(field_of("pump_waist_um = 1\npump_waist_um = 2\n") == "pump_waist_um");
}

TEST_CASE("missing file is an error") {
  CHECK_THROWS(load_config("/nonexistent/qionize.cfg"));
}

TEST_CASE("reduced model requires narrowband filters") {
  ExperimentConfig cfg;
  cfg.filter_omega_um = 1.0;
  CHECK_FALSE(cfg.narrowband());
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.reduction = Reduction::Full6D;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("serialize then parse is the identity") {
  std::mt19937_64 rng(5);
  auto logu = [&](double lo, double hi) {
    std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
    return std::exp(d(rng));
  };
  for (int i = 0; i < 200; ++i) {
    ExperimentConfig cfg;
    cfg.pump_waist_um = logu(0.1, 1e4);
    if (i % 2) cfg.pump_waist_y_um = logu(0.1, 1e4);
    cfg.crystal_length_um = logu(1e-9, 1e3);
    cfg.filter_omega_um = logu(1e5, 1e9);
    cfg.filter_omega_y_um = logu(1e5, 1e9);
    cfg.channel_energy_ev = logu(0.5, 10.0);
    cfg.regime = i % 3 ? Regime::Exact : Regime::Paraxial;
    cfg.reduction = i % 5 ? Reduction::Reduced2D : Reduction::Full6D;
    cfg.quadrature.method =
        i % 4 ? QuadratureMethod::AdaptiveSubdivision : QuadratureMethod::TensorGauss;
    cfg.quadrature.rel_tol = logu(1e-12, 0.5);
    cfg.quadrature.abs_tol = logu(1e-300, 1e-3);
    cfg.quadrature.max_evals = static_cast<std::int64_t>(logu(1e3, 1e9));
    cfg.quadrature.seed = rng();
    CHECK(parse_config(serialize_config(cfg)) == cfg);
  }
}
