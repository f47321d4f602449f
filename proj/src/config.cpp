#include "qionize/config.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "qionize/units.hpp"

namespace qionize {

std::string_view to_string(Regime regime) {
  return regime == Regime::Exact ? "exact" : "paraxial";
}

std::string_view to_string(Reduction reduction) {
  return reduction == Reduction::Reduced2D ? "reduced2d" : "full6d";
}

Regime parse_regime(std::string_view text) {
  if (text == "exact") return Regime::Exact;
  if (text == "paraxial") return Regime::Paraxial;
  throw ConfigError("regime", "expected exact or paraxial, got '" + std::string(text) + "'");
}

Reduction parse_reduction(std::string_view text) {
  if (text == "reduced2d") return Reduction::Reduced2D;
  if (text == "full6d") return Reduction::Full6D;
  throw ConfigError("reduction",
                    "expected reduced2d or full6d, got '" + std::string(text) + "'");
}

double ExperimentConfig::k0() const { return energy_to_wavenumber(channel_energy_ev); }

bool ExperimentConfig::narrowband() const {
  const double k = k0();
  return filter_omega_um * k > kNarrowbandGuard && filter_omega_y_um * k > kNarrowbandGuard;
}

namespace {

void require_positive(double value, const char* field) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ConfigError(field, fmt::format("must be positive and finite, got {}", value));
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  require_positive(pump_waist_um, "pump_waist_um");
  if (pump_waist_y_um) require_positive(*pump_waist_y_um, "pump_waist_y_um");
  require_positive(crystal_length_um, "crystal_length_um");
  require_positive(filter_omega_um, "filter_omega_um");
  require_positive(filter_omega_y_um, "filter_omega_y_um");
  require_positive(channel_energy_ev, "channel_energy_ev");
  try {
    quadrature.validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw ConfigError(what.substr(0, what.find(':')), what.substr(what.find(':') + 2));
  }
  if (reduction == Reduction::Reduced2D && !narrowband()) {
    throw ConfigError("reduction",
                      fmt::format("reduced2d requires filter_omega_um*k0 and "
                                  "filter_omega_y_um*k0 > {:g}; use full6d",
                                  kNarrowbandGuard));
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, const std::string& field) {
  const std::string buf(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || errno == ERANGE) {
    throw ConfigError(field, "not a number: '" + buf + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view text, const std::string& field) {
  Int exact{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), exact);
  if (ec == std::errc{} && ptr == text.data() + text.size()) return exact;
  // Accept scientific notation such as 1e7 for counts.
  const double v = parse_double(text, field);
  if (v != std::floor(v) || v > 9.0e18 || v < (std::is_signed_v<Int> ? -9.0e18 : 0.0)) {
    throw ConfigError(field, "not an integer: '" + std::string(text) + "'");
  }
  return static_cast<Int>(v);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}", line_no), "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(key, "repeated key");
    if (value.empty()) throw ConfigError(key, "missing value");

    if (key == "pump_waist_um") {
      cfg.pump_waist_um = parse_double(value, key);
    } else if (key == "pump_waist_y_um") {
      cfg.pump_waist_y_um = parse_double(value, key);
    } else if (key == "crystal_length_um") {
      cfg.crystal_length_um = parse_double(value, key);
    } else if (key == "filter_omega_um") {
      cfg.filter_omega_um = parse_double(value, key);
    } else if (key == "filter_omega_y_um") {
      cfg.filter_omega_y_um = parse_double(value, key);
    } else if (key == "channel_energy_ev") {
      cfg.channel_energy_ev = parse_double(value, key);
    } else if (key == "regime") {
      cfg.regime = parse_regime(value);
    } else if (key == "reduction") {
      cfg.reduction = parse_reduction(value);
    } else if (key == "quadrature.method") {
      try {
        cfg.quadrature.method = parse_quadrature_method(value);
      } catch (const std::invalid_argument&) {
        throw ConfigError(key, "expected adaptive or tensor_gauss");
      }
    } else if (key == "quadrature.rel_tol") {
      cfg.quadrature.rel_tol = parse_double(value, key);
    } else if (key == "quadrature.abs_tol") {
      cfg.quadrature.abs_tol = parse_double(value, key);
    } else if (key == "quadrature.max_evals") {
      cfg.quadrature.max_evals = parse_int<std::int64_t>(value, key);
    } else if (key == "quadrature.seed") {
      cfg.quadrature.seed = parse_int<std::uint64_t>(value, key);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("path", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  auto put = [&out](std::string_view key, auto value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  put("pump_waist_um", fmt::format("{}", cfg.pump_waist_um));
  if (cfg.pump_waist_y_um) put("pump_waist_y_um", fmt::format("{}", *cfg.pump_waist_y_um));
  put("crystal_length_um", fmt::format("{}", cfg.crystal_length_um));
  put("filter_omega_um", fmt::format("{}", cfg.filter_omega_um));
  put("filter_omega_y_um", fmt::format("{}", cfg.filter_omega_y_um));
  put("channel_energy_ev", fmt::format("{}", cfg.channel_energy_ev));
  put("regime", to_string(cfg.regime));
  put("reduction", to_string(cfg.reduction));
  put("quadrature.method", to_string(cfg.quadrature.method));
  put("quadrature.rel_tol", fmt::format("{}", cfg.quadrature.rel_tol));
  put("quadrature.abs_tol", fmt::format("{}", cfg.quadrature.abs_tol));
  put("quadrature.max_evals", cfg.quadrature.max_evals);
  put("quadrature.seed", cfg.quadrature.seed);
  return out;
}

}  // namespace qionize
