#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qionize/quadrature.hpp"

namespace qionize {

enum class Regime { Exact, Paraxial };
enum class Reduction { Reduced2D, Full6D };

std::string_view to_string(Regime regime);
std::string_view to_string(Reduction reduction);
Regime parse_regime(std::string_view text);
Reduction parse_reduction(std::string_view text);

/// Validation or parse failure that names the offending config key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Frequency and k_y filters must be at least this many times narrower than
/// the carrier for the reduced 2-D model to be used.
inline constexpr double kNarrowbandGuard = 1.0e3;

/// One experiment. Lengths in um, energies in eV; all widths are the
/// position-space widths that multiply wavenumbers in the Gaussian exponents.
struct ExperimentConfig {
  double pump_waist_um = 50.0;
  std::optional<double> pump_waist_y_um;  // falls back to pump_waist_um
  double crystal_length_um = 1.0;
  double filter_omega_um = 4.0e8;
  double filter_omega_y_um = 1.0e7;
  double channel_energy_ev = 3.753293;
  Regime regime = Regime::Exact;
  Reduction reduction = Reduction::Reduced2D;
  QuadratureSpec quadrature;

  double pump_waist_y() const { return pump_waist_y_um.value_or(pump_waist_um); }

  /// Carrier wavenumber in 1/um.
  double k0() const;

  /// True when both filters are narrow enough for Reduced2D.
  bool narrowband() const;

  /// Throws ConfigError on the first violated invariant.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses the `key = value` text format. Blank lines and `#` comments are
/// ignored; unknown or repeated keys are errors. The result is validated.
ExperimentConfig parse_config(std::string_view text);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes every key at full precision; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace qionize
