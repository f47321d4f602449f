#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qionize/config.hpp"
#include "qionize/observables.hpp"

namespace qionize {

inline constexpr std::string_view kVersion = "0.1.0";

enum class OutputFormat { Csv, JsonLines };

OutputFormat parse_output_format(std::string_view text);

/// Sweepable parameters: "L" (crystal length, um) and "omega_p" (pump waist, um).
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct SweepPlan {
  std::string name = "custom";
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  std::vector<Channel> channels;
  std::vector<Regime> regimes;
  std::filesystem::path output;
  OutputFormat format = OutputFormat::Csv;
  std::vector<std::string> notes;  // copied into the output header

  /// Throws std::invalid_argument describing the first problem.
  void validate() const;
};

struct SweepRecord {
  ExperimentConfig cfg;
  std::string channel;
  std::string kernel_label = "none";
  Regime regime = Regime::Exact;
  double R = 0.0;
  double f_ent = 0.0;
  double f_sep = 0.0;
  double C_ratio = 0.0;
  double err_R = 0.0;
  bool converged = false;
  std::string error;  // empty unless the point failed
};

/// Parses "name=v1,v2,..." into an axis.
SweepAxis parse_axis(std::string_view text);

std::vector<double> log_spaced(double lo, double hi, int n);

/// Evaluates every grid point (channels x regimes x axis1 x axis2, last index
/// fastest). Points run concurrently on `threads` workers (0: default) but the
/// returned records are always in grid order. Failures are recorded per row.
std::vector<SweepRecord> run_sweep(const SweepPlan& plan, const ExperimentConfig& tmpl,
                                   unsigned threads = 0);

/// The record a single-point evaluation at cfg would produce.
SweepRecord evaluate_point(const ExperimentConfig& cfg, const Channel& channel);

struct Preset {
  std::string name;
  std::string description;
  SweepPlan plan;
  ExperimentConfig tmpl;
};

/// fig2a, fig2b, fig2c.
std::vector<Preset> builtin_presets();
Preset find_preset(std::string_view name);

/// Column order of the CSV body; also the key order of the JSON lines.
inline constexpr std::string_view kCsvHeader =
    "L_um,omega_p_um,channel,regime,R,f_ent,f_sep,C_ratio,err_R,converged";

/// Header comment lines (version, conventions, template, notes) followed by
/// one row per record. Byte-stable for identical inputs.
void write_csv(std::ostream& out, const SweepPlan& plan, const ExperimentConfig& tmpl,
               const std::vector<SweepRecord>& records);

/// One JSON object per record per line.
void write_json_lines(std::ostream& out, const std::vector<SweepRecord>& records);

std::string record_to_json(const SweepRecord& record);

}  // namespace qionize
