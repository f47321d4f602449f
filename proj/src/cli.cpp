#include "qionize/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <map>
#include <memory>
#include <optional>

#include "qionize/amplitude.hpp"
#include "qionize/config.hpp"
#include "qionize/kernel.hpp"
#include "qionize/observables.hpp"
#include "qionize/oracle.hpp"
#include "qionize/sweep.hpp"

namespace qionize {

namespace {

struct PointOptions {
  std::string config_path;
  std::optional<double> length;
  std::optional<double> waist;
  std::string regime;
  std::string channel = "dipole";
  std::string kernel_path;
};

void add_point_options(CLI::App* cmd, PointOptions& o) {
  cmd->add_option("--config", o.config_path, "experiment config file");
  cmd->add_option("--L", o.length, "crystal length in um");
  cmd->add_option("--omega-p", o.waist, "pump waist in um");
  cmd->add_option("--regime", o.regime, "exact or paraxial");
  cmd->add_option("--channel", o.channel, "dipole, quadrupole, octupole or hexadecapole");
  cmd->add_option("--kernel", o.kernel_path, "tabulated channel kernel file");
}

ExperimentConfig base_config(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : load_config(path);
}

Channel resolve_channel(const std::string& name, const std::string& kernel_path) {
  Channel ch = find_channel(name);
  if (!kernel_path.empty()) ch.kernel = std::make_shared<TabulatedKernel>(load_kernel(kernel_path));
  return ch;
}

ExperimentConfig point_config(const PointOptions& o, const Channel& channel) {
  ExperimentConfig cfg = base_config(o.config_path);
  // A config file pins the carrier explicitly; otherwise the channel sets it.
  if (o.config_path.empty()) cfg = with_channel(cfg, channel);
  if (o.length) cfg.crystal_length_um = *o.length;
  if (o.waist) cfg.pump_waist_um = *o.waist;
  if (!o.regime.empty()) cfg.regime = parse_regime(o.regime);
  cfg.validate();
  return cfg;
}

nlohmann::ordered_json integral_json(const IntegralResult& r) {
  return {{"value", r.value},
          {"error", r.error_estimate},
          {"evals", r.evals},
          {"converged", r.converged}};
}

int run_ratio(const PointOptions& o, std::ostream& out) {
  const Channel channel = resolve_channel(o.channel, o.kernel_path);
  const ExperimentConfig cfg = point_config(o, channel);
  const RatioResult r = assemble_enhancement_ratio(cfg, channel);
  nlohmann::ordered_json j;
  j["R"] = r.R;
  j["err_R"] = r.err_R;
  j["f_ent"] = r.f_ent;
  j["f_sep"] = r.f_sep;
  j["C_ratio"] = r.C_ratio();
  j["phi_ent"] = r.phi_ent;
  j["phi_sep"] = r.phi_sep;
  j["converged"] = r.converged();
  j["regime"] = to_string(r.regime);
  j["channel"] = channel.name;
  j["kernel"] = r.kernel_label;
  j["L_um"] = cfg.crystal_length_um;
  j["omega_p_um"] = cfg.pump_waist_um;
  j["k0_per_um"] = cfg.k0();
  j["common_factors"] = {{"C", kNormalizationFactor}, {"phi", kFluxFactor}};
  j["diagnostics"] = {{"ent_coherent", integral_json(r.ent.coherent)},
                      {"ent_norm", integral_json(r.ent.norm)},
                      {"ent_flux", integral_json(r.ent.flux_weighted)},
                      {"sep_coherent", integral_json(r.sep.coherent)},
                      {"sep_norm", integral_json(r.sep.norm)},
                      {"sep_flux", integral_json(r.sep.flux_weighted)}};
  out << j.dump() << '\n';
  return r.converged() ? kExitOk : kExitNumerical;
}

int run_flux(const PointOptions& o, std::ostream& out) {
  const Channel channel = resolve_channel(o.channel, o.kernel_path);
  const ExperimentConfig cfg = point_config(o, channel);
  nlohmann::ordered_json j;
  for (AmplitudeKind kind : {AmplitudeKind::Entangled, AmplitudeKind::Separable}) {
    const PhotonFlux phi = photon_flux(kind, cfg);
    const Normalization c = normalization(kind, cfg);
    j[std::string(to_string(kind))] = {{"phi", phi.reduced},
                                       {"C", c.reduced},
                                       {"flux_integral", integral_json(phi.integral)},
                                       {"norm_integral", integral_json(c.integral)}};
  }
  j["units"] = "phi in um^-2 s^-1";
  j["common_factors"] = {{"C", kNormalizationFactor}, {"phi", kFluxFactor}};
  j["regime"] = to_string(cfg.regime);
  out << j.dump() << '\n';
  return kExitOk;
}

int run_amplitude_grid(const PointOptions& o, const std::string& kind_name, int n,
                       const std::string& out_path, std::ostream& out) {
  if (n < 2) throw std::invalid_argument("--n must be at least 2");
  AmplitudeKind kind;
  if (kind_name == "entangled") {
    kind = AmplitudeKind::Entangled;
  } else if (kind_name == "separable") {
    kind = AmplitudeKind::Separable;
  } else {
    throw std::invalid_argument("--kind must be entangled or separable");
  }
  const Channel channel = find_channel(o.channel);
  const ExperimentConfig cfg = point_config(o, channel);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::invalid_argument("cannot open '" + out_path + "' for writing");
  }
  std::ostream& sink = out_path.empty() ? out : file;
  const double k0 = cfg.k0();
  sink << "# qionize " << kVersion << " amplitude-grid kind=" << kind_name
       << " regime=" << to_string(cfg.regime) << " L_um=" << fmt::format("{:.17g}", cfg.crystal_length_um)
       << " omega_p_um=" << fmt::format("{:.17g}", cfg.pump_waist_um)
       << " (cell centres of an n x n grid over (-k0, k0)^2)\n";
  sink << "kix,ksx,F\n";
  for (int i = 0; i < n; ++i) {
    const double kix = -k0 + (i + 0.5) * 2.0 * k0 / n;
    for (int s = 0; s < n; ++s) {
      const double ksx = -k0 + (s + 0.5) * 2.0 * k0 / n;
      sink << fmt::format("{:.17g},{:.17g},{:.17g}\n", kix, ksx,
                          eval_reduced(kind, ReducedPoint{kix, ksx, k0}, cfg));
    }
  }
  return kExitOk;
}

struct SweepOptions {
  std::string preset;
  std::string config_path;
  std::string axis1;
  std::string axis2;
  std::vector<std::string> channels;
  std::vector<std::string> regimes;
  std::vector<std::string> kernels;  // name=path
  std::string out_path;
  std::string format = "csv";
  unsigned threads = 0;
};

int run_sweep_command(const SweepOptions& o, std::ostream& out) {
  SweepPlan plan;
  ExperimentConfig tmpl;
  if (!o.preset.empty()) {
    const Preset preset = find_preset(o.preset);
    plan = preset.plan;
    tmpl = preset.tmpl;
    if (!o.config_path.empty()) {
      const double preset_length = tmpl.crystal_length_um;
      tmpl = load_config(o.config_path);
      if (o.preset == "fig2c") tmpl.crystal_length_um = preset_length;
    }
  } else {
    if (o.axis1.empty()) throw std::invalid_argument("sweep needs --preset or --axis1");
    plan.axis1 = parse_axis(o.axis1);
    if (!o.axis2.empty()) plan.axis2 = parse_axis(o.axis2);
    tmpl = base_config(o.config_path);
  }
  if (!o.channels.empty()) {
    std::map<std::string, std::string> kernel_paths;
    for (const std::string& kv : o.kernels) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--kernel expects name=path");
      kernel_paths[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    plan.channels.clear();
    for (const std::string& name : o.channels) {
      const auto it = kernel_paths.find(name);
      plan.channels.push_back(resolve_channel(name, it == kernel_paths.end() ? "" : it->second));
    }
  }
  if (!o.regimes.empty()) {
    plan.regimes.clear();
    for (const std::string& r : o.regimes) plan.regimes.push_back(parse_regime(r));
  }
  if (plan.channels.empty()) plan.channels = {find_channel("dipole")};
  if (plan.regimes.empty()) plan.regimes = {Regime::Exact};
  plan.format = parse_output_format(o.format);
  plan.output = o.out_path;
  plan.validate();

  const std::vector<SweepRecord> records = run_sweep(plan, tmpl, o.threads);
  std::ofstream file;
  if (!o.out_path.empty()) {
    file.open(o.out_path, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot open '" + o.out_path + "' for writing");
  }
  std::ostream& sink = o.out_path.empty() ? out : file;
  if (plan.format == OutputFormat::Csv) {
    write_csv(sink, plan, tmpl, records);
  } else {
    write_json_lines(sink, records);
  }
  for (const SweepRecord& r : records) {
    if (!r.converged) return kExitNumerical;
  }
  return kExitOk;
}

int run_oracle_check(const std::string& config_path, double samples, std::uint64_t seed,
                     int n_configs, std::ostream& out) {
  ExperimentConfig base = base_config(config_path);
  McSpec spec;
  spec.samples = static_cast<std::int64_t>(samples);
  spec.seed = seed;
  const auto rows = oracle_check(base, spec, n_configs);
  out << "# qionize " << kVersion << " oracle-check prng=" << kPrngAlgorithm
      << " samples=" << spec.samples << " seed=" << seed << '\n';
  out << "L_um,omega_p_um,R_reduced,R_mc,sigma_mc,rel_diff,tolerance,pass\n";
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.pass;
    out << fmt::format("{:.6g},{:.6g},{:.9g},{:.9g},{:.3g},{:.3e},{:.3g},{}\n",
                       r.cfg.crystal_length_um, r.cfg.pump_waist_um, r.R_reduced, r.R_mc,
                       r.sigma_mc, r.R_reduced / r.R_mc - 1.0, r.tolerance, r.pass ? 1 : 0);
  }
  return all ? kExitOk : kExitNumerical;
}

int run_presets(std::ostream& out) {
  for (const Preset& p : builtin_presets()) out << p.name << "  " << p.description << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entangled-pair two-photon ionization enhancement calculator", "qionize"};
  app.require_subcommand(1);

  PointOptions ratio_opts;
  auto* ratio = app.add_subcommand("ratio", "enhancement ratio R at one point");
  add_point_options(ratio, ratio_opts);

  PointOptions flux_opts;
  auto* flux = app.add_subcommand("flux", "photon flux and normalization for both amplitudes");
  add_point_options(flux, flux_opts);

  PointOptions grid_opts;
  std::string grid_kind = "entangled";
  int grid_n = 101;
  std::string grid_out;
  auto* grid = app.add_subcommand("amplitude-grid", "dump the reduced amplitude on a grid");
  add_point_options(grid, grid_opts);
  grid->add_option("--kind", grid_kind, "entangled or separable");
  grid->add_option("--n", grid_n, "grid points per axis");
  grid->add_option("--out", grid_out, "output file (default stdout)");

  SweepOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("--preset", sweep_opts.preset, "fig2a, fig2b or fig2c");
  sweep->add_option("--config", sweep_opts.config_path, "template config file");
  sweep->add_option("--axis1", sweep_opts.axis1, "name=v1,v2,... (L or omega_p)");
  sweep->add_option("--axis2", sweep_opts.axis2, "name=v1,v2,...");
  sweep->add_option("--channels", sweep_opts.channels, "channel names")->delimiter(',');
  sweep->add_option("--regimes", sweep_opts.regimes, "exact, paraxial")->delimiter(',');
  sweep->add_option("--kernel", sweep_opts.kernels, "channel=kernel-file");
  sweep->add_option("--out", sweep_opts.out_path, "output file (default stdout)");
  sweep->add_option("--format", sweep_opts.format, "csv or json");
  sweep->add_option("--threads", sweep_opts.threads, "worker threads (default: cores)");

  std::string oracle_config;
  double oracle_samples = 1e7;
  std::uint64_t oracle_seed = 1;
  int oracle_configs = 10;
  auto* oracle = app.add_subcommand("oracle-check", "cross-validate against 6-D Monte Carlo");
  oracle->add_option("--config", oracle_config, "base config file");
  oracle->add_option("--samples", oracle_samples, "Monte Carlo samples per config");
  oracle->add_option("--seed", oracle_seed, "Monte Carlo seed");
  oracle->add_option("--configs", oracle_configs, "number of random configs");

  auto* presets = app.add_subcommand("presets", "list built-in figure presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qionize: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*ratio) return run_ratio(ratio_opts, out);
    if (*flux) return run_flux(flux_opts, out);
    if (*grid) return run_amplitude_grid(grid_opts, grid_kind, grid_n, grid_out, out);
    if (*sweep) return run_sweep_command(sweep_opts, out);
    if (*oracle) {
      return run_oracle_check(oracle_config, oracle_samples, oracle_seed, oracle_configs, out);
    }
    if (*presets) return run_presets(out);
  } catch (const NumericalError& e) {
    err << "qionize: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "qionize: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "qionize: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "qionize: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace qionize
