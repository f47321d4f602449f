#include "qionize/sweep.hpp"

#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <json.hpp>
#include <stdexcept>
#include <thread>

#include "qionize/oracle.hpp"

namespace qionize {

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::JsonLines;
  throw std::invalid_argument("format: expected csv or json, got '" + std::string(text) + "'");
}

namespace {

bool known_axis(const std::string& name) { return name == "L" || name == "omega_p"; }

void check_axis(const SweepAxis& axis) {
  if (!known_axis(axis.name)) {
    throw std::invalid_argument("sweep axis '" + axis.name + "' unknown (expected L or omega_p)");
  }
  if (axis.values.empty()) throw std::invalid_argument("sweep axis '" + axis.name + "' is empty");
  for (std::size_t i = 0; i < axis.values.size(); ++i) {
    if (!(axis.values[i] > 0.0) || !std::isfinite(axis.values[i])) {
      throw std::invalid_argument("sweep axis '" + axis.name + "' values must be positive");
    }
    if (i > 0 && !(axis.values[i] > axis.values[i - 1])) {
      throw std::invalid_argument("sweep axis '" + axis.name +
                                  "' values must be strictly ascending");
    }
  }
}

void apply(ExperimentConfig& cfg, const std::string& name, double value) {
  if (name == "L") {
    cfg.crystal_length_um = value;
  } else {
    cfg.pump_waist_um = value;
  }
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

void SweepPlan::validate() const {
  check_axis(axis1);
  if (axis2) {
    check_axis(*axis2);
    if (axis2->name == axis1.name) throw std::invalid_argument("sweep axes must be distinct");
  }
  if (channels.empty()) throw std::invalid_argument("sweep needs at least one channel");
  if (regimes.empty()) throw std::invalid_argument("sweep needs at least one regime");
}

SweepAxis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw std::invalid_argument("axis must look like name=v1,v2,...");
  }
  SweepAxis axis{std::string(text.substr(0, eq)), {}};
  std::string_view rest = text.substr(eq + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string item(rest.substr(0, comma));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw std::invalid_argument("axis '" + axis.name + "': bad value '" + item + "'");
    }
    axis.values.push_back(v);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  check_axis(axis);
  return axis;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (n == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

SweepRecord evaluate_point(const ExperimentConfig& cfg, const Channel& channel) {
  SweepRecord rec;
  rec.cfg = cfg;
  rec.channel = channel.name;
  rec.regime = cfg.regime;
  rec.R = rec.f_ent = rec.f_sep = rec.C_ratio = rec.err_R = std::nan("");
  try {
    const RatioResult r = assemble_enhancement_ratio(cfg, channel);
    rec.kernel_label = r.kernel_label;
    rec.R = r.R;
    rec.f_ent = r.f_ent;
    rec.f_sep = r.f_sep;
    rec.C_ratio = r.C_ratio();
    rec.err_R = r.err_R;
    rec.converged = r.converged();
    if (!rec.converged) rec.error = "quadrature did not converge";
  } catch (const std::exception& e) {
    rec.converged = false;
    rec.error = e.what();
  }
  return rec;
}

std::vector<SweepRecord> run_sweep(const SweepPlan& plan, const ExperimentConfig& tmpl,
                                   unsigned threads) {
  plan.validate();
  tmpl.validate();
  struct Point {
    ExperimentConfig cfg;
    const Channel* channel;
  };
  std::vector<Point> points;
  const std::vector<double> inner = plan.axis2 ? plan.axis2->values : std::vector<double>{0.0};
  for (const Channel& ch : plan.channels) {
    for (Regime regime : plan.regimes) {
      for (double a : plan.axis1.values) {
        for (double b : inner) {
          ExperimentConfig cfg = with_channel(tmpl, ch);
          cfg.regime = regime;
          apply(cfg, plan.axis1.name, a);
          if (plan.axis2) apply(cfg, plan.axis2->name, b);
          points.push_back({cfg, &ch});
        }
      }
    }
  }

  std::vector<SweepRecord> records(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      records[i] = evaluate_point(points[i].cfg, *points[i].channel);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads ? threads : default_thread_count(),
                                                     static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return records;
}

std::vector<Preset> builtin_presets() {
  std::vector<Preset> presets;
  const Channel& dipole = find_channel("dipole");
  const std::string paraxial_note =
      "paraxial regime: second-order dkz expansion and obliquity k_z/k replaced by 1";

  {
    Preset p;
    p.name = "fig2a";
    p.description =
        "dipole R over pump waist [1,100] um x crystal length [0.01,100] um, both regimes";
    p.plan.name = p.name;
    p.plan.axis1 = {"omega_p", log_spaced(1.0, 100.0, 13)};
    p.plan.axis2 = SweepAxis{"L", log_spaced(0.01, 100.0, 25)};
    p.plan.channels = {dipole};
    p.plan.regimes = {Regime::Paraxial, Regime::Exact};
    p.plan.notes = {"axis ranges chosen: omega_p log-spaced [1,100] um, L log-spaced [0.01,100] um",
                    paraxial_note};
    presets.push_back(p);
  }
  {
    Preset p;
    p.name = "fig2b";
    p.description = "dipole R versus crystal length [0.01,100] um for pump waists 3, 10, 50 um";
    p.plan.name = p.name;
    p.plan.axis1 = {"omega_p", {3.0, 10.0, 50.0}};
    p.plan.axis2 = SweepAxis{"L", log_spaced(0.01, 100.0, 40)};
    p.plan.channels = {dipole};
    p.plan.regimes = {Regime::Exact};
    p.plan.notes = {"L log-spaced, 40 points in [0.01,100] um"};
    presets.push_back(p);
  }
  {
    Preset p;
    p.name = "fig2c";
    p.description = "dipole R versus pump waist [1,100] um at L = 1 um";
    p.plan.name = p.name;
    p.plan.axis1 = {"omega_p", log_spaced(1.0, 100.0, 40)};
    p.plan.channels = {dipole};
    p.plan.regimes = {Regime::Exact};
    p.tmpl.crystal_length_um = 1.0;
    p.plan.notes = {"crystal length fixed at the assumed value L = 1 um",
                    "omega_p log-spaced, 40 points in [1,100] um"};
    presets.push_back(p);
  }
  return presets;
}

Preset find_preset(std::string_view name) {
  for (Preset& p : builtin_presets()) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) +
                              "' (expected fig2a, fig2b or fig2c)");
}

void write_csv(std::ostream& out, const SweepPlan& plan, const ExperimentConfig& tmpl,
               const std::vector<SweepRecord>& records) {
  out << "# qionize " << kVersion << " sweep " << plan.name << '\n';
  out << "# conventions: units=um,1/um; reduction=reduced2d; "
         "paraxial_dkz=second_order_taylor; paraxial_obliquity=2; V=C; "
         "C_ratio excludes common factor "
      << kNormalizationFactor << '\n';
  out << fmt::format(
      "# template: pump_waist_y_um={} filter_omega_um={} filter_omega_y_um={} "
      "quadrature={} rel_tol={} abs_tol={} max_evals={}\n",
      tmpl.pump_waist_y_um ? num(*tmpl.pump_waist_y_um) : "omega_p",
      num(tmpl.filter_omega_um), num(tmpl.filter_omega_y_um), to_string(tmpl.quadrature.method),
      num(tmpl.quadrature.rel_tol), num(tmpl.quadrature.abs_tol), tmpl.quadrature.max_evals);
  for (const std::string& note : plan.notes) out << "# note: " << note << '\n';
  for (const Channel& ch : plan.channels) {
    out << "# channel: " << ch.name << " energy_ev=" << num(ch.transition_energy_ev)
        << " order=" << ch.multipole_order << " parity=" << to_string(ch.parity)
        << " kernel=" << (ch.kernel ? "model_kernel:" + ch.kernel->label() : "none") << '\n';
  }
  out << kCsvHeader << '\n';
  for (const SweepRecord& r : records) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", num(r.cfg.crystal_length_um),
                       num(r.cfg.pump_waist_um), r.channel, to_string(r.regime), num(r.R),
                       num(r.f_ent), num(r.f_sep), num(r.C_ratio), num(r.err_R),
                       r.converged ? 1 : 0);
  }
}

std::string record_to_json(const SweepRecord& r) {
  nlohmann::ordered_json j;
  auto finite_or_null = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  j["L_um"] = r.cfg.crystal_length_um;
  j["omega_p_um"] = r.cfg.pump_waist_um;
  j["channel"] = r.channel;
  j["regime"] = to_string(r.regime);
  j["R"] = finite_or_null(r.R);
  j["f_ent"] = finite_or_null(r.f_ent);
  j["f_sep"] = finite_or_null(r.f_sep);
  j["C_ratio"] = finite_or_null(r.C_ratio);
  j["err_R"] = finite_or_null(r.err_R);
  j["converged"] = r.converged;
  j["channel_energy_ev"] = r.cfg.channel_energy_ev;
  j["kernel"] = r.kernel_label;
  if (!r.error.empty()) j["error"] = r.error;
  return j.dump();
}

void write_json_lines(std::ostream& out, const std::vector<SweepRecord>& records) {
  for (const SweepRecord& r : records) out << record_to_json(r) << '\n';
}

}  // namespace qionize
