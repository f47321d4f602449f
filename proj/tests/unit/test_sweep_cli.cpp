#include <doctest.h>

#include <qionize/cli.hpp>
#include <qionize/observables.hpp>
#include <qionize/sweep.hpp>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace qionize;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "qionize");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

std::string csv_of(const SweepPlan& plan, const ExperimentConfig& tmpl, unsigned threads) {
  std::ostringstream s;
  write_csv(s, plan, tmpl, run_sweep(plan, tmpl, threads));
  return s.str();
}

}  // namespace

TEST_CASE("identity plan") {
  SweepPlan plan;
  plan.axis1 = {"L", {1e-9}};
  plan.axis2 = SweepAxis{"omega_p", {3.0, 10.0, 50.0}};
  plan.channels = {find_channel("dipole")};
  plan.regimes = {Regime::Exact, Regime::Paraxial};
  const auto records = run_sweep(plan, ExperimentConfig{}, 2);
  REQUIRE(records.size() == 6);
  for (const auto& r : records) {
    CHECK(r.converged);
    CHECK(r.error.empty());
    CHECK(std::abs(r.R - 1.0) <= 1e-3);
  }
  // Grid order: regimes outer, then axis1, then axis2.
  CHECK(records[0].regime == Regime::Exact);
  CHECK(records[3].regime == Regime::Paraxial);
  CHECK(records[1].cfg.pump_waist_um == 10.0);
}

TEST_CASE("record equals a fresh single-point evaluation") {
  SweepPlan plan;
  plan.axis1 = {"omega_p", {3.0, 20.0}};
  plan.axis2 = SweepAxis{"L", {0.5, 12.0}};
  plan.channels = {find_channel("dipole")};
  plan.regimes = {Regime::Exact};
  for (const auto& r : run_sweep(plan, ExperimentConfig{}, 2)) {
    const auto fresh = enhancement_ratio(r.cfg, find_channel("dipole"));
    CHECK(r.R == fresh.R);
    CHECK(r.f_ent == fresh.f_ent);
    CHECK(r.C_ratio == fresh.C_ratio());
  }
}

TEST_CASE("output is byte-stable across runs and thread counts") {
  SweepPlan plan;
  plan.axis1 = {"L", {0.1, 1.0, 10.0}};
  plan.axis2 = SweepAxis{"omega_p", {3.0, 30.0}};
  plan.channels = {find_channel("dipole")};
  plan.regimes = {Regime::Exact, Regime::Paraxial};
  const auto a = csv_of(plan, ExperimentConfig{}, 1);
  const auto b = csv_of(plan, ExperimentConfig{}, 3);
  const auto c = csv_of(plan, ExperimentConfig{}, 1);
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("csv layout") {
  SweepPlan plan;
  plan.axis1 = {"L", {0.5}};
  plan.channels = {find_channel("dipole")};
  plan.regimes = {Regime::Exact};
  plan.notes = {"hello"};
  const auto text = csv_of(plan, ExperimentConfig{}, 1);
  const auto ls = lines(text);
  std::size_t i = 0;
  while (i < ls.size() && ls[i].rfind("#", 0) == 0) ++i;
  REQUIRE(i + 2 == ls.size());
  CHECK(ls[i] == kCsvHeader);
  CHECK(text.find("# note: hello") != std::string::npos);
  CHECK(text.find(std::string(kVersion)) != std::string::npos);
  CHECK(ls[i + 1].rfind("0.5,50,dipole,exact,", 0) == 0);
  CHECK(ls[i + 1].substr(ls[i + 1].size() - 2) == ",1");
}

TEST_CASE("json lines") {
  SweepPlan plan;
  plan.axis1 = {"L", {0.5, 2.0}};
  plan.channels = {find_channel("dipole")};
  plan.regimes = {Regime::Paraxial};
  std::ostringstream s;
  write_json_lines(s, run_sweep(plan, ExperimentConfig{}, 1));
  const auto ls = lines(s.str());
  REQUIRE(ls.size() == 2);
  const auto j = nlohmann::json::parse(ls[1]);
  CHECK(j["L_um"] == 2.0);
  CHECK(j["regime"] == "paraxial");
  CHECK(j["converged"] == true);
}

TEST_CASE("failed points are recorded, not thrown") {
  SweepPlan plan;
  plan.axis1 = {"L", {1.0}};
  plan.channels = {find_channel("quadrupole")};
  plan.regimes = {Regime::Exact};
  const auto records = run_sweep(plan, ExperimentConfig{}, 1);
  REQUIRE(records.size() == 1);
  CHECK_FALSE(records[0].converged);
  CHECK_FALSE(records[0].error.empty());
  CHECK(std::isnan(records[0].R));
  CHECK(record_to_json(records[0]).find("\"R\":null") != std::string::npos);
}

TEST_CASE("plan validation") {
  SweepPlan plan;
  plan.axis1 = {"L", {1.0, 0.5}};
  plan.channels = {find_channel("dipole")};
  plan.regimes = {Regime::Exact};
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  plan.axis1 = {"L", {-1.0}};
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  plan.axis1 = {"width", {1.0}};
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  plan.axis1 = {"L", {1.0}};
  plan.axis2 = SweepAxis{"L", {2.0}};
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  plan.axis2.reset();
  plan.regimes.clear();
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
}

TEST_CASE("axis parsing and spacing") {
  const auto a = parse_axis("omega_p=1,2.5,1e1");
  CHECK(a.name == "omega_p");
  CHECK(a.values == std::vector<double>{1.0, 2.5, 10.0});
  CHECK_THROWS(parse_axis("L"));
  CHECK_THROWS(parse_axis("L=1,x"));
  const auto v = log_spaced(0.01, 100.0, 5);
  REQUIRE(v.size() == 5);
  CHECK(v.front() == 0.01);
  CHECK(v.back() == 100.0);
  CHECK(v[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("presets") {
  const auto presets = builtin_presets();
  REQUIRE(presets.size() == 3);
  const auto a = find_preset("fig2a");
  CHECK(a.plan.regimes.size() == 2);
  CHECK(a.plan.axis1.values.front() == 1.0);
  CHECK(a.plan.axis1.values.back() == 100.0);
  CHECK(a.plan.axis2->values.front() == 0.01);
  CHECK(a.plan.axis2->values.back() == 100.0);
  const auto b = find_preset("fig2b");
  CHECK(b.plan.axis1.values == std::vector<double>{3.0, 10.0, 50.0});
  const auto c = find_preset("fig2c");
  CHECK(c.tmpl.crystal_length_um == 1.0);
  CHECK_THROWS_AS(find_preset("fig9"), std::invalid_argument);
}

TEST_CASE("fig2b shape") {
  auto p = find_preset("fig2b");
  const auto records = run_sweep(p.plan, p.tmpl, 0);
  const std::size_t n = p.plan.axis2->values.size();
  REQUIRE(records.size() == 3 * n);
  for (std::size_t w = 0; w < 3; ++w) {
    std::vector<double> R;
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(records[w * n + i].converged);
      R.push_back(records[w * n + i].R);
    }
    // Unimodal in L: rises, then falls.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i) if (R[i] > R[peak]) peak = i;
    for (std::size_t i = 1; i <= peak; ++i) CHECK(R[i] >= R[i - 1] - 1e-9);
    for (std::size_t i = peak + 1; i < n; ++i) CHECK(R[i] <= R[i - 1] + 1e-9);
    CHECK(R.back() < R[peak]);
  }
}

TEST_CASE("cli: presets and help") {
  const auto r = run({"presets"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("fig2a") != std::string::npos);
  CHECK(r.out.find("fig2c") != std::string::npos);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
}

TEST_CASE("cli: ratio") {
  const auto r = run({"ratio", "--L", "1e-9", "--omega-p", "3"});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["R"].get<double>() - 1.0) < 1e-6);
  CHECK(j["converged"] == true);

  const auto cfg = run({"ratio", "--config", QIONIZE_DATA_DIR "/na_dipole.cfg"});
  REQUIRE(cfg.code == kExitOk);
  const double R = nlohmann::json::parse(cfg.out)["R"].get<double>();
  ExperimentConfig e = load_config(QIONIZE_DATA_DIR "/na_dipole.cfg");
  CHECK(R == enhancement_ratio(e, find_channel("dipole")).R);
}

TEST_CASE("cli: exit codes") {
  CHECK(run({"ratio", "--L", "-1"}).code == kExitUsage);
  CHECK(run({"ratio", "--regime", "sideways"}).code == kExitUsage);
  CHECK(run({"ratio", "--config", "/nonexistent.cfg"}).code == kExitUsage);
  CHECK(run({"ratio", "--channel", "quadrupole"}).code == kExitUsage);
  CHECK(run({"sweep", "--axis1", "L=2,1"}).code == kExitUsage);
  CHECK(run({"sweep"}).code == kExitUsage);

  const auto tmp = std::filesystem::temp_directory_path() / "qionize_tight.cfg";
  {
    std::ofstream f(tmp);
    f << "crystal_length_um = 100\npump_waist_um = 3\nquadrature.rel_tol = 1e-13\n"
         "quadrature.max_evals = 1000\n";
  }
  const auto r = run({"ratio", "--config", tmp.string()});
  CHECK(r.code == kExitNumerical);
  std::filesystem::remove(tmp);
}

TEST_CASE("cli: sweep to file") {
  const auto path = std::filesystem::temp_directory_path() / "qionize_sweep.csv";
  const auto r = run({"sweep", "--axis1", "L=0.1,1", "--regimes", "exact,paraxial", "--threads",
                      "2", "--out", path.string()});
  REQUIRE(r.code == kExitOk);
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  const auto ls = lines(s.str());
  std::size_t rows = 0;
  bool header = false;
  for (const auto& l : ls) {
    if (l == kCsvHeader) header = true;
    else if (!l.empty() && l[0] != '#') ++rows;
  }
  CHECK(header);
  CHECK(rows == 4);
  std::filesystem::remove(path);
}

TEST_CASE("cli: amplitude grid and flux") {
  const auto g = run({"amplitude-grid", "--n", "5", "--L", "2"});
  REQUIRE(g.code == kExitOk);
  CHECK(lines(g.out).size() >= 25);
  const auto f = run({"flux", "--L", "2"});
  REQUIRE(f.code == kExitOk);
  const auto j = nlohmann::json::parse(f.out);
  CHECK(j.contains("entangled"));
}
