// Command-line front end. Exit codes: 0 pass, 1 fail, 2 usage or input error.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "magel/convergence.hpp"
#include "magel/io.hpp"
#include "magel/weakform.hpp"

namespace fs = std::filesystem;
using namespace magel;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

int cmd_simulate(const std::string& config_path, const std::string& output_override) {
  RunConfig c = parse_config(config_path);
  if (!output_override.empty()) c.output.directory = output_override;
  const SimulationSummary s = simulate(c, std::cerr);
  std::cout << s.line() << '\n';
  return s.completed ? kPass : kFail;
}

double measured_constant(const Domain& d) {
  const RatioReport r = inequality_ratio_report(inequality_sample(d, 100, 17));
  return r.max_ratio[static_cast<size_t>(Inequality::gradient_l4)];
}

int cmd_diagnose(const std::string& dir) {
  RunDirectory rd = read_run_directory(dir);
  if (rd.rows.empty()) throw IoError(dir + ": energy.csv has no rows");
  const Problem pb = rd.config.problem();
  const SimState s0 =
      rd.snapshots.empty() ? initial_state(rd.config, pb) : state_of(read_snapshot(rd.snapshots.front()), pb.basis);
  const IedReport iedr = ied(s0, pb, rd.config.run.T);
  const double scale = std::max(iedr.total, 1.0);

  std::vector<EnergyRow> rows = rd.rows;
  const double balance = energy_balance_residual(rows);
  double worst_increase = 0.0, drift = 0.0, div = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) worst_increase = std::max(worst_increase, rows[i].total - rows[i - 1].total);
    drift = std::max(drift, rows[i].m_drift);
    div = std::max(div, rows[i].div_norm);
  }
  const AprioriReport ap = apriori_report(rows, iedr.total, 1e-6, measured_constant(pb.domain()));

  const bool balance_ok = balance <= 1e-6 * scale;
  const bool monotone_ok = !rd.config.hext.is_zero() || worst_increase <= 1e-8;
  const bool apriori_ok = !ap.any_exceeds;
  const bool drift_ok = drift <= rd.config.run.drift_limit;
  const double sample_spacing = rd.config.run.output_stride * rd.config.run.dt;
  const bool complete = rd.config.run.T - rows.back().t < sample_spacing * (1.0 - 1e-9);
  std::cout << std::setprecision(6);
  std::cout << iedr.describe() << '\n';
  std::cout << "balance residual max " << balance << " (relative " << balance / scale << ")\n";
  std::cout << "largest energy increase " << worst_increase
            << (rd.config.hext.is_zero() ? "" : " (external field present, not checked)") << '\n';
  std::cout << "a-priori max LHS " << ap.max_lhs << " vs IED " << ap.ied
            << "; int ||Lap M||^2 = " << (ap.rows.empty() ? 0.0 : ap.rows.back().lap_m_sq_integral) << '\n';
  std::cout << "measured constant " << ap.measured_constant << ", constant * IED = " << ap.smallness << '\n';
  std::cout << "max ||M|-1| " << drift << ", max ||div v||_inf " << div << '\n';
  const bool ok = complete && balance_ok && monotone_ok && apriori_ok && drift_ok;
  std::cout << "diagnose rows=" << rows.size() << " complete=" << (complete ? "yes" : "no")
            << " balance=" << (balance_ok ? "pass" : "fail")
            << " monotone=" << (monotone_ok ? "pass" : "fail") << " apriori=" << (apriori_ok ? "pass" : "fail")
            << " drift=" << (drift_ok ? "pass" : "fail") << " status=" << (ok ? "pass" : "fail") << '\n';
  return ok ? kPass : kFail;
}

int cmd_verify_weakform(const std::string& dir, int tests, std::uint64_t seed, double threshold) {
  const RunDirectory rd = read_run_directory(dir);
  if (rd.snapshots.size() < 2) throw IoError(dir + ": need at least two snapshots");
  const Problem pb = rd.config.problem();
  WeakFormAccumulator acc(pb, make_battery(pb, tests, seed));
  for (const auto& path : rd.snapshots) acc.add(state_of(read_snapshot(path), pb.basis));
  const WeakFormReport rep = acc.finish();

  const fs::path csv = fs::path(dir) / "weakform.csv";
  std::ofstream os(csv);
  if (!os) throw IoError(csv.string() + ": cannot open for writing");
  os << "equation,test,profile,residual\n" << std::setprecision(17);
  for (const auto& r : rep.residuals)
    os << to_string(r.equation) << ',' << r.test << ',' << to_string(r.profile) << ',' << r.value << '\n';

  std::cout << std::setprecision(4);
  std::cout << "equation        max residual   over " << tests << " tests x 3 profiles, " << rep.samples
            << " samples\n";
  for (WeakEquation e : {WeakEquation::momentum, WeakEquation::deformation, WeakEquation::magnetization})
    std::cout << std::left << std::setw(16) << to_string(e) << std::scientific << rep.max_of(e) << std::defaultfloat
              << '\n';
  const bool ok = rep.max() <= threshold;
  std::cout << "verify-weakform max=" << rep.max() << " threshold=" << threshold << " seed=" << seed
            << " status=" << (ok ? "pass" : "fail") << '\n';
  return ok ? kPass : kFail;
}

int cmd_convergence(const std::string& name, const std::string& csv_path) {
  const ConvergenceStudy s = run_convergence(parse_convergence_case(name));
  std::cout << std::setprecision(6);
  for (size_t i = 0; i < s.dts.size(); ++i)
    std::cout << "dt=" << s.dts[i] << (s.self_convergence ? " difference=" : " error=") << s.errors[i] << '\n';
  if (!s.note.empty()) std::cout << s.note << '\n';
  if (!csv_path.empty()) {
    std::ofstream os(csv_path);
    if (!os) throw IoError(csv_path + ": cannot open for writing");
    os << "dt,error\n" << std::setprecision(17);
    for (size_t i = 0; i < s.dts.size(); ++i) os << s.dts[i] << ',' << s.errors[i] << '\n';
  }
  std::cout << s.line() << '\n';
  return s.passed() ? kPass : kFail;
}

int cmd_ied(const std::string& config_path) {
  const RunConfig c = parse_config(config_path);
  const Problem pb = c.problem();
  const IedReport r = ied(initial_state(c, pb), pb, c.run.T);
  std::cout << std::setprecision(10) << r.describe() << '\n';
  std::cout << "ied value=" << r.total << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magel: 2D magnetoelastic spectral Galerkin simulator"};
  app.require_subcommand(1);

  std::string config, output, rundir, case_name, csv;
  int tests = 20;
  std::uint64_t seed = 2024;
  double threshold = 1e-5;

  auto* sim = app.add_subcommand("simulate", "run a simulation and write its run directory");
  sim->add_option("config", config, "config file")->required();
  sim->add_option("-o,--output", output, "override [output] directory");

  auto* diag = app.add_subcommand("diagnose", "check the energy ledger and monitors of a run directory");
  diag->add_option("rundir", rundir, "run directory")->required();

  auto* weak = app.add_subcommand("verify-weakform", "weak-form residual certificate of a run directory");
  weak->add_option("rundir", rundir, "run directory")->required();
  weak->add_option("--tests", tests, "spatial test fields per equation")->check(CLI::PositiveNumber);
  weak->add_option("--seed", seed, "test battery seed");
  weak->add_option("--threshold", threshold, "pass threshold on normalized residuals")->check(CLI::PositiveNumber);

  auto* conv = app.add_subcommand("convergence", "time-step refinement study");
  conv->add_option("--case", case_name, "taylor_green | heat_F | precession | m_drift")
      ->required()
      ->check(CLI::IsMember({"taylor_green", "heat_F", "precession", "m_drift"}));
  conv->add_option("--csv", csv, "write dt,error rows to this file");

  auto* iedc = app.add_subcommand("ied", "initial energy and field smallness quantity of a config");
  iedc->add_option("config", config, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config, output);
    if (diag->parsed()) return cmd_diagnose(rundir);
    if (weak->parsed()) return cmd_verify_weakform(rundir, tests, seed, threshold);
    if (conv->parsed()) return cmd_convergence(case_name, csv);
    if (iedc->parsed()) return cmd_ied(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
