// Run configuration, snapshot files, CSV artifacts and run orchestration.
//
// Config: sectioned key = value text; '#' starts a comment. Sections are
// [domain], [params], [run], [initial], [hext], [output]. Unknown sections or
// keys are errors.
//
// Snapshot (*.mes, little endian):
//   char[4]  "MES1"
//   uint32   0x01020304 endianness tag
//   int32    n
//   float64  l
//   float64  t
//   uint32   length of the field list, then the list itself: "v:2,F:4,M:3"
//   float64  payload[9][n][n]: physical-grid values per component in the
//            listed order; within a component the row index is y and x runs
//            fastest (value at x = i l/n, y = j l/n stored at j*n + i).
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "magel/coupler.hpp"
#include "magel/diagnostics.hpp"

namespace magel {

struct RunConfig {
  Domain domain{32};
  ModelParams params{};

  struct Run {
    double dt = 1e-3;
    double T = 1.0;
    CouplingMode mode = CouplingMode::fixed_point;
    int m = 24;
    double tau = 0.05;
    double fp_tol = 1e-10;
    int fp_max_iter = 50;
    double tau_min = 1e-3;
    ProductDealiasing dealias = ProductDealiasing::padding;
    std::string llg_form = "auto";  // auto | cross | expanded
    bool renormalize_M = false;
    double drift_limit = 1e-6;
    DriftAction drift_action = DriftAction::warn;
    int output_stride = 10;
  } run;

  struct Initial {
    std::string preset = "generic_small";  // zero | taylor_green | generic_small | file
    std::uint64_t seed = 1;
    double amplitude = 1.0;  // taylor_green velocity amplitude
    double kinetic = 0.05;
    double m_perturbation = 0.1;
    double f_perturbation = 0.05;
    std::string file;  // snapshot path for preset = file
  } initial;

  ExternalField hext{};

  struct Output {
    std::string directory = "run";
    bool snapshots = true;
  } output;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  FixedPointConfig fixed_point() const;
  RunOptions run_options() const;
  Problem problem() const;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig parse_config(const std::filesystem::path& path);
/// Every key with its effective value; parse_config_text(echo_config(c)) == c.
std::string echo_config(const RunConfig& c);

SimState initial_state(const RunConfig& c, const Problem& pb);

/// Physical-grid content of one snapshot file.
struct Snapshot {
  int n = 0;
  double l = 0.0;
  double t = 0.0;
  RealGridField v, F, M;  // 2, 4 and 3 grids of n x n

  friend bool operator==(const Snapshot& a, const Snapshot& b);
};

constexpr const char* kSnapshotFields = "v:2,F:4,M:3";

Snapshot snapshot_of(const SimState& s, const VelocityBasis& basis);
/// Back to coefficients (velocity projected on the basis); accumulators are zero.
SimState state_of(const Snapshot& snap, const VelocityBasis& basis);

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Documented column list of energy.csv.
const std::vector<std::string>& energy_csv_columns();
const std::vector<std::string>& iteration_csv_columns();
const std::vector<std::string>& monitor_csv_columns();

void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergyRow>& rows);
std::vector<EnergyRow> read_energy_csv(const std::filesystem::path& path);
void write_iterations_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& log);
/// t, a-priori left-hand side, int |grad M|^2, int |Lap M|^2.
void write_monitor_csv(const std::filesystem::path& path, const std::vector<EnergyRow>& rows);
/// Restores grad_m_sq and lap_m_sq of rows read from energy.csv.
void merge_monitor_csv(const std::filesystem::path& path, std::vector<EnergyRow>& rows);

std::string snapshot_name(int index);

struct SimulationSummary {
  bool completed = false;
  std::string failure;
  double failure_time = 0.0;
  double final_time = 0.0;
  int rows = 0;
  int snapshots = 0;
  double ied = 0.0;
  double max_balance_residual = 0.0;
  double max_unit_drift = 0.0;
  int windows = 0;
  int tau_halvings = 0;

  std::string line() const;
};

/// Runs the configured simulation and writes the run directory:
/// config.ini (effective config), energy.csv, monitors.csv, iterations.csv,
/// snapshots/snap_NNNNNN.mes and summary.txt.
SimulationSummary simulate(const RunConfig& c, std::ostream& log);

/// Contents of a finished run directory.
struct RunDirectory {
  RunConfig config;
  std::vector<EnergyRow> rows;
  std::vector<std::filesystem::path> snapshots;  // sorted by index
};

RunDirectory read_run_directory(const std::filesystem::path& dir);

}  // namespace magel
