#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "magel/initial.hpp"
#include "magel/io.hpp"

using namespace magel;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("magel_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config takes defaults") {
  const RunConfig c = parse_config_text("[domain]\nn = 16\n[run]\nT = 0.5\n");
  CHECK(c.domain.n == 16);
  CHECK(c.run.T == 0.5);
  CHECK(c.run.dt == 1e-3);
  CHECK(c.run.tau == 0.05);
  CHECK(c.run.fp_tol == 1e-10);
  CHECK(c.run.mode == CouplingMode::fixed_point);
  CHECK(c.params.nu == 0.1);
  CHECK(c.params.elastic.c_e == 0.01);
  CHECK(c.hext.preset == HextPreset::zero);
  CHECK(c.initial.preset == "generic_small");
  CHECK(c.output.directory == "run");
}

TEST_CASE("config errors name the offending key and line") {
  CHECK(error_of("[params]\nnu = -1\n").find("nu") != std::string::npos);
  CHECK(error_of("[params]\nnu = fast\n").find("cfg:2") != std::string::npos);
  CHECK(error_of("[params]\nviscosity = 1\n").find("viscosity") != std::string::npos);
  CHECK(error_of("[solver]\n").find("solver") != std::string::npos);
  CHECK(error_of("[run]\ndt = 0.1\ndt = 0.2\n").find("duplicate") != std::string::npos);
  CHECK(error_of("n = 16\n").find("before any section") != std::string::npos);
  CHECK(error_of("[domain]\nn = 12\n").find("power of two") != std::string::npos);
  CHECK(error_of("[run]\nT = 0.0015\n").find("multiple of dt") != std::string::npos);
  CHECK(error_of("[run]\nllg_form = expanded\n[params]\ngamma = 2\n").find("llg_form") != std::string::npos);
  CHECK(error_of("[initial]\npreset = file\n").find("file") != std::string::npos);
  CHECK(error_of("[hext]\ndirection = 1,2\n").find("direction") != std::string::npos);
  CHECK(error_of("[domain]\nn = 8\n[run]\nm = 500\n").find("m = 500") != std::string::npos);
  CHECK_THROWS_AS(parse_config("/nonexistent/magel.ini"), ConfigError);
}

TEST_CASE("config echo round trip") {
  const std::string text =
      "# comment line\n[domain]\nn = 16\nl = 3.5\n[params]\nnu = 0.037\ngamma = 0.5   # trailing comment\n"
      "[run]\ndt = 0.002\nT = 0.1\nmode = monolithic\ndealias_rule = truncation\nrenormalize_M = true\n"
      "[initial]\npreset = taylor_green\nseed = 42\n"
      "[hext]\npreset = spatial_gradient\namplitude = 0.3\ndirection = 0,1,0\nwavevector = 2,-1\n"
      "[output]\ndirectory = out dir\nsnapshots = false\n";
  const RunConfig a = parse_config_text(text);
  const std::string echo = echo_config(a);
  const RunConfig b = parse_config_text(echo);
  CHECK(a == b);
  CHECK(echo_config(b) == echo);
  CHECK(b.domain.l == 3.5);
  CHECK(b.params.nu == 0.037);
  CHECK(b.run.dealias == ProductDealiasing::truncation);
  CHECK(b.hext.wavevector == Eigen::Vector2i(2, -1));
  CHECK(b.output.directory == "out dir");
  CHECK_FALSE(b.output.snapshots);
  RunConfig c = b;
  c.params.nu = 0.038;
  CHECK_FALSE(c == b);
}

TEST_CASE("snapshots") {
  const fs::path dir = scratch("snap");
  const Problem pb = Problem::build(Domain(16, 2.5), 12, ModelParams{}, {});
  SimState s = generic_small_state(pb, 3, {0.05, 8, 0.1, 0.05, 1, 2});
  s.t = 0.125;
  const Snapshot snap = snapshot_of(s, pb.basis);
  const fs::path file = dir / snapshot_name(7);
  CHECK(file.filename() == "snap_000007.mes");
  write_snapshot(file, snap);

  SUBCASE("bitwise round trip") {
    const Snapshot back = read_snapshot(file);
    CHECK(back == snap);
    CHECK(back.n == 16);
    CHECK(back.l == 2.5);
    CHECK(back.t == 0.125);
    CHECK(fs::file_size(file) == 4 + 4 + 4 + 8 + 8 + 4 + std::string(kSnapshotFields).size() + 9 * 16 * 16 * 8);
  }
  SUBCASE("coefficients survive the grid representation") {
    const SimState r = state_of(read_snapshot(file), pb.basis);
    CHECK((r.v - s.v).norm() < 1e-14);
    CHECK((r.F - s.F).max_abs() < 1e-14);
    CHECK((r.M - s.M).max_abs() < 1e-14);
    CHECK(r.t == s.t);
  }
  SUBCASE("layout: x runs fastest, little endian") {
    const std::string bytes = slurp(file);
    CHECK(bytes.substr(0, 4) == "MES1");
    const size_t header = 4 + 4 + 4 + 8 + 8 + 4 + std::string(kSnapshotFields).size();
    double v;
    const int i = 3, j = 5;
    std::memcpy(&v, bytes.data() + header + 8 * (j * 16 + i), 8);
    CHECK(v == snap.v[0](i, j));
  }
  SUBCASE("truncated file is rejected") {
    const std::string bytes = slurp(file);
    const fs::path cut = dir / "cut.mes";
    for (size_t keep : {size_t(3), size_t(20), bytes.size() - 1}) {
      std::ofstream(cut, std::ios::binary) << bytes.substr(0, keep);
      CHECK_THROWS_AS(read_snapshot(cut), IoError);
    }
  }
  SUBCASE("wrong magic is rejected") {
    std::string bytes = slurp(file);
    bytes[0] = 'X';
    const fs::path bad = dir / "bad.mes";
    std::ofstream(bad, std::ios::binary) << bytes;
    CHECK_THROWS_AS(read_snapshot(bad), IoError);
    CHECK_THROWS_AS(read_snapshot(dir / "missing.mes"), IoError);
  }
}

TEST_CASE("CSV schemas") {
  const fs::path dir = scratch("csv");
  std::vector<EnergyRow> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[static_cast<size_t>(i)].t = 0.1 * i;
    rows[static_cast<size_t>(i)].kinetic = 1.0 / 3.0 + i;
    rows[static_cast<size_t>(i)].grad_m_sq = 2.0 * i;
    rows[static_cast<size_t>(i)].fp_iterations = i;
  }
  write_energy_csv(dir / "energy.csv", rows);
  write_monitor_csv(dir / "monitors.csv", rows);
  write_iterations_csv(dir / "iterations.csv", {IterationRecord{0, 0.0, 1, 1e-3, 0.5, 1.5, false}});
  CHECK(first_line(dir / "energy.csv") ==
        "t,kinetic,exchange,zeeman,elastic,total,viscous_diss,regularization_diss,llg_diss,external_work,"
        "balance_residual,m_drift,div_norm,fp_iterations");
  CHECK(first_line(dir / "iterations.csv") == "window,t0,iteration,residual,sup_norm,ball_radius,ball_violation");
  CHECK(first_line(dir / "monitors.csv") == "t,apriori_lhs,grad_m_sq,lap_m_sq");

  std::vector<EnergyRow> back = read_energy_csv(dir / "energy.csv");
  merge_monitor_csv(dir / "monitors.csv", back);
  REQUIRE(back.size() == 3);
  CHECK(back[1].kinetic == rows[1].kinetic);
  CHECK(back[2].grad_m_sq == 4.0);
  CHECK(back[2].fp_iterations == 2);

  std::ofstream(dir / "broken.csv") << "t,kinetic,exchange\n0,1,2\n";
  try {
    read_energy_csv(dir / "broken.csv");
    FAIL("schema-broken CSV was accepted");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("zeeman") != std::string::npos);
  }
}

TEST_CASE("simulate writes a complete run directory") {
  const fs::path dir = scratch("run");
  const std::string text = "[domain]\nn = 16\n[run]\nm = 12\nT = 0.02\ndt = 0.002\ntau = 0.01\noutput_stride = 2\n"
                           "[initial]\npreset = zero\n[output]\ndirectory = " +
                           (dir / "a").string() + "\n";
  RunConfig c = parse_config_text(text);
  std::ostringstream log;
  const SimulationSummary s = simulate(c, log);
  CHECK(s.completed);
  CHECK(s.rows == 6);
  CHECK(s.snapshots == 6);
  CHECK(s.line().rfind("simulate status=ok", 0) == 0);

  const RunDirectory rd = read_run_directory(dir / "a");
  CHECK(rd.config == c);
  REQUIRE(rd.rows.size() == 6);
  for (const auto& r : rd.rows) {
    CHECK(r.total == 0.0);
    CHECK(r.kinetic == 0.0);
    CHECK(r.balance_residual == 0.0);
  }
  CHECK(rd.rows.back().t == doctest::Approx(0.02));
  CHECK(rd.snapshots.size() == 6);
  CHECK(fs::exists(dir / "a" / "summary.txt"));
  CHECK(fs::exists(dir / "a" / "iterations.csv"));

  SUBCASE("deterministic output") {
    c.initial.preset = "taylor_green";
    c.output.directory = (dir / "b").string();
    simulate(c, log);
    c.output.directory = (dir / "c").string();
    simulate(c, log);
    for (const char* f : {"energy.csv", "monitors.csv", "iterations.csv"})
      CHECK(slurp(dir / "b" / f) == slurp(dir / "c" / f));
    CHECK(slurp(dir / "b" / "snapshots" / snapshot_name(5)) == slurp(dir / "c" / "snapshots" / snapshot_name(5)));
  }
  SUBCASE("restart from a snapshot file") {
    RunConfig r = c;
    r.initial.preset = "file";
    r.initial.file = rd.snapshots.back().string();
    const Problem pb = r.problem();
    const SimState s0 = initial_state(r, pb);
    CHECK(s0.t == doctest::Approx(0.02));
  }
  SUBCASE("stale snapshots are removed") {
    c.run.output_stride = 5;
    simulate(c, log);
    CHECK(read_run_directory(dir / "a").snapshots.size() == 3);
  }
}

TEST_CASE("missing run directory") { CHECK_THROWS_AS(read_run_directory("/nonexistent/run"), IoError); }
