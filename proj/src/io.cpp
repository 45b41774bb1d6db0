#include "magel/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "magel/initial.hpp"

namespace magel {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

double to_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v, size_t count) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.size() != count)
    throw ConfigError(key + ": expected " + std::to_string(count) + " comma-separated numbers, got '" + v + "'");
  return out;
}

std::string dealias_name(ProductDealiasing d) { return d == ProductDealiasing::padding ? "padding" : "truncation"; }

ProductDealiasing parse_dealias(const std::string& v) {
  if (v == "padding") return ProductDealiasing::padding;
  if (v == "truncation") return ProductDealiasing::truncation;
  throw ConfigError("dealias_rule: expected padding or truncation, got '" + v + "'");
}

std::string drift_action_name(DriftAction a) { return a == DriftAction::warn ? "warn" : "abort"; }

DriftAction parse_drift_action(const std::string& v) {
  if (v == "warn") return DriftAction::warn;
  if (v == "abort") return DriftAction::abort;
  throw ConfigError("drift_action: expected warn or abort, got '" + v + "'");
}

struct Key {
  std::string section;
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define MAGEL_DOUBLE(sec, key, member)                                                       \
  Key {                                                                                      \
    sec, key, [](RunConfig& c, const std::string& v) { c.member = to_double(key, v); },      \
        [](const RunConfig& c) { return format_double(c.member); }                           \
  }
#define MAGEL_INT(sec, key, member)                                                                  \
  Key {                                                                                              \
    sec, key, [](RunConfig& c, const std::string& v) { c.member = static_cast<int>(to_integer(key, v)); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }                                  \
  }
#define MAGEL_STRING(sec, key, member)                                           \
  Key {                                                                          \
    sec, key, [](RunConfig& c, const std::string& v) { c.member = v; },          \
        [](const RunConfig& c) { return c.member; }                              \
  }
#define MAGEL_BOOL(sec, key, member)                                                      \
  Key {                                                                                   \
    sec, key, [](RunConfig& c, const std::string& v) { c.member = to_bool(key, v); },     \
        [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }       \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      MAGEL_INT("domain", "n", domain.n),
      MAGEL_DOUBLE("domain", "l", domain.l),
      MAGEL_DOUBLE("params", "nu", params.nu),
      MAGEL_DOUBLE("params", "kappa", params.kappa),
      MAGEL_DOUBLE("params", "a_exch", params.a_exch),
      MAGEL_DOUBLE("params", "mu0", params.mu0),
      MAGEL_DOUBLE("params", "gamma", params.gamma_llg),
      MAGEL_DOUBLE("params", "lambda", params.lambda_llg),
      MAGEL_DOUBLE("params", "c_e", params.elastic.c_e),
      MAGEL_DOUBLE("run", "dt", run.dt),
      MAGEL_DOUBLE("run", "T", run.T),
      Key{"run", "mode", [](RunConfig& c, const std::string& v) { c.run.mode = parse_coupling_mode(v); },
          [](const RunConfig& c) { return to_string(c.run.mode); }},
      MAGEL_INT("run", "m", run.m),
      MAGEL_DOUBLE("run", "tau", run.tau),
      MAGEL_DOUBLE("run", "fp_tol", run.fp_tol),
      MAGEL_INT("run", "fp_max_iter", run.fp_max_iter),
      MAGEL_DOUBLE("run", "tau_min", run.tau_min),
      Key{"run", "dealias_rule", [](RunConfig& c, const std::string& v) { c.run.dealias = parse_dealias(v); },
          [](const RunConfig& c) { return dealias_name(c.run.dealias); }},
      MAGEL_STRING("run", "llg_form", run.llg_form),
      MAGEL_BOOL("run", "renormalize_M", run.renormalize_M),
      MAGEL_DOUBLE("run", "drift_limit", run.drift_limit),
      Key{"run", "drift_action",
          [](RunConfig& c, const std::string& v) { c.run.drift_action = parse_drift_action(v); },
          [](const RunConfig& c) { return drift_action_name(c.run.drift_action); }},
      MAGEL_INT("run", "output_stride", run.output_stride),
      MAGEL_STRING("initial", "preset", initial.preset),
      Key{"initial", "seed",
          [](RunConfig& c, const std::string& v) {
            const long long s = to_integer("seed", v);
            if (s < 0) throw ConfigError("seed must be >= 0");
            c.initial.seed = static_cast<std::uint64_t>(s);
          },
          [](const RunConfig& c) { return std::to_string(c.initial.seed); }},
      MAGEL_DOUBLE("initial", "amplitude", initial.amplitude),
      MAGEL_DOUBLE("initial", "kinetic", initial.kinetic),
      MAGEL_DOUBLE("initial", "m_perturbation", initial.m_perturbation),
      MAGEL_DOUBLE("initial", "f_perturbation", initial.f_perturbation),
      MAGEL_STRING("initial", "file", initial.file),
      Key{"hext", "preset", [](RunConfig& c, const std::string& v) { c.hext.preset = parse_hext_preset(v); },
          [](const RunConfig& c) { return to_string(c.hext.preset); }},
      MAGEL_DOUBLE("hext", "amplitude", hext.amplitude),
      MAGEL_DOUBLE("hext", "omega", hext.omega),
      Key{"hext", "direction",
          [](RunConfig& c, const std::string& v) {
            const auto x = to_list("direction", v, 3);
            c.hext.direction = Eigen::Vector3d(x[0], x[1], x[2]);
          },
          [](const RunConfig& c) {
            return format_double(c.hext.direction(0)) + "," + format_double(c.hext.direction(1)) + "," +
                   format_double(c.hext.direction(2));
          }},
      Key{"hext", "wavevector",
          [](RunConfig& c, const std::string& v) {
            const auto x = to_list("wavevector", v, 2);
            if (x[0] != std::round(x[0]) || x[1] != std::round(x[1]))
              throw ConfigError("wavevector: expected integers, got '" + v + "'");
            c.hext.wavevector = Eigen::Vector2i(static_cast<int>(x[0]), static_cast<int>(x[1]));
          },
          [](const RunConfig& c) {
            return std::to_string(c.hext.wavevector(0)) + "," + std::to_string(c.hext.wavevector(1));
          }},
      MAGEL_STRING("output", "directory", output.directory),
      MAGEL_BOOL("output", "snapshots", output.snapshots),
  };
  return k;
}

#undef MAGEL_DOUBLE
#undef MAGEL_INT
#undef MAGEL_STRING
#undef MAGEL_BOOL

bool multiple_of(double span, double dt) {
  const double s = span / dt;
  return std::lround(s) >= 1 && std::abs(s - std::round(s)) <= 1e-9 * std::max(1.0, s);
}

// Little-endian primitives.
template <typename T>
void put(std::ostream& os, T value) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T take(const std::vector<char>& buf, size_t& pos, const fs::path& path) {
  if (pos + sizeof(T) > buf.size()) throw IoError(path.string() + ": truncated snapshot header");
  unsigned char b[sizeof(T)];
  std::memcpy(b, buf.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError(path.string() + ": cannot open for writing");
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  if (!os) throw IoError(path.string() + ": write failed");
}

std::vector<std::vector<double>> read_csv(const fs::path& path, const std::vector<std::string>& expected) {
  std::ifstream is(path);
  if (!is) throw IoError(path.string() + ": cannot open");
  std::string line;
  if (!std::getline(is, line)) throw IoError(path.string() + ": empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(trim(line));
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  for (const auto& col : expected)
    if (std::find(header.begin(), header.end(), col) == header.end())
      throw IoError(path.string() + ": missing column '" + col + "'");
  if (header != expected) throw IoError(path.string() + ": columns differ from the documented schema");
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> r;
    std::stringstream ss(trim(line));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        r.push_back(to_double(path.string(), cell));
      } catch (const ConfigError&) {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (r.size() != expected.size())
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(expected.size()) +
                    " values, got " + std::to_string(r.size()));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

void RunConfig::validate() const {
  Domain check(domain.n, domain.l);
  params.validate();
  if (run.m < 1) throw ConfigError("m must be >= 1");
  if (run.m > VelocityBasis::capacity(domain.n))
    throw ConfigError("m = " + std::to_string(run.m) + " exceeds the " +
                      std::to_string(VelocityBasis::capacity(domain.n)) + " velocity modes resolvable at n = " +
                      std::to_string(domain.n));
  if (!(run.dt > 0)) throw ConfigError("dt must be > 0");
  if (!(run.T > 0)) throw ConfigError("T must be > 0");
  if (!multiple_of(run.T, run.dt)) throw ConfigError("T must be a positive multiple of dt");
  fixed_point().validate();
  if (run.mode == CouplingMode::fixed_point && !multiple_of(run.tau, run.dt))
    throw ConfigError("tau must be a positive multiple of dt");
  if (run.output_stride < 1) throw ConfigError("output_stride must be >= 1");
  if (!(run.drift_limit > 0)) throw ConfigError("drift_limit must be > 0");
  if (run.llg_form != "auto" && run.llg_form != "cross" && run.llg_form != "expanded")
    throw ConfigError("llg_form: expected auto, cross or expanded, got '" + run.llg_form + "'");
  if (run.llg_form == "expanded" && !params.normalized_llg())
    throw ConfigError("llg_form: expanded requires gamma = lambda = 1 and a_exch = 0.5");
  static const std::set<std::string> presets = {"zero", "taylor_green", "generic_small", "file"};
  if (!presets.count(initial.preset))
    throw ConfigError("preset: expected zero, taylor_green, generic_small or file, got '" + initial.preset + "'");
  if (initial.preset == "file" && initial.file.empty()) throw ConfigError("file: required for preset = file");
  if (!(initial.kinetic >= 0)) throw ConfigError("kinetic must be >= 0");
  if (!(initial.m_perturbation >= 0)) throw ConfigError("m_perturbation must be >= 0");
  if (!(initial.f_perturbation >= 0)) throw ConfigError("f_perturbation must be >= 0");
  if (!std::isfinite(initial.amplitude)) throw ConfigError("amplitude must be finite");
  hext.validate();
  if (hext.preset != HextPreset::zero && hext.direction.isZero()) throw ConfigError("direction must be nonzero");
  if (output.directory.empty()) throw ConfigError("directory must not be empty");
}

FixedPointConfig RunConfig::fixed_point() const {
  FixedPointConfig f;
  f.tau = run.tau;
  f.tol = run.fp_tol;
  f.max_iter = run.fp_max_iter;
  f.mode = run.mode;
  f.tau_min = run.tau_min;
  return f;
}

RunOptions RunConfig::run_options() const {
  RunOptions o;
  o.dt = run.dt;
  o.llg.renormalize = run.renormalize_M;
  o.llg.drift_limit = run.drift_limit;
  o.llg.drift_action = run.drift_action;
  return o;
}

Problem RunConfig::problem() const {
  std::optional<LlgForm> form;
  if (run.llg_form == "cross") form = LlgForm::cross;
  if (run.llg_form == "expanded") form = LlgForm::expanded;
  return Problem::build(Domain(domain.n, domain.l), run.m, params, hext, form, Dealiasing{run.dealias});
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  for (const auto& k : keys())
    if (k.get(a) != k.get(b)) return false;
  return true;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig c;
  std::map<std::string, const Key*> lookup;
  std::set<std::string> sections;
  for (const auto& k : keys()) {
    lookup[k.section + "." + k.name] = &k;
    sections.insert(k.section);
  }
  std::set<std::string> seen;
  std::string section;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "syntax error: unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "syntax error: expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "syntax error: missing key");
    if (section.empty()) throw ConfigError(where + "key '" + key + "' appears before any section");
    const auto it = lookup.find(section + "." + key);
    if (it == lookup.end()) throw ConfigError(where + "unknown key '" + key + "' in section [" + section + "]");
    if (!seen.insert(section + "." + key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      it->second->set(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return c;
}

RunConfig parse_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream os;
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      os << (section.empty() ? "" : "\n") << '[' << k.section << "]\n";
      section = k.section;
    }
    os << k.name << " = " << k.get(c) << '\n';
  }
  return os.str();
}

SimState initial_state(const RunConfig& c, const Problem& pb) {
  const std::string& p = c.initial.preset;
  if (p == "zero") return zero_state(pb);
  if (p == "taylor_green") return taylor_green_state(pb, c.initial.amplitude);
  if (p == "generic_small") {
    GenericSmallOptions o;
    o.kinetic = c.initial.kinetic;
    o.m_perturbation = c.initial.m_perturbation;
    o.f_perturbation = c.initial.f_perturbation;
    return generic_small_state(pb, c.initial.seed, o);
  }
  if (p == "file") {
    const Snapshot snap = read_snapshot(c.initial.file);
    if (snap.n != pb.domain().n || snap.l != pb.domain().l)
      throw ConfigError("file: snapshot grid does not match [domain]");
    return state_of(snap, pb.basis);
  }
  throw ConfigError("preset: unknown '" + p + "'");
}

bool operator==(const Snapshot& a, const Snapshot& b) {
  auto same = [](const RealGridField& x, const RealGridField& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (x[i].rows() != y[i].rows() || x[i].cols() != y[i].cols() ||
          std::memcmp(x[i].data(), y[i].data(), sizeof(double) * static_cast<size_t>(x[i].size())) != 0)
        return false;
    return true;
  };
  return a.n == b.n && a.l == b.l && a.t == b.t && same(a.v, b.v) && same(a.F, b.F) && same(a.M, b.M);
}

Snapshot snapshot_of(const SimState& s, const VelocityBasis& basis) {
  Snapshot snap;
  snap.n = s.domain().n;
  snap.l = s.domain().l;
  snap.t = s.t;
  snap.v = backward(basis.synthesize(s.v));
  snap.F = backward(s.F);
  snap.M = backward(s.M);
  return snap;
}

SimState state_of(const Snapshot& snap, const VelocityBasis& basis) {
  const Domain d(snap.n, snap.l);
  if (!(basis.domain() == d)) throw ShapeError("snapshot grid does not match the velocity basis domain");
  SimState s;
  s.t = snap.t;
  s.v = basis.project(forward(d, Rank::vec2, snap.v));
  s.F = forward(d, Rank::tensor2x2, snap.F);
  s.M = forward(d, Rank::vec3, snap.M);
  return s;
}

void write_snapshot(const fs::path& path, const Snapshot& snap) {
  const size_t nn = static_cast<size_t>(snap.n) * static_cast<size_t>(snap.n);
  for (const RealGridField* g : {&snap.v, &snap.F, &snap.M})
    for (const auto& c : *g)
      if (static_cast<size_t>(c.size()) != nn) throw ShapeError("write_snapshot: grid size does not match n");
  if (snap.v.size() != 2 || snap.F.size() != 4 || snap.M.size() != 3)
    throw ShapeError("write_snapshot: expected 2 + 4 + 3 components");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(path.string() + ": cannot open for writing");
  os.write("MES1", 4);
  put<std::uint32_t>(os, 0x01020304u);
  put<std::int32_t>(os, snap.n);
  put<double>(os, snap.l);
  put<double>(os, snap.t);
  const std::string fields = kSnapshotFields;
  put<std::uint32_t>(os, static_cast<std::uint32_t>(fields.size()));
  os.write(fields.data(), static_cast<std::streamsize>(fields.size()));
  // Eigen arrays are column-major in (ix, iy): x runs fastest, as documented.
  for (const RealGridField* g : {&snap.v, &snap.F, &snap.M})
    for (const auto& c : *g)
      for (Eigen::Index k = 0; k < c.size(); ++k) put<double>(os, c.data()[k]);
  if (!os) throw IoError(path.string() + ": write failed");
}

Snapshot read_snapshot(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path.string() + ": cannot open snapshot");
  const std::vector<char> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (buf.size() < 4 || std::memcmp(buf.data(), "MES1", 4) != 0) throw IoError(path.string() + ": bad magic");
  size_t pos = 4;
  if (take<std::uint32_t>(buf, pos, path) != 0x01020304u) throw IoError(path.string() + ": bad endianness tag");
  Snapshot snap;
  snap.n = take<std::int32_t>(buf, pos, path);
  snap.l = take<double>(buf, pos, path);
  snap.t = take<double>(buf, pos, path);
  const std::uint32_t len = take<std::uint32_t>(buf, pos, path);
  if (pos + len > buf.size()) throw IoError(path.string() + ": truncated snapshot header");
  const std::string fields(buf.data() + pos, len);
  pos += len;
  if (fields != kSnapshotFields) throw IoError(path.string() + ": unexpected field list '" + fields + "'");
  if (snap.n < 1 || snap.n > (1 << 16)) throw IoError(path.string() + ": implausible grid size");
  const size_t nn = static_cast<size_t>(snap.n) * static_cast<size_t>(snap.n);
  if (buf.size() - pos != nn * 9 * sizeof(double))
    throw IoError(path.string() + ": payload has " + std::to_string(buf.size() - pos) + " bytes, expected " +
                  std::to_string(nn * 9 * sizeof(double)));
  auto read_grids = [&](size_t count) {
    RealGridField g(count, RealGrid(snap.n, snap.n));
    for (auto& c : g)
      for (Eigen::Index k = 0; k < c.size(); ++k) c.data()[k] = take<double>(buf, pos, path);
    return g;
  };
  snap.v = read_grids(2);
  snap.F = read_grids(4);
  snap.M = read_grids(3);
  return snap;
}

const std::vector<std::string>& energy_csv_columns() {
  static const std::vector<std::string> c = {
      "t",           "kinetic",          "exchange", "zeeman",  "elastic",       "total",
      "viscous_diss", "regularization_diss", "llg_diss", "external_work", "balance_residual", "m_drift",
      "div_norm",    "fp_iterations"};
  return c;
}

const std::vector<std::string>& iteration_csv_columns() {
  static const std::vector<std::string> c = {"window",   "t0",          "iteration",     "residual",
                                             "sup_norm", "ball_radius", "ball_violation"};
  return c;
}

const std::vector<std::string>& monitor_csv_columns() {
  static const std::vector<std::string> c = {"t", "apriori_lhs", "grad_m_sq", "lap_m_sq"};
  return c;
}

void write_energy_csv(const fs::path& path, const std::vector<EnergyRow>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows)
    out.push_back({format_double(r.t), format_double(r.kinetic), format_double(r.exchange), format_double(r.zeeman),
                   format_double(r.elastic), format_double(r.total), format_double(r.viscous),
                   format_double(r.regularization), format_double(r.llg), format_double(r.external_work),
                   format_double(r.balance_residual), format_double(r.m_drift), format_double(r.div_norm),
                   std::to_string(r.fp_iterations)});
  write_csv(path, energy_csv_columns(), out);
}

std::vector<EnergyRow> read_energy_csv(const fs::path& path) {
  std::vector<EnergyRow> rows;
  for (const auto& v : read_csv(path, energy_csv_columns())) {
    EnergyRow r;
    r.t = v[0];
    r.kinetic = v[1];
    r.exchange = v[2];
    r.zeeman = v[3];
    r.elastic = v[4];
    r.total = v[5];
    r.viscous = v[6];
    r.regularization = v[7];
    r.llg = v[8];
    r.external_work = v[9];
    r.balance_residual = v[10];
    r.m_drift = v[11];
    r.div_norm = v[12];
    r.fp_iterations = static_cast<int>(v[13]);
    rows.push_back(r);
  }
  return rows;
}

void write_iterations_csv(const fs::path& path, const std::vector<IterationRecord>& log) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : log)
    out.push_back({std::to_string(r.window), format_double(r.t0), std::to_string(r.iteration),
                   format_double(r.residual), format_double(r.sup_norm), format_double(r.ball_radius),
                   r.ball_violation ? "1" : "0"});
  write_csv(path, iteration_csv_columns(), out);
}

void write_monitor_csv(const fs::path& path, const std::vector<EnergyRow>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows)
    out.push_back({format_double(r.t),
                   format_double(r.kinetic + 0.5 * r.grad_m_sq + r.elastic + r.regularization + r.viscous),
                   format_double(r.grad_m_sq), format_double(r.lap_m_sq)});
  write_csv(path, monitor_csv_columns(), out);
}

void merge_monitor_csv(const fs::path& path, std::vector<EnergyRow>& rows) {
  const auto m = read_csv(path, monitor_csv_columns());
  if (m.size() != rows.size()) throw IoError(path.string() + ": row count differs from energy.csv");
  for (size_t i = 0; i < rows.size(); ++i) {
    if (m[i][0] != rows[i].t) throw IoError(path.string() + ": sample times differ from energy.csv");
    rows[i].grad_m_sq = m[i][2];
    rows[i].lap_m_sq = m[i][3];
  }
}

std::string snapshot_name(int index) {
  std::ostringstream os;
  os << "snap_" << std::setw(6) << std::setfill('0') << index << ".mes";
  return os.str();
}

std::string SimulationSummary::line() const {
  std::ostringstream os;
  os << std::setprecision(6) << "simulate status=" << (completed ? "ok" : "failed") << " t=" << final_time
     << " rows=" << rows << " snapshots=" << snapshots << " ied=" << ied << " max_balance=" << max_balance_residual
     << " max_drift=" << max_unit_drift << " windows=" << windows << " tau_halvings=" << tau_halvings;
  if (!completed) os << " failure_time=" << failure_time << " failure=\"" << failure << "\"";
  return os.str();
}

SimulationSummary simulate(const RunConfig& c, std::ostream& log) {
  c.validate();
  const fs::path dir = c.output.directory;
  const fs::path snapdir = dir / "snapshots";
  std::error_code ec;
  fs::create_directories(snapdir, ec);
  if (ec) throw IoError(snapdir.string() + ": cannot create directory: " + ec.message());
  // Stale snapshots from an earlier run in the same directory would be misread.
  for (const auto& e : fs::directory_iterator(snapdir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("snap_", 0) == 0 && e.path().extension() == ".mes") fs::remove(e.path());
  }
  {
    std::ofstream os(dir / "config.ini");
    if (!os) throw IoError((dir / "config.ini").string() + ": cannot open for writing");
    os << echo_config(c);
  }

  const Problem pb = c.problem();
  const SimState s0 = initial_state(c, pb);
  SimulationSummary sum;
  sum.ied = ied(s0, pb, c.run.T).total;
  log << "initial " << ied(s0, pb, c.run.T).describe() << '\n';

  std::vector<EnergyRow> rows;
  long sample = 0;
  auto observer = [&](const SimState& s, const StepInfo& info) {
    if (sample++ % c.run.output_stride != 0) return;
    EnergyRow r = energy_components(s, pb);
    r.fp_iterations = info.fp_iterations;
    rows.push_back(r);
    if (c.output.snapshots) {
      write_snapshot(snapdir / snapshot_name(sum.snapshots), snapshot_of(s, pb.basis));
      ++sum.snapshots;
    }
  };
  const RunResult res = run(s0, c.run.T, c.fixed_point(), pb, c.run_options(), observer);
  sum.max_balance_residual = energy_balance_residual(rows);
  write_energy_csv(dir / "energy.csv", rows);
  write_monitor_csv(dir / "monitors.csv", rows);
  write_iterations_csv(dir / "iterations.csv", res.iterations);

  sum.completed = res.completed;
  sum.failure = res.failure;
  sum.failure_time = res.failure_time;
  sum.final_time = res.final_state.t;
  sum.rows = static_cast<int>(rows.size());
  sum.max_unit_drift = res.max_unit_drift;
  sum.windows = static_cast<int>(res.windows.size());
  sum.tau_halvings = res.tau_halvings;
  {
    std::ofstream os(dir / "summary.txt");
    if (!os) throw IoError((dir / "summary.txt").string() + ": cannot open for writing");
    os << sum.line() << '\n';
  }
  return sum;
}

RunDirectory read_run_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + ": not a run directory");
  RunDirectory r;
  r.config = parse_config(dir / "config.ini");
  r.rows = read_energy_csv(dir / "energy.csv");
  if (fs::exists(dir / "monitors.csv")) merge_monitor_csv(dir / "monitors.csv", r.rows);
  if (fs::is_directory(dir / "snapshots"))
    for (const auto& e : fs::directory_iterator(dir / "snapshots"))
      if (e.path().extension() == ".mes") r.snapshots.push_back(e.path());
  std::sort(r.snapshots.begin(), r.snapshots.end());
  return r;
}

}  // namespace magel
