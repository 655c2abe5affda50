#include "jcanyon/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "jcanyon/iontrap.hpp"
#include "jcanyon/kernels.hpp"
#include "jcanyon/selftest.hpp"

namespace jcanyon::cli {

namespace {

constexpr double kPi = std::numbers::pi;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

std::string fmt_double(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    config_error("invalid number '" + v + "'");
  }
  if (used != v.size()) config_error("invalid number '" + v + "'");
  return x;
}

long long to_integer(const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    config_error("invalid integer '" + v + "'");
  }
  if (used != v.size()) config_error("invalid integer '" + v + "'");
  return x;
}

bool to_bool(const std::string& v) {
  if (v.empty() || v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  config_error("invalid boolean '" + v + "'");
}

std::string one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v == o) return v;
  std::string list;
  for (const char* o : options) list += (list.empty() ? "" : ", ") + std::string(o);
  config_error("'" + v + "' is not one of {" + list + "}");
}

template <class T>
Field int_field(std::string name, std::string help, T& ref, long long lo, long long hi) {
  return {std::move(name), std::move(help),
          [&ref, lo, hi](const std::string& v) {
            const long long x = to_integer(v);
            if (x < lo || x > hi) {
              config_error("value " + v + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            }
            ref = static_cast<T>(x);
          },
          [&ref] { return std::to_string(ref); }, [&ref] { return nlohmann::json(ref); }};
}

Field real_field(std::string name, std::string help, double& ref) {
  return {std::move(name), std::move(help), [&ref](const std::string& v) { ref = to_double(v); },
          [&ref] { return fmt_double(ref, 17); }, [&ref] { return nlohmann::json(ref); }};
}

Field angle_field(std::string name, std::string help, double& ref) {
  return {std::move(name), std::move(help), [&ref](const std::string& v) { ref = parse_angle(v); },
          [&ref] { return fmt_double(ref, 17); }, [&ref] { return nlohmann::json(ref); }};
}

Field bool_field(std::string name, std::string help, bool& ref) {
  return {std::move(name), std::move(help), [&ref](const std::string& v) { ref = to_bool(v); },
          [&ref] { return std::string(ref ? "true" : "false"); }, [&ref] { return nlohmann::json(ref); }};
}

Field text_field(std::string name, std::string help, std::string& ref,
                 std::function<std::string(const std::string&)> check = {}) {
  return {std::move(name), std::move(help),
          [&ref, check](const std::string& v) { ref = check ? check(v) : v; }, [&ref] { return ref; },
          [&ref] { return nlohmann::json(ref); }};
}

TimeProfile profile_of(const std::string& s) {
  if (s == "uniform") return TimeProfile::Uniform;
  if (s == "plateau") return TimeProfile::Plateau;
  return TimeProfile::Smoothstep;
}

SegmentTiming timing_of(const std::string& s) {
  return s == "fubini-study" ? SegmentTiming::ByFubiniStudy : SegmentTiming::BySamples;
}

DynamicPhaseMode phase_mode_of(const std::string& s) {
  if (s == "subtract-expectation") return DynamicPhaseMode::SubtractExpectation;
  if (s == "subtract-eigenvalue") return DynamicPhaseMode::SubtractEigenvalue;
  if (s == "none") return DynamicPhaseMode::None;
  return DynamicPhaseMode::Echo;
}

std::vector<int> parse_m_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const long long m = to_integer(trim(item));
    if (m < 1 || m > 12) config_error("m-list entry " + item + " outside [1, 12]");
    out.push_back(static_cast<int>(m));
  }
  if (out.empty()) config_error("m-list is empty");
  return out;
}

std::vector<double> grid(double lo, double hi, int points) {
  if (points < 1) config_error("points must be >= 1");
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k) g[k] = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
  return g;
}

ModelParams model_of(const RunConfig& c, int m, double delta_over_lambda) {
  ModelParams p;
  p.m = m;
  p.n = c.n;
  p.n_prime = c.n_prime;
  p.lambda = c.lambda;
  p.delta = delta_over_lambda * c.lambda;
  p.validate();
  return p;
}

PhaseReport loop_holonomy(const ModelParams& p, double omega, int steps, int jobs,
                          Branch branch = Branch::Plus) {
  const BasisSpec basis = BasisSpec::sector_exact(p.n, p.n_prime, p.m);
  const SchwingerFrame frame(basis);
  const LoopPath path =
      constant_latitude_loop(theta_for_solid_angle(omega), steps, default_revolutions(basis));
  const auto [plus, minus] = analytic_eigensystem(p);
  HolonomyOptions opts;
  opts.jobs = jobs;
  return holonomy_phase((branch == Branch::Plus ? plus : minus).to_state(basis), frame, path, opts);
}

// Ratio of the measured phase to its resonant value (m/4) Omega, valid for
// n = n' = 0.
double ratio_from_phase(double gamma, int m, double omega) { return gamma / (0.25 * m * omega); }

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string regime(double alpha) {
  const double k = std::round(alpha);
  if (std::abs(alpha - k) > 1e-6) return "anyon";
  return static_cast<long long>(k) % 2 != 0 ? "fermi" : "bose";
}

int default_points(const RunConfig& c, int fallback) { return c.points > 0 ? c.points : fallback; }

}  // namespace

double parse_angle(const std::string& text) {
  static const std::regex re(
      R"(^\s*([+-]?)\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*(\*?\s*(?:pi|π))?\s*(?:/\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))?\s*$)");
  std::smatch mt;
  if (!std::regex_match(text, mt, re) || (!mt[2].matched && !mt[3].matched)) {
    config_error("invalid angle '" + text + "'");
  }
  double v = mt[2].matched ? std::stod(mt[2].str()) : 1.0;
  if (mt[3].matched) v *= kPi;
  if (mt[4].matched) {
    const double d = std::stod(mt[4].str());
    if (d == 0.0) config_error("angle '" + text + "' divides by zero");
    v /= d;
  }
  return mt[1].str() == "-" ? -v : v;
}

nlohmann::json RunConfig::to_json() const {
  RunConfig copy = *this;
  nlohmann::json j = nlohmann::json::object();
  for (const Field& f : config_fields(copy)) j[f.name] = f.value();
  return j;
}

std::vector<Field> config_fields(RunConfig& c) {
  return {
      text_field("output", "output file (default stdout)", c.output),
      text_field("format", "csv | json", c.format, [](const std::string& v) { return one_of(v, {"csv", "json"}); }),
      bool_field("strict", "nonzero exit on cross-check failure", c.strict),
      int_field("jobs", "worker threads (0 = all)", c.jobs, 0, 4096),
      int_field("m", "nonlinearity order", c.m, 1, 12),
      int_field("n", "initial excitations of mode a", c.n, 0, 64),
      int_field("n-prime", "initial excitations of mode b", c.n_prime, 0, 64),
      real_field("lambda", "effective coupling lambda_m", c.lambda),
      real_field("delta", "detuning in units of lambda_m", c.delta),
      angle_field("omega-solid", "solid angle of the loop", c.omega_solid),
      int_field("steps", "loop samples per revolution", c.steps, 8, 1 << 22),
      bool_field("adiabatic", "also run the time-dependent evolution", c.adiabatic),
      real_field("time", "loop duration in units of 1/lambda_m", c.time),
      text_field("profile", "uniform | smoothstep | plateau", c.profile,
                 [](const std::string& v) { return one_of(v, {"uniform", "smoothstep", "plateau"}); }),
      text_field("timing", "samples | fubini-study", c.timing,
                 [](const std::string& v) { return one_of(v, {"samples", "fubini-study"}); }),
      text_field("phase-mode", "subtract-expectation | subtract-eigenvalue | echo | none", c.phase_mode,
                 [](const std::string& v) {
                   return one_of(v, {"subtract-expectation", "subtract-eigenvalue", "echo", "none"});
                 }),
      real_field("crosscheck-tol", "holonomy vs closed form tolerance (rad)", c.crosscheck_tol),
      real_field("adiabatic-tol", "adiabatic vs closed form tolerance (rad)", c.adiabatic_tol),
      text_field("m-list", "comma-separated orders for fig1", c.m_list,
                 [](const std::string& v) {
                   parse_m_list(v);
                   return v;
                 }),
      real_field("delta-min", "sweep start, units of lambda_m", c.delta_min),
      real_field("delta-max", "sweep end, units of lambda_m", c.delta_max),
      int_field("points", "sweep points (0 = command default)", c.points, 0, 1000000),
      bool_field("holonomy", "add holonomy columns to sweeps", c.holonomy),
      text_field("sweep", "omega | delta (ramsey)", c.sweep,
                 [](const std::string& v) { return one_of(v, {"omega", "delta"}); }),
      angle_field("omega-min", "ramsey solid-angle sweep start", c.omega_min),
      angle_field("omega-max", "ramsey solid-angle sweep end", c.omega_max),
      real_field("eta", "Lamb-Dicke parameter", c.eta),
      real_field("g", "carrier coupling", c.g),
      real_field("nu", "trap frequency", c.nu),
      text_field("pulses", "finite | ideal", c.pulses,
                 [](const std::string& v) { return one_of(v, {"finite", "ideal"}); }),
      bool_field("snap", "snap the loop time to a Rabi cycle", c.snap),
      bool_field("dressed-snap", "include the velocity shift when snapping", c.dressed_snap),
      int_field("max-dim", "largest basis dimension accepted", c.max_dim, 1, 1 << 20),
      int_field("seed", "selftest seed", c.seed, 0, std::numeric_limits<long long>::max()),
      int_field("cases", "selftest cases per property", c.cases, 1, 100000),
  };
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
  auto fields = config_fields(cfg);
  std::map<std::string, Field*> by_name;
  for (Field& f : fields) by_name[f.name] = &f;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = origin + ":" + std::to_string(number) + ": ";
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error(where + "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    const auto it = by_name.find(key);
    if (it == by_name.end()) config_error(where + "unknown field '" + key + "'");
    if (!seen.insert(key).second) config_error(where + "duplicate field '" + key + "'");
    try {
      it->second->set(value);
    } catch (const Error& e) {
      config_error(where + "field '" + key + "': " + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str(), path);
}

std::string format_config(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::string out;
  for (const Field& f : config_fields(copy)) out += f.name + " = " + f.get() + "\n";
  return out;
}

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return fmt_double(*d, 15);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += "\n";
  }
  return out;
}

std::string to_json(const Table& t, const RunConfig& cfg) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size() && i < t.header.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
              r[t.header[i]] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
            } else {
              r[t.header[i]] = v;
            }
          },
          row[i]);
    }
    rows.push_back(std::move(r));
  }
  nlohmann::json doc = {{"config", cfg.to_json()}, {"rows", rows}, {"diagnostics", t.diagnostics}};
  return doc.dump(2) + "\n";
}

Table cmd_phase(const RunConfig& c) {
  const ModelParams p = model_of(c, c.m, c.delta);
  check_solid_angle(c.omega_solid);
  const double analytic = analytic_berry_phase(p, c.omega_solid);
  const PhaseReport hol = loop_holonomy(p, c.omega_solid, c.steps, c.jobs);
  double alpha = kNaN;
  if (p.n == 0 && p.n_prime == 0) alpha = statistical_factor(p, c.omega_solid).alpha;

  Table t;
  t.header = {"m",          "n",           "n_prime",        "delta_over_lambda", "omega_solid",
              "gamma_analytic", "gamma_holonomy", "gamma_adiabatic", "alpha",
              "dev_holonomy_analytic", "dev_adiabatic_analytic", "dev_adiabatic_holonomy"};
  double adiabatic = kNaN;
  t.diagnostics["holonomy"] = hol.to_json();
  if (c.adiabatic) {
    const BasisSpec basis = BasisSpec::sector_exact(p.n, p.n_prime, p.m);
    const SchwingerFrame frame(basis);
    DriveSchedule s;
    s.path = constant_latitude_loop(theta_for_solid_angle(c.omega_solid), c.steps, default_revolutions(basis));
    s.lambda_m = p.lambda;
    s.total_time = c.time / p.lambda;
    s.profile = profile_of(c.profile);
    s.timing = timing_of(c.timing);
    s.dynamic_phase_mode = phase_mode_of(c.phase_mode);
    const AdiabaticResult res = adiabatic_evolution(build_interaction_hamiltonian(p, basis), frame, s,
                                                    analytic_eigensystem(p).first.to_state(basis));
    adiabatic = res.report.gamma;
    t.diagnostics["adiabatic"] = res.report.to_json();
    if (std::abs(adiabatic - analytic) > c.adiabatic_tol) t.crosscheck_failed = true;
  }
  const double dev_ha = std::abs(hol.gamma - analytic);
  if (dev_ha > c.crosscheck_tol) t.crosscheck_failed = true;
  t.rows.push_back({static_cast<long long>(p.m), static_cast<long long>(p.n),
                    static_cast<long long>(p.n_prime), c.delta, c.omega_solid, analytic, hol.gamma,
                    adiabatic, alpha, dev_ha, std::abs(adiabatic - analytic),
                    std::abs(adiabatic - hol.gamma)});
  t.diagnostics["crosscheck_tol"] = c.crosscheck_tol;
  t.diagnostics["adiabatic_tol"] = c.adiabatic_tol;
  t.diagnostics["crosscheck_failed"] = t.crosscheck_failed;
  return t;
}

Table cmd_fig1(const RunConfig& c) {
  const std::vector<int> ms = parse_m_list(c.m_list);
  const std::vector<double> deltas = grid(c.delta_min, c.delta_max, default_points(c, 201));
  // Holonomy ratio on the equatorial loop, where Omega = 2 pi.
  const double omega = 2.0 * kPi;
  struct Row {
    double ratio, entropy, entropy_trace, ratio_hol;
  };
  const std::size_t count = ms.size() * deltas.size();
  const auto rows = kernels::omp::map(
      count,
      [&](std::size_t i) {
        const int m = ms[i / deltas.size()];
        RunConfig local = c;
        local.n = 0;
        local.n_prime = 0;
        const ModelParams p = model_of(local, m, deltas[i % deltas.size()]);
        Row r{};
        r.ratio = statistical_factor(p, omega).ratio;
        r.entropy = entropy_vs_detuning(p);
        const BasisSpec basis = BasisSpec::sector_exact(0, 0, m);
        const Subsystem keep[] = {Subsystem::Qubit};
        r.entropy_trace = linear_entropy(
            partial_trace(DensityMatrix::pure(analytic_eigensystem(p).first.to_state(basis)), keep));
        r.ratio_hol = c.holonomy ? ratio_from_phase(loop_holonomy(p, omega, c.steps, 1).gamma, m, omega) : kNaN;
        return r;
      },
      c.jobs);

  Table t;
  t.header = {"delta_over_lambda", "m", "ratio", "linear_entropy", "linear_entropy_trace", "ratio_holonomy",
              "holonomy_flag"};
  nlohmann::json per_m = nlohmann::json::array();
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    std::vector<double> ratio, entropy;
    double worst_trace = 0.0, worst_hol = 0.0;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      const Row& r = rows[mi * deltas.size() + k];
      const double dev = std::abs(r.ratio_hol - r.ratio);
      const bool flagged = c.holonomy && !(dev <= c.crosscheck_tol);
      if (flagged) t.crosscheck_failed = true;
      t.rows.push_back({deltas[k], static_cast<long long>(ms[mi]), r.ratio, r.entropy, r.entropy_trace,
                        r.ratio_hol, static_cast<long long>(flagged)});
      ratio.push_back(r.ratio);
      entropy.push_back(r.entropy);
      worst_trace = std::max(worst_trace, std::abs(r.entropy - r.entropy_trace));
      if (c.holonomy) worst_hol = std::max(worst_hol, dev);
    }
    per_m.push_back({{"m", ms[mi]},
                     {"ratio_strictly_decreasing", strictly_decreasing(ratio)},
                     {"entropy_strictly_decreasing", strictly_decreasing(entropy)},
                     {"max_entropy_trace_deviation", worst_trace},
                     {"max_ratio_holonomy_deviation", worst_hol}});
  }
  t.diagnostics["per_m"] = per_m;
  t.diagnostics["holonomy_omega_solid"] = omega;
  t.diagnostics["crosscheck_failed"] = t.crosscheck_failed;
  return t;
}

Table cmd_transmute(const RunConfig& c) {
  const std::vector<double> deltas = grid(c.delta_min, c.delta_max, default_points(c, 201));
  const auto rows = kernels::omp::map(
      deltas.size(),
      [&](std::size_t k) {
        RunConfig local = c;
        local.n = 0;
        local.n_prime = 0;
        const ModelParams p = model_of(local, c.m, deltas[k]);
        const double alpha = statistical_factor(p, c.omega_solid).alpha;
        const double alpha_hol =
            c.holonomy ? loop_holonomy(p, c.omega_solid, c.steps, 1).gamma / (2.0 * kPi) : kNaN;
        return std::pair{alpha, alpha_hol};
      },
      c.jobs);

  Table t;
  t.header = {"delta_over_lambda", "m", "omega_solid", "alpha", "alpha_holonomy", "regime"};
  std::vector<double> alphas;
  double worst = 0.0;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const auto [a, ah] = rows[k];
    if (c.holonomy) worst = std::max(worst, std::abs(a - ah));
    t.rows.push_back({deltas[k], static_cast<long long>(c.m), c.omega_solid, a, ah, regime(a)});
    alphas.push_back(a);
  }
  bool monotone = true;
  for (std::size_t k = 1; k < alphas.size(); ++k) {
    const double step = (alphas[k] - alphas[k - 1]) * (deltas[k] >= 0.0 ? 1.0 : -1.0);
    if (deltas[k - 1] >= 0.0 && !(step < 0.0)) monotone = false;
  }
  if (c.holonomy && worst > c.crosscheck_tol) t.crosscheck_failed = true;
  RunConfig local = c;
  local.n = local.n_prime = 0;
  t.diagnostics["alpha_at_first"] = alphas.front();
  t.diagnostics["alpha_at_last"] = alphas.back();
  t.diagnostics["alpha_resonant"] = statistical_factor(model_of(local, c.m, 0.0), c.omega_solid).alpha;
  t.diagnostics["alpha_far_detuned_limit"] = 0.0;
  t.diagnostics["monotone_decreasing_for_delta_ge_0"] = monotone;
  t.diagnostics["max_holonomy_deviation"] = worst;
  t.diagnostics["crosscheck_failed"] = t.crosscheck_failed;
  return t;
}

Table cmd_two_anyon(const RunConfig& c) {
  check_solid_angle(c.omega_solid);
  const BasisSpec basis = BasisSpec::two_anyon(c.m);
  if (basis.dim() > c.max_dim) {
    throw Error(ErrorCode::DimensionBudget, "four-mode basis has dimension " + std::to_string(basis.dim()) +
                                                " > max-dim " + std::to_string(c.max_dim));
  }
  TwoAnyonParams tp;
  tp.m = c.m;
  tp.lambda = c.lambda;
  tp.validate();
  const SchwingerFrame frame(basis);
  const LoopPath path =
      constant_latitude_loop(theta_for_solid_angle(c.omega_solid), c.steps, default_revolutions(basis));
  HolonomyOptions opts;
  opts.jobs = c.jobs;
  const PhaseReport pair = holonomy_phase(two_anyon_eigenstate(tp, basis), frame, path, opts);
  ModelParams single;
  single.m = c.m;
  single.lambda = c.lambda;
  const PhaseReport one = loop_holonomy(single, c.omega_solid, c.steps, c.jobs);
  const double analytic = two_anyon_analytic_phase(c.m, c.omega_solid);
  const double ratio = std::abs(one.gamma) > 1e-12 ? pair.gamma / one.gamma : kNaN;

  Table t;
  t.header = {"m", "omega_solid", "gamma_numeric", "gamma_analytic", "gamma_single", "ratio", "dev_numeric_analytic"};
  const double dev = std::abs(pair.gamma - analytic);
  t.rows.push_back({static_cast<long long>(c.m), c.omega_solid, pair.gamma, analytic, one.gamma, ratio, dev});
  if (dev > c.crosscheck_tol) t.crosscheck_failed = true;
  t.diagnostics["dimension"] = basis.dim();
  t.diagnostics["pair"] = pair.to_json();
  t.diagnostics["single"] = one.to_json();
  t.diagnostics["crosscheck_failed"] = t.crosscheck_failed;
  return t;
}

Table cmd_ramsey(const RunConfig& c) {
  TrapParams trap;
  trap.g = c.g;
  trap.eta = c.eta;
  trap.nu = c.nu;
  trap.m = c.m;
  trap.validate();
  const double lambda = trap_lambda(trap);
  const int points = default_points(c, 9);
  const std::vector<double> xs =
      c.sweep == "omega" ? grid(c.omega_min, c.omega_max, points) : grid(c.delta_min, c.delta_max, points);

  const auto runs = kernels::omp::map(
      xs.size(),
      [&](std::size_t k) {
        TrapParams t = trap;
        double omega = c.omega_solid;
        if (c.sweep == "omega") {
          omega = xs[k];
          t.delta_m = c.delta * lambda;
        } else {
          t.delta_m = xs[k] * lambda;
        }
        RamseyRun run = make_ramsey_run(t, omega, c.time, c.steps);
        run.snap_to_cycle = c.snap;
        run.dressed_snap = c.dressed_snap;
        run.pulses = c.pulses == "ideal" ? PulseMode::Ideal : PulseMode::Finite;
        try {
          return ramsey_protocol(std::move(run));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NonAdiabatic) throw;
          const BudgetReport b = adiabaticity_budget(t, run.schedule);
          throw Error(ErrorCode::NonAdiabatic,
                      std::string(e.what()) + "; budget " + b.to_json().dump());
        }
      },
      c.jobs);

  Table t;
  t.header = RamseyRun::csv_header();
  nlohmann::json diag = nlohmann::json::array();
  double worst = 0.0;
  for (const RamseyRun& run : runs) {
    std::vector<Cell> row;
    for (double v : run.csv_row()) row.emplace_back(v);
    row[0] = static_cast<long long>(run.trap.m);
    t.rows.push_back(std::move(row));
    const double dev = std::abs(run.result.p_down - run.result.p_down_analytic);
    worst = std::max(worst, dev);
    if (run.result.budget.overall == Verdict::Fail) t.adiabatic_failed = true;
    diag.push_back({{"omega_solid", run.path.omega_solid},
                    {"delta_m", run.trap.delta_m},
                    {"j_cycles", run.j_cycles},
                    {"p_down_analytic", run.result.p_down_analytic},
                    {"deviation", dev},
                    {"cycle_residual", run.result.cycle_residual},
                    {"splitting_shift", run.result.splitting_shift},
                    {"norm_drift", run.result.norm_drift},
                    {"budget", run.result.budget.to_json()},
                    {"warnings", run.warnings}});
  }
  if (c.sweep == "omega" && c.delta == 0.0 && worst > c.adiabatic_tol) t.crosscheck_failed = true;
  t.diagnostics["lambda_m"] = lambda;
  t.diagnostics["max_deviation"] = worst;
  t.diagnostics["points"] = diag;
  t.diagnostics["crosscheck_failed"] = t.crosscheck_failed;
  t.diagnostics["adiabatic_failed"] = t.adiabatic_failed;
  return t;
}

Table cmd_selftest(const RunConfig& c) {
  SelftestOptions o;
  o.seed = c.seed;
  o.cases = c.cases;
  o.jobs = c.jobs;
  Table t;
  t.header = {"property", "cases", "worst", "threshold", "passed"};
  nlohmann::json details = nlohmann::json::array();
  for (const PropertyResult& r : run_selftest(o)) {
    t.rows.push_back({r.name, static_cast<long long>(r.cases), r.worst, r.threshold,
                      static_cast<long long>(r.passed)});
    if (!r.passed) t.crosscheck_failed = true;
    details.push_back(r.to_json());
  }
  t.diagnostics["properties"] = details;
  t.diagnostics["seed"] = c.seed;
  return t;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::vector<std::string> args(argv + 1, argv + argc);
  // A config file is applied first so that flags override it.
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        apply_config_file(cfg, args[i + 1]);
      } else if (args[i].rfind("--config=", 0) == 0) {
        apply_config_file(cfg, args[i].substr(9));
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  }

  CLI::App app{"Fractional geometric phases of the m-quantum two-mode Jaynes-Cummings model", "jcanyon"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value config file");
  auto fields = config_fields(cfg);
  for (Field& f : fields) {
    const std::string current = f.get();
    const bool is_bool = current == "true" || current == "false";
    auto* opt = app.add_option_function<std::string>(
        "--" + f.name,
        [&f](const std::string& v) {
          try {
            f.set(v);
          } catch (const Error& e) {
            throw CLI::ValidationError("--" + f.name, e.what());
          }
        },
        f.help + " [" + (f.value().is_number_float() ? fmt_double(f.value().get<double>(), 15) : current) + "]");
    opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    // Boolean fields also work as bare switches.
    if (is_bool) opt->expected(0, 1);
  }
  struct Command {
    const char* name;
    const char* help;
    Table (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"phase", "closed form, holonomy and optional adiabatic phase at one point", cmd_phase},
      {"fig1", "ratio and qubit entropy versus detuning", cmd_fig1},
      {"transmute", "statistical factor versus detuning", cmd_transmute},
      {"two-anyon", "phase of the entangled pair against the single anyon", cmd_two_anyon},
      {"ramsey", "trapped-ion Ramsey read-out of the phase", cmd_ramsey},
      {"selftest", "randomized property checks", cmd_selftest},
  };
  for (const Command& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  }

  const Command* chosen = nullptr;
  for (const Command& c : commands)
    if (app.got_subcommand(c.name)) chosen = &c;

  Table table;
  try {
    table = chosen->run(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::ConfigError:
      case ErrorCode::InvalidParams:
      case ErrorCode::DegenerateCoupling:
      case ErrorCode::BadSolidAngle:
      case ErrorCode::BadTheta:
      case ErrorCode::WrongExcitation:
      case ErrorCode::DimensionBudget:
        return kConfig;
      case ErrorCode::NonAdiabatic:
        return kAdiabaticity;
      default:
        return kFailure;
    }
  }

  const std::string text = cfg.format == "json" ? to_json(table, cfg) : to_csv(table);
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return kFailure;
    }
    file << text;
  }
  if (table.crosscheck_failed) err << "warning: cross-check beyond tolerance\n";
  if (table.adiabatic_failed) err << "warning: adiabaticity budget failed\n";
  if (std::string(chosen->name) == "selftest" && table.crosscheck_failed) return kCrossCheck;
  if (cfg.strict && table.adiabatic_failed) return kAdiabaticity;
  if (cfg.strict && table.crosscheck_failed) return kCrossCheck;
  return kOk;
}

}  // namespace jcanyon::cli
