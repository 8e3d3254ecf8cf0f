#pragma once

// Run configuration, command bodies and serialization for the sdira tool.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sdira/certification.hpp"
#include "sdira/eat.hpp"
#include "sdira/extractor.hpp"
#include "sdira/quantum.hpp"
#include "sdira/simulation.hpp"

namespace sdira::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kValidation = 2, kComputation = 3, kInsufficient = 4 };

struct RunConfig {
  std::optional<double> delta;
  /// Grid for bounds; empty falls back to delta, then to the default grid.
  std::vector<double> deltas;
  std::optional<double> omega0;
  std::optional<double> omega1;
  std::size_t n = 1000000;
  /// 0 selects the extractor input length.
  std::size_t d = 0;
  std::size_t m = 64;
  std::optional<double> gamma_est;
  std::optional<double> i_exp;
  double eps_s = 1e-6;
  double eps_ext = 1e-6;
  double eps_eat = 1e-6;
  std::uint64_t seed = 1;
  std::size_t runs = 1;
  std::string out;
  std::string format = "csv";
  std::string device = "honest";
  std::size_t vertex = 0;
  std::string source = "uniform";
  std::string eps_k = "zero";
  std::string slope = "f-delta";
  bool transcripts = true;
  std::string a;
  std::string z;
  std::size_t threads = 0;

  double delta_or(double fallback) const { return delta.value_or(fallback); }
  std::size_t padded_n() const { return n % 2 == 0 ? n + 1 : n; }
  std::size_t second_length() const { return d == 0 ? padded_n() : d; }
};

namespace detail {
inline bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

template <class T>
std::string show(const T& v) {
  std::ostringstream s;
  s << v;
  return s.str();
}
}  // namespace detail

/// Every out-of-range field, each with its bound; throws ValidationError if any.
inline void validate(const RunConfig& c) {
  std::vector<std::string> errs;
  auto bias = [&](const std::string& name, double v) {
    if (!(v >= 0.0 && v < 0.5)) errs.push_back(name + " = " + detail::show(v) + " must lie in [0, 0.5)");
  };
  if (c.delta) bias("delta", *c.delta);
  for (double v : c.deltas) bias("deltas entry", v);
  for (const auto& [name, v] : {std::pair{"omega0", c.omega0}, std::pair{"omega1", c.omega1}}) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) errs.push_back(std::string(name) + " = " + detail::show(*v) + " must be finite and > 0");
  }
  if (c.omega0.has_value() != c.omega1.has_value()) errs.push_back("omega0 and omega1 must be given together");
  if (c.n < 1) errs.push_back("n = 0 must be >= 1");
  if (c.d != 0 && c.d != c.padded_n()) {
    errs.push_back("d = " + detail::show(c.d) + " must equal the extractor input length " + detail::show(c.padded_n()));
  }
  if (c.m > c.padded_n()) errs.push_back("m = " + detail::show(c.m) + " must be <= " + detail::show(c.padded_n()));
  if (c.gamma_est && !(*c.gamma_est >= 0.0 && std::isfinite(*c.gamma_est))) {
    errs.push_back("gamma_est = " + detail::show(*c.gamma_est) + " must be finite and >= 0");
  }
  if (c.i_exp && !std::isfinite(*c.i_exp)) errs.push_back("i_exp must be finite");
  for (const auto& [name, v] : {std::pair{"eps_s", c.eps_s}, std::pair{"eps_ext", c.eps_ext}, std::pair{"eps_eat", c.eps_eat}}) {
    if (!detail::in_open_unit(v)) errs.push_back(std::string(name) + " = " + detail::show(v) + " must lie in (0, 1)");
  }
  if (c.runs < 1) errs.push_back("runs = 0 must be >= 1");
  if (c.format != "csv" && c.format != "json") errs.push_back("format = " + c.format + " must be csv or json");
  if (c.device != "honest" && c.device != "vertex") errs.push_back("device = " + c.device + " must be honest or vertex");
  if (c.source != "uniform" && c.source != "fixed-bias" && c.source != "greedy") {
    errs.push_back("source = " + c.source + " must be uniform, fixed-bias or greedy");
  }
  if (c.eps_k != "zero" && c.eps_k != "literal") errs.push_back("eps_k = " + c.eps_k + " must be zero or literal");
  if (c.slope != "f-delta" && c.slope != "derivative") errs.push_back("slope = " + c.slope + " must be f-delta or derivative");
  if (c.vertex > 5) errs.push_back("vertex = " + detail::show(c.vertex) + " must be <= 5");
  if (errs.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw ValidationError(msg);
}

inline RunConfig config_from_json(const Json& j, RunConfig c = {}) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "delta") c.delta = v.get<double>();
      else if (key == "deltas") c.deltas = v.get<std::vector<double>>();
      else if (key == "omega0") c.omega0 = v.get<double>();
      else if (key == "omega1") c.omega1 = v.get<double>();
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "d") c.d = v.get<std::size_t>();
      else if (key == "m") c.m = v.get<std::size_t>();
      else if (key == "gamma_est") c.gamma_est = v.get<double>();
      else if (key == "i_exp") c.i_exp = v.get<double>();
      else if (key == "eps_s") c.eps_s = v.get<double>();
      else if (key == "eps_ext") c.eps_ext = v.get<double>();
      else if (key == "eps_eat") c.eps_eat = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "runs") c.runs = v.get<std::size_t>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "device") c.device = v.get<std::string>();
      else if (key == "vertex") c.vertex = v.get<std::size_t>();
      else if (key == "source") c.source = v.get<std::string>();
      else if (key == "eps_k") c.eps_k = v.get<std::string>();
      else if (key == "slope") c.slope = v.get<std::string>();
      else if (key == "transcripts") c.transcripts = v.get<bool>();
      else if (key == "a") c.a = v.get<std::string>();
      else if (key == "z") c.z = v.get<std::string>();
      else if (key == "threads") c.threads = v.get<std::size_t>();
      else throw ValidationError("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config value has the wrong type: ") + e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path, RunConfig c = {}) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j, std::move(c));
}

/// 17 significant digits, enough to round-trip a double.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write output file " + path);
  out << text;
  if (!out) throw ValidationError("failed writing output file " + path);
}

// ---------------------------------------------------------------- bounds

struct BoundsRow {
  double delta = 0.0;
  std::optional<double> f;
  std::optional<double> g;
  std::optional<double> omega0_opt;
  std::optional<double> omega1_opt;
  std::optional<double> i_opt;
};

inline const char* kBoundsHeader = "delta,f,g,omega0_opt,omega1_opt,I_opt";

inline std::string bounds_csv(const std::vector<BoundsRow>& rows) {
  auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  std::string s = std::string(kBoundsHeader) + "\n";
  for (const auto& r : rows) {
    s += format_number(r.delta) + "," + cell(r.f) + "," + cell(r.g) + "," + cell(r.omega0_opt) + "," +
         cell(r.omega1_opt) + "," + cell(r.i_opt) + "\n";
  }
  return s;
}

inline std::vector<BoundsRow> parse_bounds_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kBoundsHeader) throw ValidationError("unexpected bounds CSV header");
  std::vector<BoundsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    cells.push_back(cur);
    if (cells.size() != 6) throw ValidationError("bounds CSV row has " + std::to_string(cells.size()) + " cells");
    auto num = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return std::stod(s);
    };
    BoundsRow r;
    r.delta = std::stod(cells[0]);
    r.f = num(cells[1]);
    r.g = num(cells[2]);
    r.omega0_opt = num(cells[3]);
    r.omega1_opt = num(cells[4]);
    r.i_opt = num(cells[5]);
    rows.push_back(r);
  }
  return rows;
}

inline Json bounds_json(const std::vector<BoundsRow>& rows) {
  auto cell = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json arr = Json::array();
  for (const auto& r : rows) {
    arr.push_back({{"delta", r.delta},
                   {"f", cell(r.f)},
                   {"g", cell(r.g)},
                   {"omega0_opt", cell(r.omega0_opt)},
                   {"omega1_opt", cell(r.omega1_opt)},
                   {"I_opt", cell(r.i_opt)}});
  }
  return arr;
}

inline std::vector<double> bounds_grid(const RunConfig& c) {
  if (!c.deltas.empty()) return c.deltas;
  if (c.delta) return {*c.delta};
  return default_delta_grid();
}

/// One row per grid point, in grid order; failures are reported on err.
inline std::vector<BoundsRow> compute_bounds(const RunConfig& c, std::ostream& err) {
  const auto grid = bounds_grid(c);
  const std::size_t workers =
      std::max<std::size_t>(1, c.threads ? c.threads : std::min<std::size_t>(8, std::thread::hardware_concurrency()));
  std::vector<std::pair<MinEntropyPoint, MinEntropyPoint>> pts(grid.size());
  for (std::size_t start = 0; start < grid.size(); start += workers) {
    std::vector<std::future<std::pair<MinEntropyPoint, MinEntropyPoint>>> jobs;
    for (std::size_t i = start; i < std::min(grid.size(), start + workers); ++i) {
      jobs.push_back(std::async(std::launch::async, [d = grid[i]] {
        return std::pair{min_entropy_point(d, CurveKind::kGeneral), min_entropy_point(d, CurveKind::kUniform)};
      }));
    }
    for (std::size_t k = 0; k < jobs.size(); ++k) pts[start + k] = jobs[k].get();
  }
  std::vector<BoundsRow> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& [f, g] = pts[i];
    BoundsRow r;
    r.delta = grid[i];
    if (f.failed) {
      err << "warning: f failed at delta " << format_number(grid[i]) << ": " << f.error << "\n";
    } else {
      r.f = f.value;
      r.omega0_opt = f.omega_opt.omega0;
      r.omega1_opt = f.omega_opt.omega1;
      r.i_opt = f.i_opt;
    }
    if (g.failed) {
      err << "warning: g failed at delta " << format_number(grid[i]) << ": " << g.error << "\n";
    } else {
      r.g = g.value;
    }
    rows.push_back(r);
  }
  return rows;
}

inline int cmd_bounds(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  const auto rows = compute_bounds(c, err);
  const std::string text = c.format == "json" ? bounds_json(rows).dump(2) + "\n" : bounds_csv(rows);
  if (!c.out.empty()) write_file(c.out, text);
  out << text;
  return kOk;
}

// ---------------------------------------------------------------- eat

inline Json eat_report(const RunConfig& c) {
  const double delta = c.delta_or(0.1);
  TradeoffOptions topt;
  topt.slope = c.slope == "derivative" ? SlopeRule::kDerivative : SlopeRule::kFDelta;
  const auto tf = c.omega0 ? build_tradeoff_at(delta, EnergyBound(*c.omega0, *c.omega1), topt) : build_tradeoff(delta, topt);
  ProtocolParameters p;
  p.delta = delta;
  p.omega = tf.omega;
  p.n = c.n;
  p.d = c.second_length();
  p.m = c.m;
  p.i_exp = c.i_exp.value_or(tf.i_opt);
  const double bound_b = mdl_bound(delta, tf.omega);
  p.gamma_est = c.gamma_est.value_or(0.02 * std::abs(bound_b - p.i_exp));
  p.eps_s = c.eps_s;
  p.eps_ext = c.eps_ext;
  p.eps_eat = c.eps_eat;
  EatOptions eopt;
  eopt.zero_eps_k = c.eps_k == "zero";
  const auto r = finite_size_report(tf, p, eopt);

  auto bound_json = [](const SmoothBound& b) {
    return Json{{"eval_point", b.eval_point}, {"rate", b.rate}, {"raw", number_or_null(b.raw)}, {"bits", b.bits},
                {"clamped", b.clamped}};
  };
  Json warnings = Json::array();
  if (r.bound.terms.eps_k_zeroed) warnings.push_back("eps_K replaced by 0");
  if (r.bound.terms.eps_k_sign_warning) warnings.push_back("eps_K uses |1 - sqrt(n)|^3 in place of (1 - sqrt(n))^3");
  if (r.bound.terms.eps_k_overflow) warnings.push_back("eps_K overflows double precision");
  if (r.gamma_sign_discrepancy) warnings.push_back("entropy bound uses I_exp + gamma_est, k1 uses I_exp - gamma_est");
  if (p.i_exp > tf.i_opt) warnings.push_back("i_exp exceeds the optimizer value I_opt");

  Json j;
  j["command"] = "eat";
  j["params"] = {{"delta", p.delta},     {"omega0", p.omega.omega0}, {"omega1", p.omega.omega1}, {"n", p.n},
                 {"d", p.d},             {"m", p.m},                 {"i_exp", p.i_exp},         {"gamma_est", p.gamma_est},
                 {"eps_s", p.eps_s},     {"eps_ext", p.eps_ext},     {"eps_eat", p.eps_eat},     {"eps_k", c.eps_k},
                 {"slope", c.slope}};
  j["tradeoff"] = {{"f_delta", tf.f_delta}, {"alpha", tf.alpha},     {"slope_coeff", tf.slope_coeff},
                   {"i_opt", tf.i_opt},     {"mu", tf.mu},           {"bound", bound_b},
                   {"min", tf.min_val},     {"max", tf.max_val},     {"spread", tf.spread()}};
  j["eat_terms"] = {{"eps_V", r.bound.terms.eps_V},
                    {"eps_K", number_or_null(r.bound.terms.eps_K)},
                    {"eps_Omega", r.bound.terms.eps_Omega},
                    {"p_Omega", r.bound.terms.p_Omega}};
  j["entropy_bound"] = bound_json(r.bound);
  j["k1_bound"] = bound_json(r.k1_bound);
  j["extractor"] = {{"k1", number_or_null(r.k1_bits)}, {"k2", r.k2_bits}, {"m", p.m}, {"d", p.d}, {"eps_ext", p.eps_ext}};
  j["security"] = {{"soundness", r.security.soundness_bound},
                   {"completeness", r.security.completeness_bound},
                   {"soundness_clamped", r.security.soundness_clamped},
                   {"completeness_clamped", r.security.completeness_clamped}};
  j["insufficient_entropy"] = r.insufficient;
  if (r.insufficient) j["insufficient_reason"] = r.insufficient_reason;
  j["warnings"] = warnings;
  return j;
}

inline int cmd_eat(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  const auto j = eat_report(c);
  const std::string text = j.dump(2) + "\n";
  if (!c.out.empty()) write_file(c.out, text);
  out << text;
  if (j["insufficient_entropy"].get<bool>()) throw InsufficientEntropyError(j["insufficient_reason"].get<std::string>());
  for (const auto& w : j["warnings"]) err << "warning: " << w.get<std::string>() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- simulate

inline Json transcript_json(const ProtocolTranscript& t) {
  Json j;
  j["xs"] = t.xs;
  j["as"] = t.as;
  j["cs"] = t.cs;
  j["c_bar"] = t.c_bar;
  j["aborted"] = t.aborted;
  j["z"] = t.has_key ? Json(t.z.to_hex()) : Json(nullptr);
  j["k"] = t.has_key ? Json(t.k.to_hex()) : Json(nullptr);
  const auto& p = t.params;
  j["params"] = {{"n", p.n},         {"d", p.second_length()}, {"m", p.m},
                 {"delta", p.delta}, {"omega0", p.omega.omega0}, {"omega1", p.omega.omega1},
                 {"i_exp", p.i_exp}, {"gamma_est", p.gamma_est}, {"eps_ext", p.eps_ext},
                 {"source", t.source_kind}, {"device", t.device_kind}};
  j["seeds"] = {{"source", t.source_seed}, {"device", t.device_seed}};
  j["sv_audit_passed"] = t.sv_audit_passed;
  return j;
}

struct SimulationSetup {
  ProtocolConfig protocol;
  QuantumStrategy strategy;
  Behaviour declared{1, 0, 0, 1};
};

inline SimulationSetup simulation_setup(const RunConfig& c) {
  const double delta = c.delta_or(0.1);
  InnerMinimum witness;
  EnergyBound omega;
  if (c.omega0) {
    omega = EnergyBound(*c.omega0, *c.omega1);
    witness = minimize_at(delta, FunctionalKind::kUnif, omega);
  } else {
    const auto v = optimize_violation(delta, FunctionalKind::kUnif);
    omega = v.omega_opt;
    witness = {v.value, v.strategy};
  }
  SimulationSetup s;
  s.strategy = witness.strategy;
  s.protocol.n = c.n;
  s.protocol.d = c.d;
  s.protocol.m = c.m;
  s.protocol.delta = delta;
  s.protocol.omega = omega;
  s.protocol.eps_ext = c.eps_ext;
  s.protocol.i_exp = c.i_exp.value_or(witness.value);
  s.protocol.gamma_est = c.gamma_est.value_or(0.02 * std::abs(mdl_bound(delta, omega) - s.protocol.i_exp));
  if (c.device == "honest") {
    s.declared = strategy_behaviour(witness.strategy);
  } else {
    const auto vs = classical_vertices(omega).vertices;
    if (c.vertex >= vs.size()) {
      throw ValidationError("vertex = " + std::to_string(c.vertex) + " must be < " + std::to_string(vs.size()));
    }
    s.declared = vs[c.vertex];
  }
  return s;
}

inline ProtocolTranscript simulate_run(const RunConfig& c, const SimulationSetup& s, std::size_t run) {
  const std::uint64_t run_seed = c.seed + run;
  const auto& p = s.protocol;
  auto device = c.device == "honest" ? DeviceModel::honest(s.strategy, p.omega, run_seed)
                                     : DeviceModel::classical_vertex(c.vertex, p.omega, run_seed);
  auto source = c.source == "uniform"      ? SourceModel::uniform(run_seed)
                : c.source == "fixed-bias" ? SourceModel::fixed_bias(p.delta, run_seed)
                                           : adversarial_source_greedy(p.delta, evasion_target(s.declared, p.delta, p.omega), run_seed);
  return run_protocol(source, device, p);
}

inline int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  const auto setup = simulation_setup(c);
  Json summary = Json::array();
  std::string csv = "run,aborted,c_bar,k_hash\n";
  std::size_t aborted = 0;
  for (std::size_t r = 0; r < c.runs; ++r) {
    ProtocolTranscript t;
    try {
      t = simulate_run(c, setup, r);
    } catch (const ContractViolation& e) {
      throw ContractViolation("run " + std::to_string(r) + ": " + e.what());
    }
    aborted += t.aborted;
    char hash[32] = "";
    if (t.has_key) std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a(t.k));
    csv += std::to_string(r) + "," + (t.aborted ? "1" : "0") + "," + format_number(t.c_bar) + "," + hash + "\n";
    summary.push_back({{"run", r}, {"aborted", t.aborted}, {"c_bar", t.c_bar}, {"k_hash", hash}});
    if (!c.out.empty() && c.transcripts) {
      char name[32];
      std::snprintf(name, sizeof name, "run_%04zu.json", r);
      write_file((std::filesystem::path(c.out) / name).string(), transcript_json(t).dump() + "\n");
    }
  }
  const std::string text = c.format == "json" ? summary.dump(2) + "\n" : csv;
  if (!c.out.empty()) write_file((std::filesystem::path(c.out) / (c.format == "json" ? "summary.json" : "summary.csv")).string(), text);
  out << text;
  err << "aborted " << aborted << " of " << c.runs << " runs (i_exp " << format_number(setup.protocol.i_exp)
      << ", gamma_est " << format_number(setup.protocol.gamma_est) << ")\n";
  return kOk;
}

// ---------------------------------------------------------------- extract

inline int cmd_extract(const RunConfig& c, std::ostream& out, std::ostream&) {
  validate(c);
  if (c.a.empty() || c.z.empty()) throw ValidationError("extract needs both --a and --z");
  BitString a, z;
  try {
    a = BitString::from_hex(c.a);
    z = BitString::from_hex(c.z);
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  if (a.size() % 2 == 0) a.push_back(0);
  if (z.size() != a.size()) {
    throw ValidationError("z has " + std::to_string(z.size()) + " bits; the padded A has " + std::to_string(a.size()));
  }
  if (c.m > a.size()) throw ValidationError("m = " + std::to_string(c.m) + " must be <= " + std::to_string(a.size()));
  const auto k = extract(a, z, {a.size(), z.size(), c.m});
  std::string text;
  if (c.format == "json") {
    text = Json{{"n", a.size()}, {"m", c.m}, {"k", k.to_hex()}}.dump(2) + "\n";
  } else {
    text = "n,m,k\n" + std::to_string(a.size()) + "," + std::to_string(c.m) + "," + k.to_hex() + "\n";
  }
  if (!c.out.empty()) write_file(c.out, text);
  out << text;
  return kOk;
}

}  // namespace sdira::cli
