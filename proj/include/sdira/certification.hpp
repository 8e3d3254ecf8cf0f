#pragma once

// Guessing-probability bound eta(delta, omega, I), its supporting line, and
// the certified single-round min-entropy curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sdira/behaviours.hpp"
#include "sdira/errors.hpp"
#include "sdira/lp.hpp"
#include "sdira/nelder_mead.hpp"
#include "sdira/quantum.hpp"
#include "sdira/rng.hpp"

namespace sdira {

/// Per-cell coefficients of the lower functional, cell() ordering.
inline std::array<double, 4> lower_coefficients(double delta, const EnergyBound& omega) {
  const double mu = mdl_mu(delta, omega);
  const double agree = (0.5 - delta) * mu;
  const double differ = -(0.5 + delta) / mu;
  return {agree, differ, differ, agree};
}

/// (1/2-delta) mu [p(0|0)+p(1|1)] - ((1/2+delta)/mu) [p(1|0)+p(0|1)]
template <class B>
double functional_lower(const B& b, double delta, const EnergyBound& omega) {
  const auto c = lower_coefficients(delta, omega);
  const auto& p = b.values();
  return c[0] * p[0] + c[1] * p[1] + c[2] * p[2] + c[3] * p[3];
}

struct GuessingOptions {
  /// Energy grid per axis used when pricing new branch strategies.
  int energy_grid = 41;
  int max_iterations = 400;
  double price_tol = 1e-9;
  std::size_t refine_iters = 200;
  /// Stop once the LP value has not improved by more than 1e-12 for this many rounds.
  int stall_rounds = 25;
};

/// Four weighted branches, branch k = cell(a, x) guessing outcome a on input x.
struct GuessingProgram {
  double delta = 0.0;
  EnergyBound omega;
  double i_constraint = 0.0;
  std::array<SubBehaviour, 4> branches{SubBehaviour({0, 0, 0, 0}), SubBehaviour({0, 0, 0, 0}),
                                       SubBehaviour({0, 0, 0, 0}), SubBehaviour({0, 0, 0, 0})};
  std::array<EnergyBound, 4> allocations{};

  static GuessingProgram from_strategies(double delta, const EnergyBound& omega, double i_constraint,
                                         const std::array<double, 4>& weights,
                                         const std::array<QuantumStrategy, 4>& strategies) {
    GuessingProgram g;
    g.delta = delta;
    g.omega = omega;
    g.i_constraint = i_constraint;
    for (std::size_t k = 0; k < 4; ++k) {
      g.branches[k] = SubBehaviour::scaled(strategy_behaviour(strategies[k]), weights[k]);
      g.allocations[k] = EnergyBound(weights[k] * strategies[k].eps0, weights[k] * strategies[k].eps1);
    }
    return g;
  }

  double score() const {
    double s = 0.0;
    for (int x = 0; x < 2; ++x) {
      for (int a = 0; a < 2; ++a) s += branches[cell(a, x)](a, x);
    }
    return s;
  }

  double lower_value() const {
    double s = 0.0;
    for (const auto& b : branches) s += functional_lower(b, delta, omega);
    return s;
  }

  bool feasible(double tol = tol::kInequality) const {
    double e0 = 0.0, e1 = 0.0, mass = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      e0 += allocations[k].omega0;
      e1 += allocations[k].omega1;
      mass += branches[k].weight();
    }
    return e0 <= omega.omega0 + tol && e1 <= omega.omega1 + tol && std::abs(mass - 1.0) <= tol &&
           lower_value() <= i_constraint + tol * std::max(1.0, std::abs(i_constraint));
  }
};

namespace detail {

struct Atom {
  int k = 0;
  QuantumStrategy strategy;
  Behaviour behaviour{1, 0, 1, 0};
};

struct ColumnResult {
  double value = 0.0;
  std::vector<Atom> atoms;
  std::vector<double> weights;
  std::vector<double> duals;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
  double max_reduced_cost = 0.0;
};

inline Atom make_atom(int k, const QuantumStrategy& s) { return Atom{k, s, strategy_behaviour(s)}; }

/// Best measurement for the linear functional sum_{a,x} C[a,x] p(a|x) at
/// populations (e0, e1); returns the value and the strategy attaining it.
inline std::pair<double, QuantumStrategy> best_response(const std::array<double, 4>& C, double e0, double e1) {
  const double d0 = C[cell(0, 0)] - C[cell(1, 0)];
  const double d1 = C[cell(0, 1)] - C[cell(1, 1)];
  const double phi = (d0 * d1 < 0.0) ? std::numbers::pi : 0.0;
  const double a0 = std::sqrt(e0 * (1.0 - e0));
  const double a1 = std::sqrt(e1 * (1.0 - e1)) * std::cos(phi);
  const double k11 = d0 * (1.0 - e0) + d1 * (1.0 - e1);
  const double k22 = d0 * e0 + d1 * e1;
  const double k12 = d0 * a0 + d1 * a1;
  const double lmax = 0.5 * (k11 + k22 + std::hypot(k11 - k22, 2.0 * k12));
  const double theta = 0.5 * std::atan2(2.0 * k12, k11 - k22);
  return {C[cell(1, 0)] + C[cell(1, 1)] + lmax, QuantumStrategy{e0, e1, phi, theta, 0.0}};
}

/// Column generation over branch strategies for
///   maximize sum_j w_j obj_k(j) . p_j
///   s.t. sum_j w_j il(p_j) <= I (optional), sum_j w_j e_j <= omega, sum_j w_j = 1.
inline ColumnResult column_generation(double delta, const EnergyBound& omega,
                                      const std::vector<std::array<double, 4>>& objective,
                                      std::optional<double> i_ceiling, std::vector<Atom> atoms,
                                      const GuessingOptions& opt) {
  const auto il = lower_coefficients(delta, omega);
  const bool with_i = i_ceiling.has_value();
  const std::size_t rows = with_i ? 4 : 3;
  auto dot = [](const std::array<double, 4>& c, const Behaviour& b) {
    return c[0] * b.values()[0] + c[1] * b.values()[1] + c[2] * b.values()[2] + c[3] * b.values()[3];
  };

  ColumnResult out;
  double best_value = -std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  lp::Options lp_opt;
  lp_opt.feasibility_tol = 1e-10;
  for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
    lp::Problem prob;
    prob.objective.resize(atoms.size());
    std::vector<std::vector<double>> cols(rows, std::vector<double>(atoms.size()));
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const auto& at = atoms[j];
      prob.objective[j] = dot(objective[static_cast<std::size_t>(at.k)], at.behaviour);
      std::size_t r = 0;
      if (with_i) cols[r++][j] = dot(il, at.behaviour);
      cols[r++][j] = at.strategy.eps0;
      cols[r++][j] = at.strategy.eps1;
      cols[r][j] = 1.0;
    }
    std::size_t r = 0;
    if (with_i) prob.add_row(cols[r++], lp::Sense::kLessEqual, *i_ceiling);
    prob.add_row(cols[r++], lp::Sense::kLessEqual, omega.omega0);
    prob.add_row(cols[r++], lp::Sense::kLessEqual, omega.omega1);
    prob.add_row(cols[r], lp::Sense::kEqual, 1.0);

    const auto sol = lp::solve(prob, lp_opt);
    if (sol.status == lp::Status::kInfeasible) throw InfeasibleError("I below quantum minimum");
    if (sol.status != lp::Status::kOptimal) throw ComputationError("guessing LP did not reach optimality");
    out.value = sol.objective;
    out.weights = sol.x;
    out.duals = sol.duals;

    const double yi = with_i ? sol.duals[0] : 0.0;
    const double y0 = sol.duals[rows - 3];
    const double y1 = sol.duals[rows - 2];
    const double yn = sol.duals[rows - 1];

    double best_rc = -std::numeric_limits<double>::infinity();
    Atom best_atom;
    for (std::size_t k = 0; k < objective.size(); ++k) {
      std::array<double, 4> C{};
      for (std::size_t c = 0; c < 4; ++c) C[c] = objective[k][c] - yi * il[c];
      auto price = [&](double e0, double e1) { return best_response(C, e0, e1).first - y0 * e0 - y1 * e1 - yn; };
      const int g = opt.energy_grid;
      double gbest = -std::numeric_limits<double>::infinity();
      double be0 = 0.0, be1 = 0.0;
      for (int i = 0; i < g; ++i) {
        for (int jj = 0; jj < g; ++jj) {
          const double e0 = double(i) / (g - 1);
          const double e1 = double(jj) / (g - 1);
          const double v = price(e0, e1);
          if (v > gbest) {
            gbest = v;
            be0 = e0;
            be1 = e1;
          }
        }
      }
      opt::NelderMeadOptions nm;
      nm.max_iterations = opt.refine_iters;
      nm.x_tol = 1e-12;
      nm.f_tol = 1e-15;
      nm.initial_step = 0.5 / (g - 1);
      const auto refined = opt::nelder_mead([&](const std::vector<double>& x) { return -price(x[0], x[1]); },
                                            {be0, be1}, opt::Box{{0.0, 0.0}, {1.0, 1.0}}, nm);
      if (-refined.value > gbest) {
        gbest = -refined.value;
        be0 = refined.x[0];
        be1 = refined.x[1];
      }
      if (gbest > best_rc) {
        best_rc = gbest;
        best_atom = make_atom(static_cast<int>(k), best_response(C, be0, be1).second);
      }
    }
    out.max_reduced_cost = best_rc;
    if (best_rc <= opt.price_tol) {
      out.converged = true;
      break;
    }
    if (sol.objective > best_value + 1e-12) {
      best_value = sol.objective;
      since_improvement = 0;
    } else if (++since_improvement >= opt.stall_rounds) {
      out.stalled = true;
      break;
    }
    atoms.push_back(best_atom);
  }
  // Keep only the support of the final mixture.
  std::vector<Atom> support;
  std::vector<double> w;
  for (std::size_t j = 0; j < out.weights.size(); ++j) {
    if (out.weights[j] > 0.0) {
      support.push_back(atoms[j]);
      w.push_back(out.weights[j]);
    }
  }
  out.atoms = std::move(support);
  out.weights = std::move(w);
  return out;
}

inline std::vector<Atom> seed_atoms(int num_k, const EnergyBound& omega) {
  const double e0 = std::min(1.0, omega.omega0);
  const double e1 = std::min(1.0, omega.omega1);
  const double theta = discriminating_angle(e0, e1, std::numbers::pi);
  std::vector<Atom> atoms;
  for (int k = 0; k < num_k; ++k) {
    atoms.push_back(make_atom(k, {0.0, 0.0, 0.0, 0.0, 0.0}));
    atoms.push_back(make_atom(k, {0.0, 0.0, 0.0, 0.5 * std::numbers::pi, 0.0}));
    atoms.push_back(make_atom(k, {e0, e1, std::numbers::pi, theta, 0.0}));
    atoms.push_back(make_atom(k, {e0, e1, std::numbers::pi, theta + 0.5 * std::numbers::pi, 0.0}));
  }
  return atoms;
}

inline std::vector<std::array<double, 4>> guess_objectives() {
  std::vector<std::array<double, 4>> obj(4, std::array<double, 4>{});
  for (std::size_t k = 0; k < 4; ++k) obj[k][k] = 1.0;
  return obj;
}

}  // namespace detail

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Range of the lower functional over mixtures of quantum strategies in Q_omega.
inline Interval achievable_range(double delta, const EnergyBound& omega, const GuessingOptions& opt = {}) {
  const auto il = lower_coefficients(delta, omega);
  std::array<double, 4> neg{};
  for (std::size_t c = 0; c < 4; ++c) neg[c] = -il[c];
  const auto lo = detail::column_generation(delta, omega, {neg}, std::nullopt, detail::seed_atoms(1, omega), opt);
  const auto hi = detail::column_generation(delta, omega, {il}, std::nullopt, detail::seed_atoms(1, omega), opt);
  if (!(lo.converged || lo.stalled) || !(hi.converged || hi.stalled)) throw ComputationError("achievable_range: column generation did not converge");
  return {-lo.value, hi.value};
}

struct GuessingBound {
  double h = 0.0;
  /// (1/2 + delta) h
  double eta = 0.0;
  double i_constraint = 0.0;
  double i_min = 0.0;
  /// LP price of the I constraint, i.e. dh/dI.
  double dual_slope = 0.0;
  /// Largest reduced cost left by pricing; h + gap bounds the true maximum.
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Pricing kept finding columns that no longer moved the LP value.
  bool stalled = false;
  std::vector<int> branch;
  std::vector<QuantumStrategy> strategies;
  std::vector<double> weights;
};

/// h(I) = max sum_k p_k(a_k|x_k) over four-branch mixtures with
/// sum_k I_lower(p_k) <= I and the averaged energy bound.
inline GuessingBound guessing_bound(double delta, const EnergyBound& omega, double i_constraint,
                                    const GuessingOptions& opt = {}) {
  check_bias(delta);
  (void)mdl_mu(delta, omega);
  if (!std::isfinite(i_constraint)) throw DomainError("I must be finite");
  const auto il = lower_coefficients(delta, omega);
  std::array<double, 4> neg{};
  for (std::size_t c = 0; c < 4; ++c) neg[c] = -il[c];
  const auto floor = detail::column_generation(delta, omega, {neg}, std::nullopt, detail::seed_atoms(1, omega), opt);
  const double i_min = -floor.value;
  const double scale = std::max(1.0, std::abs(i_min));
  if (i_constraint < i_min - tol::kInequality * scale) throw InfeasibleError("I below quantum minimum");

  auto atoms = detail::seed_atoms(4, omega);
  for (const auto& a : floor.atoms) {
    for (int k = 0; k < 4; ++k) atoms.push_back(detail::make_atom(k, a.strategy));
  }
  const double ceiling = std::max(i_constraint, i_min + 1e-13 * scale);
  const auto res = detail::column_generation(delta, omega, detail::guess_objectives(), ceiling, std::move(atoms), opt);

  GuessingBound out;
  out.h = std::min(1.0, res.value);
  out.eta = (0.5 + delta) * out.h;
  out.i_constraint = i_constraint;
  out.i_min = i_min;
  out.dual_slope = res.duals.empty() ? 0.0 : res.duals[0];
  out.gap = std::max(0.0, res.max_reduced_cost);
  out.iterations = res.iterations;
  out.converged = res.converged;
  out.stalled = res.stalled;
  for (std::size_t j = 0; j < res.atoms.size(); ++j) {
    out.branch.push_back(res.atoms[j].k);
    out.strategies.push_back(res.atoms[j].strategy);
    out.weights.push_back(res.weights[j]);
  }
  return out;
}

inline double eta(double delta, const EnergyBound& omega, double i_constraint, const GuessingOptions& opt = {}) {
  return guessing_bound(delta, omega, i_constraint, opt).eta;
}

struct DualLine {
  double alpha = 0.0;
  double beta_dot_omega = 0.0;
  double anchor_I = 0.0;
  double h_anchor = 0.0;
  /// Amount added to beta_dot_omega after the support re-check.
  double inflation = 0.0;
  /// Slope read off the LP dual at the anchor.
  double lp_alpha = 0.0;
  Interval range;

  double operator()(double i) const { return alpha * i + beta_dot_omega; }
};

/// Supporting affine upper bound of h at anchor_I.
inline DualLine dual_line(double delta, const EnergyBound& omega, double anchor_I, const GuessingOptions& opt = {},
                          int samples = 64) {
  const Interval range = achievable_range(delta, omega, opt);
  const double scale = std::max(1.0, std::abs(range.lo));
  if (anchor_I < range.lo - tol::kInequality * scale || anchor_I > range.hi + tol::kInequality * scale) {
    throw DomainError("anchor I outside the achievable range");
  }
  auto h = [&](double i) { return guessing_bound(delta, omega, i, opt).h; };
  DualLine line;
  line.range = range;
  line.anchor_I = anchor_I;
  const auto at_anchor = guessing_bound(delta, omega, anchor_I, opt);
  line.h_anchor = at_anchor.h;
  line.lp_alpha = at_anchor.dual_slope;
  const double step = 1e-3 * range.width();
  const double lo = std::max(range.lo, anchor_I - step);
  const double hi = std::min(range.hi, anchor_I + step);
  if (hi - lo <= 0.0) throw ComputationError("dual_line: degenerate achievable range");
  const double h_lo = (lo == anchor_I) ? line.h_anchor : h(lo);
  const double h_hi = (hi == anchor_I) ? line.h_anchor : h(hi);
  // h is non-decreasing; a negative difference is solver noise.
  line.alpha = std::max(0.0, (h_hi - h_lo) / (hi - lo));
  line.beta_dot_omega = line.h_anchor - line.alpha * anchor_I;

  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double i = range.lo + range.width() * s / (samples - 1);
    worst = std::max(worst, h(i) - line(i));
  }
  if (worst > 0.0) {
    line.inflation = worst + 1e-9;
    line.beta_dot_omega += line.inflation;
  }
  return line;
}

// ---------------------------------------------------------------------------
// Min-entropy curves

enum class CurveKind { kGeneral, kUniform };

inline const char* to_string(CurveKind k) { return k == CurveKind::kGeneral ? "f" : "g"; }

struct CurveConfig {
  SearchConfig search;
  GuessingOptions guessing;
};

struct MinEntropyPoint {
  double delta = 0.0;
  /// Certified bits, clamped to [0, 1].
  double value = 0.0;
  /// -log2 eta before clamping.
  double raw = 0.0;
  bool clamped = false;
  bool failed = false;
  std::string error;
  EnergyBound omega_opt;
  double i_opt = 0.0;
  double eta = 0.0;
};

struct MinEntropyCurve {
  CurveKind kind = CurveKind::kGeneral;
  std::vector<double> deltas;
  std::vector<double> values;
  std::vector<MinEntropyPoint> points;
};

inline MinEntropyPoint min_entropy_point(double delta, CurveKind kind, const CurveConfig& cfg = {}) {
  MinEntropyPoint pt;
  pt.delta = delta;
  try {
    const auto v =
        optimize_violation(delta, kind == CurveKind::kGeneral ? FunctionalKind::kUpper : FunctionalKind::kUnif, cfg.search);
    pt.omega_opt = v.omega_opt;
    pt.i_opt = v.value;
    pt.eta = eta(delta, v.omega_opt, v.value, cfg.guessing);
    pt.raw = -std::log2(pt.eta);
    pt.value = std::clamp(pt.raw, 0.0, 1.0);
    pt.clamped = pt.value != pt.raw;
  } catch (const std::exception& e) {
    pt.failed = true;
    pt.error = e.what();
    pt.value = std::numeric_limits<double>::quiet_NaN();
  }
  return pt;
}

inline MinEntropyCurve min_entropy_curve(const std::vector<double>& deltas, CurveKind kind, const CurveConfig& cfg = {}) {
  MinEntropyCurve c;
  c.kind = kind;
  c.deltas = deltas;
  for (double d : deltas) {
    c.points.push_back(min_entropy_point(d, kind, cfg));
    c.values.push_back(c.points.back().value);
  }
  return c;
}

inline MinEntropyCurve f_curve(const std::vector<double>& deltas, const CurveConfig& cfg = {}) {
  return min_entropy_curve(deltas, CurveKind::kGeneral, cfg);
}

inline MinEntropyCurve g_curve(const std::vector<double>& deltas, const CurveConfig& cfg = {}) {
  return min_entropy_curve(deltas, CurveKind::kUniform, cfg);
}

/// delta = 0, 0.01, ..., 0.49
inline std::vector<double> default_delta_grid() {
  std::vector<double> d;
  for (int i = 0; i < 50; ++i) d.push_back(i / 100.0);
  return d;
}

}  // namespace sdira
