#pragma once

// Two-level model of energy-constrained prepare-and-measure strategies and
// the search for maximal violations of the MDL inequality.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sdira/behaviours.hpp"
#include "sdira/errors.hpp"
#include "sdira/nelder_mead.hpp"
#include "sdira/rng.hpp"

namespace sdira {

/// psi_x = sqrt(1 - eps_x)|g> + e^{i phi x} sqrt(eps_x)|e>, measured by the
/// projector onto cos(theta)|g> + sin(theta)|e> (outcome 0), after which the
/// outcome is flipped with probability meas_bias.
struct QuantumStrategy {
  double eps0 = 0.0;
  double eps1 = 0.0;
  double phi = std::numbers::pi;
  double meas_theta = 0.0;
  double meas_bias = 0.0;

  bool respects(const EnergyBound& omega, double tol = tol::kProbability) const {
    return eps0 <= omega.omega0 + tol && eps1 <= omega.omega1 + tol;
  }

  void validate() const {
    if (!(eps0 >= 0.0 && eps0 <= 1.0) || !(eps1 >= 0.0 && eps1 <= 1.0)) {
      throw DomainError("excited-state populations must lie in [0,1]");
    }
    if (!(meas_bias >= 0.0 && meas_bias <= 1.0)) throw DomainError("measurement bias must lie in [0,1]");
    if (!std::isfinite(phi) || !std::isfinite(meas_theta)) throw DomainError("strategy angles must be finite");
  }

  void validate(const EnergyBound& omega) const {
    validate();
    if (!respects(omega)) throw DomainError("strategy exceeds its energy bound");
  }
};

/// |<psi_0|psi_1>|
inline double state_overlap(const QuantumStrategy& s) {
  const std::complex<double> amp =
      std::sqrt((1.0 - s.eps0) * (1.0 - s.eps1)) + std::polar(std::sqrt(s.eps0 * s.eps1), s.phi);
  return std::abs(amp);
}

/// Smallest overlap reachable at populations (eps0, eps1): the phi = pi value.
inline double min_overlap(double eps0, double eps1) {
  return std::sqrt((1.0 - eps0) * (1.0 - eps1)) - std::sqrt(eps0 * eps1);
}

/// Helstrom range of p(0|0) + p(1|1) for two pure states of overlap c.
inline double helstrom_agreement_max(double c) { return 1.0 + std::sqrt(std::max(0.0, 1.0 - c * c)); }
inline double helstrom_agreement_min(double c) { return 1.0 - std::sqrt(std::max(0.0, 1.0 - c * c)); }

inline Behaviour strategy_behaviour(const QuantumStrategy& s) {
  s.validate();
  const double ct = std::cos(s.meas_theta);
  const double st = std::sin(s.meas_theta);
  auto project = [&](double eps, double phase) {
    const double p = ct * ct * (1.0 - eps) + st * st * eps + 2.0 * ct * st * std::sqrt(eps * (1.0 - eps)) * std::cos(phase);
    return std::clamp(p, 0.0, 1.0);
  };
  const double b = s.meas_bias;
  const double q0 = project(s.eps0, 0.0);
  const double q1 = project(s.eps1, s.phi);
  const double p00 = (1.0 - b) * q0 + b * (1.0 - q0);
  const double p01 = (1.0 - b) * q1 + b * (1.0 - q1);
  return Behaviour(p00, 1.0 - p00, p01, 1.0 - p01);
}

enum class FunctionalKind { kUpper, kUnif };

inline const char* to_string(FunctionalKind k) { return k == FunctionalKind::kUpper ? "upper" : "unif"; }

/// (1/2+delta) mu [p(0|0)+p(1|1)] - ((1/2-delta)/mu) [p(1|0)+p(0|1)]
inline double functional_upper(const Behaviour& b, double delta, const EnergyBound& omega) {
  const double mu = mdl_mu(delta, omega);
  return (0.5 + delta) * mu * b.agreement() - (0.5 - delta) / mu * b.disagreement();
}

/// (mu/2) [p(0|0)+p(1|1)] - (1/(2 mu)) [p(1|0)+p(0|1)]
inline double functional_unif(const Behaviour& b, double delta, const EnergyBound& omega) {
  const double mu = mdl_mu(delta, omega);
  return 0.5 * mu * b.agreement() - 0.5 / mu * b.disagreement();
}

inline double functional(FunctionalKind kind, const Behaviour& b, double delta, const EnergyBound& omega) {
  return kind == FunctionalKind::kUpper ? functional_upper(b, delta, omega) : functional_unif(b, delta, omega);
}

struct SearchConfig {
  int grid_steps = 32;
  std::size_t refine_iters = 400;
  double refine_tol = 1e-8;
  std::vector<std::uint64_t> seeds = {11, 23, 37};
  /// Number of best grid points used as refinement starts.
  int refine_starts = 8;
  /// Sweep phi over [0, 2pi) instead of fixing it at pi.
  bool full_phase = false;
  /// Smallest energy bound considered on either axis.
  double omega_floor = 1e-4;
};

struct ViolationResult {
  double value = 0.0;
  EnergyBound omega_opt;
  QuantumStrategy strategy;
  FunctionalKind kind = FunctionalKind::kUpper;
  double bound = 0.0;
  /// value - bound; negative when the classical bound is violated.
  double margin = 0.0;
  /// margin / (mu + 1/mu), the quantity minimized over omega.
  double normalized_margin = 0.0;
};

/// Measurement angle minimizing p(0|0)+p(1|1) for real measurements:
/// the lowest eigenvector of Re(rho_0 - rho_1).
inline double discriminating_angle(double eps0, double eps1, double phi) {
  const double a = (1.0 - eps0) - (1.0 - eps1);
  const double d = eps0 - eps1;
  const double off = std::sqrt(eps0 * (1.0 - eps0)) - std::sqrt(eps1 * (1.0 - eps1)) * std::cos(phi);
  // Quadratic form a c^2 + d s^2 + 2 off c s, minimized over the unit circle.
  return 0.5 * std::atan2(2.0 * off, a - d) + 0.5 * std::numbers::pi;
}

struct InnerMinimum {
  double value = 0.0;
  QuantumStrategy strategy;
};

/// Minimum of the functional over saturated strategies at fixed omega.
inline InnerMinimum minimize_at(double delta, FunctionalKind kind, const EnergyBound& omega, double phi = std::numbers::pi) {
  if (omega.omega0 > 1.0 || omega.omega1 > 1.0) throw DomainError("two-level model needs omega_x <= 1");
  InnerMinimum best;
  bool first = true;
  // Past omega0 + omega1 = 1 the orthogonal pair is reachable inside the bound.
  std::vector<std::pair<double, double>> pops = {{omega.omega0, omega.omega1}};
  if (omega.sum() > 1.0) {
    const double e0 = std::max(0.0, 1.0 - omega.omega1);
    pops.emplace_back(e0, 1.0 - e0);
  }
  for (auto [e0, e1] : pops) {
    QuantumStrategy s{e0, e1, phi, discriminating_angle(e0, e1, phi), 0.0};
    const double v = functional(kind, strategy_behaviour(s), delta, omega);
    if (first || v < best.value) {
      best = {v, s};
      first = false;
    }
  }
  return best;
}

namespace detail {

inline double normalized_margin(double value, const MdlParams& p) { return (value - p.bound) / p.range(); }

}  // namespace detail

/// Minimizes the functional over omega in (0,1]^2 and strategies in Q_omega.
/// Because the raw minimum diverges as omega -> 0, omega is selected by the
/// normalized margin (I - B)/(mu + 1/mu); the reported value is the
/// functional at that omega.
inline ViolationResult optimize_violation(double delta, FunctionalKind kind, const SearchConfig& cfg = {}) {
  check_bias(delta);
  if (cfg.grid_steps < 2) throw DomainError("grid_steps must be at least 2");
  const double lo = cfg.omega_floor;
  const double pi = std::numbers::pi;

  // x = (omega0, omega1, theta[, phi])
  const std::size_t dim = cfg.full_phase ? 4 : 3;
  auto build = [&](const std::vector<double>& x) {
    QuantumStrategy s{x[0], x[1], cfg.full_phase ? x[3] : pi, x[2], 0.0};
    return s;
  };
  auto objective = [&](const std::vector<double>& x) {
    const EnergyBound omega(x[0], x[1]);
    const auto p = MdlParams::make(delta, omega);
    const double v = functional(kind, strategy_behaviour(build(x)), delta, omega);
    return detail::normalized_margin(v, p);
  };

  struct Point {
    std::vector<double> x;
    double f;
  };
  std::vector<Point> grid;
  const int n = cfg.grid_steps;
  const int phase_steps = cfg.full_phase ? n : 1;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < phase_steps; ++l) {
          std::vector<double> x = {std::max(lo, double(i) / n), std::max(lo, double(j) / n), pi * k / n};
          if (cfg.full_phase) x.push_back(2.0 * pi * l / n);
          grid.push_back({x, objective(x)});
        }
      }
    }
  }
  const auto starts = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, cfg.refine_starts)), grid.size());
  std::partial_sort(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(starts), grid.end(),
                    [](const Point& a, const Point& b) { return a.f < b.f; });
  grid.resize(starts);
  opt::Box box;
  box.lower = {lo, lo, 0.0};
  box.upper = {1.0, 1.0, pi};
  if (cfg.full_phase) {
    box.lower.push_back(0.0);
    box.upper.push_back(2.0 * pi);
  }
  for (std::uint64_t seed : cfg.seeds) {
    Rng rng = Rng::stream(seed, streams::kSearch);
    std::vector<double> x(dim);
    for (std::size_t d = 0; d < dim; ++d) x[d] = rng.uniform(box.lower[d], box.upper[d]);
    grid.push_back({x, objective(x)});
  }

  opt::NelderMeadOptions nm;
  nm.max_iterations = cfg.refine_iters;
  nm.f_tol = cfg.refine_tol * 1e-3;
  nm.x_tol = cfg.refine_tol;
  std::ostringstream trace;
  Point best{{}, std::numeric_limits<double>::infinity()};
  for (const auto& start : grid) {
    const auto r = opt::nelder_mead(objective, start.x, box, nm);
    trace << "start f=" << start.f << " -> " << r.value << " (" << r.iterations << " it)\n";
    if (std::isfinite(r.value) && r.value < best.f) best = {r.x, r.value};
  }
  if (!std::isfinite(best.f)) throw ComputationError("optimize_violation: no finite minimum found\n" + trace.str());

  // Polish the measurement at the refined omega.
  const EnergyBound omega(best.x[0], best.x[1]);
  QuantumStrategy s = build(best.x);
  QuantumStrategy polished = s;
  polished.meas_theta = discriminating_angle(s.eps0, s.eps1, s.phi);
  const auto eval = [&](const QuantumStrategy& q) { return functional(kind, strategy_behaviour(q), delta, omega); };
  if (eval(polished) < eval(s)) s = polished;

  ViolationResult out;
  out.kind = kind;
  out.omega_opt = omega;
  out.strategy = s;
  out.value = eval(s);
  const auto p = MdlParams::make(delta, omega);
  out.bound = p.bound;
  out.margin = out.value - p.bound;
  out.normalized_margin = detail::normalized_margin(out.value, p);
  return out;
}

/// Uniformly random strategy within omega, including phase and measurement noise.
inline QuantumStrategy random_strategy(Rng& rng, const EnergyBound& omega) {
  QuantumStrategy s;
  s.eps0 = rng.uniform() * std::min(1.0, omega.omega0);
  s.eps1 = rng.uniform() * std::min(1.0, omega.omega1);
  s.phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  s.meas_theta = rng.uniform(0.0, std::numbers::pi);
  s.meas_bias = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
  return s;
}

}  // namespace sdira
