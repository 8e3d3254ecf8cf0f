#pragma once

// Min-tradeoff function, EAT finite-size terms, smooth min-entropy bound,
// extractor thresholds and the composed security statement.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "sdira/behaviours.hpp"
#include "sdira/certification.hpp"
#include "sdira/errors.hpp"
#include "sdira/quantum.hpp"

namespace sdira {

/// mu if a == x, else -1/mu
inline double winning_value(int a, int x, double delta, const EnergyBound& omega) {
  const double mu = mdl_mu(delta, omega);
  return a == x ? mu : -1.0 / mu;
}

enum class SlopeRule { kFDelta, kDerivative };

struct TradeoffOptions {
  SlopeRule slope = SlopeRule::kFDelta;
  CurveConfig curve;
};

/// Distribution (p_mu, p_{-1/mu}) on the two winning values.
using WinDistribution = std::array<double, 2>;

struct TradeoffFunction {
  double delta = 0.0;
  EnergyBound omega;
  double mu = 0.0;
  double f_delta = 0.0;
  double alpha = 0.0;
  double slope_coeff = 0.0;
  SlopeRule rule = SlopeRule::kFDelta;
  std::array<double, 2> c{};
  double i_opt = 0.0;
  WinDistribution q_opt{};
  double min_val = 0.0;
  double max_val = 0.0;

  /// The distribution whose mean winning value is i; throws if none exists.
  WinDistribution distribution_for(double i) const {
    const double t = (i + 1.0 / mu) / (mu + 1.0 / mu);
    if (!(t >= -tol::kProbability && t <= 1.0 + tol::kProbability)) {
      throw DomainError("no distribution on {mu, -1/mu} has the requested mean");
    }
    const double p = std::clamp(t, 0.0, 1.0);
    return {p, 1.0 - p};
  }

  double operator()(const WinDistribution& p) const {
    const double cp = c[0] * p[0] + c[1] * p[1];
    const double cq = c[0] * q_opt[0] + c[1] * q_opt[1];
    return f_delta - slope_coeff * (cp - cq);
  }

  double at_mean(double i) const { return (*this)(distribution_for(i)); }
  double spread() const { return max_val - min_val; }
};

/// Assembles the tradeoff function from f(delta), the optimal energy bound
/// and the slope of the supporting line at I^{upper,opt}.
inline TradeoffFunction make_tradeoff(double delta, const EnergyBound& omega, double f_delta, double i_opt,
                                      const DualLine& line, SlopeRule rule) {
  if (!(f_delta > 0.0)) throw ComputationError("no certifiable entropy: f(delta) = 0");
  TradeoffFunction tf;
  tf.delta = delta;
  tf.omega = omega;
  tf.mu = mdl_mu(delta, omega);
  tf.f_delta = f_delta;
  tf.alpha = line.alpha;
  tf.rule = rule;
  tf.i_opt = i_opt;
  tf.c = {tf.mu, -1.0 / tf.mu};
  const double denom = rule == SlopeRule::kFDelta ? f_delta : line(i_opt);
  tf.slope_coeff = (0.5 + delta) * line.alpha / (denom * std::numbers::ln2);
  tf.q_opt = tf.distribution_for(i_opt);
  tf.min_val = tf({1.0, 0.0});
  tf.max_val = tf({0.0, 1.0});
  return tf;
}

inline TradeoffFunction build_tradeoff(double delta, const TradeoffOptions& opt = {}) {
  const auto pt = min_entropy_point(delta, CurveKind::kGeneral, opt.curve);
  if (pt.failed) throw ComputationError(pt.error);
  if (!(pt.value > 0.0)) throw ComputationError("no certifiable entropy: f(delta) = 0");
  const auto line = dual_line(delta, pt.omega_opt, pt.i_opt, opt.curve.guessing);
  return make_tradeoff(delta, pt.omega_opt, pt.value, pt.i_opt, line, opt.slope);
}

/// Same construction at a caller-chosen energy bound.
inline TradeoffFunction build_tradeoff_at(double delta, const EnergyBound& omega, const TradeoffOptions& opt = {}) {
  const auto inner = minimize_at(delta, FunctionalKind::kUpper, omega);
  const double raw = -std::log2(eta(delta, omega, inner.value, opt.curve.guessing));
  const double f = std::clamp(raw, 0.0, 1.0);
  if (!(f > 0.0)) throw ComputationError("no certifiable entropy: f(delta) = 0");
  const auto line = dual_line(delta, omega, inner.value, opt.curve.guessing);
  return make_tradeoff(delta, omega, f, inner.value, line, opt.slope);
}

struct EatOptions {
  /// Replace eps_K by 0.
  bool zero_eps_k = false;
};

struct EatTerms {
  double eps_V = 0.0;
  double eps_K = 0.0;
  double eps_Omega = 0.0;
  double n = 0.0;
  double eps_s = 0.0;
  double p_Omega = 0.0;
  /// The printed (1 - sqrt n)^3 factor was replaced by |1 - sqrt n|^3.
  bool eps_k_sign_warning = false;
  bool eps_k_zeroed = false;
  bool eps_k_overflow = false;
};

inline EatTerms eat_epsilons(const TradeoffFunction& tf, double n, double eps_s, double p_omega,
                             const EatOptions& opt = {}) {
  if (!(n >= 2.0)) throw DomainError("EAT terms need n >= 2");
  if (!(eps_s > 0.0 && eps_s < 1.0)) throw DomainError("eps_s must lie in (0,1)");
  if (!(p_omega > 0.0 && p_omega <= 1.0)) throw DomainError("p_Omega must lie in (0,1]");
  const double spread = tf.spread();
  const double rn = std::sqrt(n);
  EatTerms t;
  t.n = n;
  t.eps_s = eps_s;
  t.p_Omega = p_omega;
  const double v = std::log2(3.0) + std::sqrt(spread * spread + 2.0);
  t.eps_V = std::numbers::ln2 / (2.0 * rn) * v * v;
  t.eps_Omega = (1.0 - 2.0 * std::log2(p_omega * eps_s)) / rn;
  t.eps_k_sign_warning = true;
  if (opt.zero_eps_k) {
    t.eps_k_zeroed = true;
    t.eps_K = 0.0;
  } else {
    const double log2_k = -std::log2(6.0 * n * std::pow(std::abs(1.0 - rn), 3) * std::numbers::ln2) +
                          rn * (1.0 + spread) + 3.0 * std::log2(std::log(std::exp2(1.0 + spread) + std::exp(2.0)));
    t.eps_K = std::exp2(log2_k);
    t.eps_k_overflow = !std::isfinite(t.eps_K);
  }
  return t;
}

struct SmoothBound {
  /// Usable bits, clamped at 0.
  double bits = 0.0;
  double raw = 0.0;
  bool clamped = false;
  /// Mean winning value at which f_min was evaluated.
  double eval_point = 0.0;
  double rate = 0.0;
  EatTerms terms;
};

/// n f_min(p*) - n (eps_V + eps_K) - eps_Omega at c.p* = eval_point.
inline SmoothBound smooth_bound_at(const TradeoffFunction& tf, double n, double eval_point, double eps_s,
                                   double p_omega, const EatOptions& opt = {}) {
  SmoothBound b;
  b.terms = eat_epsilons(tf, n, eps_s, p_omega, opt);
  b.eval_point = eval_point;
  b.rate = tf.at_mean(eval_point);
  b.raw = n * b.rate - n * (b.terms.eps_V + b.terms.eps_K) - b.terms.eps_Omega;
  b.bits = std::max(0.0, b.raw);
  b.clamped = !(b.raw > 0.0);
  return b;
}

inline SmoothBound smooth_minentropy_bound(const TradeoffFunction& tf, double n, double gamma_est, double i_exp,
                                           double eps_s, double p_omega, const EatOptions& opt = {}) {
  return smooth_bound_at(tf, n, i_exp + gamma_est, eps_s, p_omega, opt);
}

struct ExtractorParams {
  double k1 = 0.0;
  double k2 = 0.0;
  std::size_t m = 0;
  double eps_ext = 0.0;
  std::size_t d = 0;
};

inline ExtractorParams extractor_params(double bound_bits, std::size_t n, std::size_t d, double delta, double eps_ext,
                                        std::size_t m) {
  check_bias(delta);
  if (d < 1) throw DomainError("second source length d must be positive");
  if (!(eps_ext > 0.0 && eps_ext < 1.0)) throw DomainError("eps_ext must lie in (0,1)");
  const std::size_t n_ext = n % 2 == 0 ? n + 1 : n;
  if (m > n_ext) throw DomainError("extractor output length m exceeds its input length");
  ExtractorParams p;
  p.m = m;
  p.eps_ext = eps_ext;
  p.d = d;
  const double tail = std::log2(1.0 / eps_ext) + 1.0;
  p.k1 = bound_bits - tail;
  p.k2 = -static_cast<double>(d) * std::log2(0.5 + delta) - tail;
  if (!(p.k1 > 0.0)) {
    throw InsufficientEntropyError("insufficient entropy for extraction: k1 = H - log2(1/eps_ext) - 1 = " +
                                   std::to_string(p.k1) + " <= 0");
  }
  if (!(p.k2 > 0.0)) {
    throw InsufficientEntropyError("insufficient entropy for extraction: k2 = -d log2(1/2+delta) - log2(1/eps_ext) - 1 = " +
                                   std::to_string(p.k2) + " <= 0");
  }
  return p;
}

struct ProtocolParameters {
  double delta = 0.1;
  EnergyBound omega{0.1, 0.1};
  std::size_t n = 1000000;
  std::size_t d = 1000001;
  std::size_t m = 64;
  double i_exp = 0.0;
  double gamma_est = 0.0;
  double eps_s = 1e-6;
  double eps_ext = 1e-6;
  double eps_eat = 1e-6;
};

struct SecurityReport {
  double soundness_bound = 0.0;
  double completeness_bound = 0.0;
  bool soundness_clamped = false;
  bool completeness_clamped = false;
  ProtocolParameters params;
};

inline SecurityReport security_report(const ProtocolParameters& p) {
  SecurityReport r;
  r.params = p;
  const double mu = mdl_mu(p.delta, p.omega);
  const double sound = 6.0 * (p.eps_s + p.eps_ext) + p.eps_eat;
  const double g = p.gamma_est;
  const double complete = std::exp(-2.0 * static_cast<double>(p.n) * mu * mu * g * g / ((1.0 + mu * mu) * (1.0 + mu * mu)));
  r.soundness_bound = std::clamp(sound, 0.0, 1.0);
  r.completeness_bound = std::clamp(complete, 0.0, 1.0);
  r.soundness_clamped = r.soundness_bound != sound;
  r.completeness_clamped = r.completeness_bound != complete;
  return r;
}

/// Everything the finite-size analysis produces for one parameter set.
struct FiniteSizeReport {
  SecurityReport security;
  /// Evaluated at I_exp + gamma_est.
  SmoothBound bound;
  /// Evaluated at I_exp - gamma_est, the point used for k1.
  SmoothBound k1_bound;
  double k2_bits = 0.0;
  double k1_bits = 0.0;
  bool insufficient = false;
  std::string insufficient_reason;
  /// The two evaluation points differ by 2 gamma_est.
  bool gamma_sign_discrepancy = true;
};

inline FiniteSizeReport finite_size_report(const TradeoffFunction& tf, const ProtocolParameters& p,
                                           const EatOptions& opt = {}) {
  FiniteSizeReport r;
  r.security = security_report(p);
  const double n = static_cast<double>(p.n);
  // The non-abort event has probability at least eps_EAT in the case that matters.
  const double p_omega = p.eps_eat;
  r.bound = smooth_bound_at(tf, n, p.i_exp + p.gamma_est, p.eps_s, p_omega, opt);
  r.k1_bound = smooth_bound_at(tf, n, p.i_exp - p.gamma_est, p.eps_s, p_omega, opt);
  const double tail = std::log2(1.0 / p.eps_ext) + 1.0;
  r.k1_bits = r.k1_bound.raw - tail;
  r.k2_bits = -static_cast<double>(p.d) * std::log2(0.5 + p.delta) - tail;
  try {
    (void)extractor_params(r.k1_bound.bits, p.n, p.d, p.delta, p.eps_ext, p.m);
  } catch (const InsufficientEntropyError& e) {
    r.insufficient = true;
    r.insufficient_reason = e.what();
  }
  return r;
}

}  // namespace sdira
