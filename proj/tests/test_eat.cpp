#include <gtest/gtest.h>

#include <cmath>

#include "sdira/eat.hpp"

using namespace sdira;

namespace {
TradeoffFunction synthetic(double alpha, double delta = 0.1, EnergyBound w = {0.2, 0.2}, double f = 0.7) {
  DualLine line;
  line.alpha = alpha;
  line.beta_dot_omega = 0.9;
  const double mu = mdl_mu(delta, w);
  const double i_opt = -0.6 / mu;
  return make_tradeoff(delta, w, f, i_opt, line, SlopeRule::kFDelta);
}
}  // namespace

TEST(Winning, Values) {
  const EnergyBound w(0.3, 0.2);
  const double mu = mdl_mu(0.1, w);
  EXPECT_DOUBLE_EQ(winning_value(0, 0, 0.1, w), mu);
  EXPECT_DOUBLE_EQ(winning_value(1, 1, 0.1, w), mu);
  EXPECT_DOUBLE_EQ(winning_value(1, 0, 0.1, w), -1.0 / mu);
  EXPECT_DOUBLE_EQ(winning_value(0, 1, 0.1, w), -1.0 / mu);
  double avg = 0;
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 2; ++x) avg += 0.25 * winning_value(a, x, 0.1, w);
  EXPECT_NEAR(avg, 0.5 * (mu - 1.0 / mu), 1e-12);
}

TEST(Tradeoff, CenterAffinityAndExtremes) {
  const auto tf = synthetic(0.002);
  EXPECT_EQ(tf(tf.q_opt), tf.f_delta);
  EXPECT_NEAR(tf.c[0] * tf.q_opt[0] + tf.c[1] * tf.q_opt[1], tf.i_opt, 1e-12);
  const WinDistribution p1{0.2, 0.8}, p2{0.9, 0.1};
  for (double l : {0.0, 0.3, 0.5, 1.0}) {
    const WinDistribution mix{l * p1[0] + (1 - l) * p2[0], l * p1[1] + (1 - l) * p2[1]};
    EXPECT_NEAR(tf(mix), l * tf(p1) + (1 - l) * tf(p2), 1e-12);
  }
  ASSERT_GT(tf.slope_coeff, 0.0);
  EXPECT_LE(tf.min_val, tf.f_delta);
  EXPECT_GE(tf.max_val, tf.f_delta);
  EXPECT_EQ(tf.min_val, tf({1.0, 0.0}));
  EXPECT_EQ(tf.max_val, tf({0.0, 1.0}));
  EXPECT_NEAR(tf.spread(), tf.slope_coeff * (tf.mu + 1.0 / tf.mu), 1e-12);
}

TEST(Tradeoff, SlopeRules) {
  DualLine line;
  line.alpha = 0.003;
  line.beta_dot_omega = 1.2;
  const EnergyBound w(0.2, 0.2);
  const double i_opt = -100.0;
  const auto by_f = make_tradeoff(0.1, w, 0.5, i_opt, line, SlopeRule::kFDelta);
  const auto deriv = make_tradeoff(0.1, w, 0.5, i_opt, line, SlopeRule::kDerivative);
  EXPECT_NEAR(by_f.slope_coeff, 0.6 * 0.003 / (0.5 * std::log(2.0)), 1e-15);
  EXPECT_NEAR(deriv.slope_coeff, 0.6 * 0.003 / (line(i_opt) * std::log(2.0)), 1e-15);
}

TEST(Tradeoff, Errors) {
  DualLine line;
  EXPECT_THROW(make_tradeoff(0.1, {0.2, 0.2}, 0.0, -10.0, line, SlopeRule::kFDelta), ComputationError);
  EXPECT_THROW(make_tradeoff(0.1, {0.2, 0.2}, 0.5, -1e6, line, SlopeRule::kFDelta), DomainError);
}

TEST(Tradeoff, BuiltFromCertification) {
  const auto tf = build_tradeoff(0.02);
  EXPECT_GT(tf.f_delta, 0.9);
  EXPECT_GE(tf.alpha, 0.0);
  EXPECT_EQ(tf(tf.q_opt), tf.f_delta);
}

TEST(Epsilons, OmegaDirectSubstitution) {
  const auto tf = synthetic(0.002);
  const auto t = eat_epsilons(tf, 1e4, 1e-6, 1.0);
  EXPECT_NEAR(t.eps_Omega, (1.0 - 2.0 * std::log2(1e-6)) / 100.0, 1e-15);
  EXPECT_NEAR(t.eps_Omega, 0.40863, 1e-4);
}

TEST(Epsilons, VGrowsWithSpread) {
  double prev = 0.0;
  for (double alpha : {0.0, 0.001, 0.003, 0.01}) {
    const double v = eat_epsilons(synthetic(alpha), 1e5, 1e-6, 1.0).eps_V;
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Epsilons, MonotoneDirections) {
  const auto tf = synthetic(0.002);
  const auto base = eat_epsilons(tf, 1e4, 1e-6, 0.5);
  EXPECT_LT(eat_epsilons(tf, 1e6, 1e-6, 0.5).eps_Omega, base.eps_Omega);
  EXPECT_LT(eat_epsilons(tf, 1e4, 1e-6, 0.9).eps_Omega, base.eps_Omega);
  EXPECT_GT(eat_epsilons(tf, 1e4, 1e-9, 0.5).eps_Omega, base.eps_Omega);
  EXPECT_LT(eat_epsilons(tf, 1e12, 1e-6, 0.5).eps_Omega, 1e-4);
  EXPECT_GE(base.eps_V, 0.0);
}

TEST(Epsilons, KTermGuards) {
  const auto tf = synthetic(0.002);
  const auto small = eat_epsilons(tf, 100, 1e-6, 1.0);
  EXPECT_TRUE(small.eps_k_sign_warning);
  EXPECT_TRUE(std::isfinite(small.eps_K));
  EXPECT_GT(small.eps_K, 0.0);
  const auto large = eat_epsilons(tf, 1e8, 1e-6, 1.0);
  EXPECT_TRUE(large.eps_k_overflow);
  EXPECT_FALSE(std::isfinite(large.eps_K));
  EatOptions zero;
  zero.zero_eps_k = true;
  const auto z = eat_epsilons(tf, 1e8, 1e-6, 1.0, zero);
  EXPECT_EQ(z.eps_K, 0.0);
  EXPECT_TRUE(z.eps_k_zeroed);
  EXPECT_THROW(eat_epsilons(tf, 1, 1e-6, 1.0), DomainError);
  EXPECT_THROW(eat_epsilons(tf, 100, 0.0, 1.0), DomainError);
  EXPECT_THROW(eat_epsilons(tf, 100, 1e-6, 0.0), DomainError);
}

TEST(Smooth, RateConvergesAndGrows) {
  const auto tf = synthetic(0.002);
  EatOptions zero;
  zero.zero_eps_k = true;
  const double i_exp = tf.i_opt;
  const double gamma = 0.5;
  const double target = tf.at_mean(i_exp + gamma);
  const auto big = smooth_minentropy_bound(tf, 1e8, gamma, i_exp, 1e-6, 1e-6, zero);
  EXPECT_LT(std::abs(big.raw / 1e8 - target) / target, 0.01);
  double prev = -std::numeric_limits<double>::infinity();
  for (double n : {1e4, 1e5, 1e6, 1e7}) {
    const auto b = smooth_minentropy_bound(tf, n, gamma, i_exp, 1e-6, 1e-6, zero);
    EXPECT_GT(b.raw, prev);
    prev = b.raw;
  }
}

TEST(Smooth, LargerGammaLowersBound) {
  const auto tf = synthetic(0.002);
  EatOptions zero;
  zero.zero_eps_k = true;
  const auto a = smooth_minentropy_bound(tf, 1e6, 0.1, tf.i_opt, 1e-6, 1e-6, zero);
  const auto b = smooth_minentropy_bound(tf, 1e6, 1.0, tf.i_opt, 1e-6, 1e-6, zero);
  EXPECT_LT(b.raw, a.raw);
}

TEST(Smooth, ClampsAtZero) {
  const auto tf = synthetic(0.002);
  const auto b = smooth_minentropy_bound(tf, 10, 0.1, tf.i_opt, 1e-6, 1e-6);
  EXPECT_TRUE(b.clamped);
  EXPECT_EQ(b.bits, 0.0);
  EXPECT_THROW(smooth_minentropy_bound(tf, 1e4, 1e6, tf.i_opt, 1e-6, 1e-6), DomainError);
}

TEST(Extractor, KValues) {
  const auto p = extractor_params(1000.0, 101, 100, 0.1, std::exp2(-20.0), 8);
  EXPECT_NEAR(p.k2, -100.0 * std::log2(0.6) - 21.0, 1e-12);
  EXPECT_NEAR(p.k2, 52.697, 1e-3);
  EXPECT_NEAR(p.k1, 1000.0 - 21.0, 1e-12);
  EXPECT_NEAR(extractor_params(1000.0, 101, 100, 0.0, std::exp2(-20.0), 8).k2, 79.0, 1e-12);
  const double k2_200 = extractor_params(1000.0, 101, 200, 0.1, std::exp2(-20.0), 8).k2;
  EXPECT_NEAR(k2_200 - p.k2, -100.0 * std::log2(0.6), 1e-9);
}

TEST(Extractor, InsufficientEntropy) {
  EXPECT_THROW(extractor_params(10.0, 101, 100, 0.1, std::exp2(-20.0), 8), InsufficientEntropyError);
  EXPECT_THROW(extractor_params(1000.0, 101, 10, 0.4, std::exp2(-20.0), 8), InsufficientEntropyError);
  EXPECT_THROW(extractor_params(1000.0, 101, 100, 0.1, std::exp2(-20.0), 200), DomainError);
}

TEST(Security, Examples) {
  ProtocolParameters p;
  p.eps_s = p.eps_ext = p.eps_eat = 1e-6;
  EXPECT_NEAR(security_report(p).soundness_bound, 1.3e-5, 1e-18);
  // mu = 1 requires (1/4 - delta^2) omega0 omega1 = 1.
  p.delta = 0.0;
  p.omega = EnergyBound(2.0, 2.0);
  p.n = 1000;
  p.gamma_est = 0.1;
  EXPECT_NEAR(security_report(p).completeness_bound, std::exp(-5.0), 1e-15);
  p.gamma_est = 0.0;
  EXPECT_EQ(security_report(p).completeness_bound, 1.0);
  p.eps_s = 0.5;
  EXPECT_EQ(security_report(p).soundness_bound, 1.0);
  EXPECT_TRUE(security_report(p).soundness_clamped);
}

TEST(Security, PureFunction) {
  ProtocolParameters p;
  p.gamma_est = 0.3;
  const auto a = security_report(p);
  const auto b = security_report(p);
  EXPECT_EQ(a.soundness_bound, b.soundness_bound);
  EXPECT_EQ(a.completeness_bound, b.completeness_bound);
}

TEST(FiniteSize, ReportsBothEvaluationPoints) {
  const auto tf = synthetic(0.002);
  ProtocolParameters p;
  p.delta = tf.delta;
  p.omega = tf.omega;
  p.n = 1000000;
  p.d = 1000001;
  p.i_exp = tf.i_opt;
  p.gamma_est = 0.5;
  EatOptions zero;
  zero.zero_eps_k = true;
  const auto r = finite_size_report(tf, p, zero);
  EXPECT_TRUE(r.gamma_sign_discrepancy);
  EXPECT_NEAR(r.bound.eval_point, p.i_exp + p.gamma_est, 1e-12);
  EXPECT_NEAR(r.k1_bound.eval_point, p.i_exp - p.gamma_est, 1e-12);
  EXPECT_GE(r.k1_bound.raw, r.bound.raw);
  EXPECT_FALSE(r.insufficient);
  p.n = 10;
  p.d = 11;
  p.m = 4;
  EXPECT_TRUE(finite_size_report(tf, p, zero).insufficient);
}
