#include <gtest/gtest.h>

#include <numbers>

#include "sdira/quantum.hpp"

using namespace sdira;

namespace {
constexpr double kPi = std::numbers::pi;

void expect_behaviour(const Behaviour& b, std::array<double, 4> expected, double tol) {
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(b.values()[c], expected[c], tol) << "cell " << c;
}
}  // namespace

TEST(Strategy, GroundStatesAreIndistinguishable) {
  for (double theta : {0.0, 0.4, 1.3, 2.9}) {
    const auto b = strategy_behaviour({0.0, 0.0, kPi, theta, 0.1});
    EXPECT_NEAR(b(0, 0), b(0, 1), 1e-15);
  }
}

TEST(Strategy, OrthogonalStatesDiscriminatePerfectly) {
  const auto b = strategy_behaviour({0.5, 0.5, kPi, kPi / 4, 0.0});
  expect_behaviour(b, {1, 0, 0, 1}, 1e-15);
  EXPECT_NEAR(state_overlap({0.5, 0.5, kPi, 0.0, 0.0}), 0.0, 1e-15);
}

TEST(Strategy, FullyMixedOutcome) {
  const auto b = strategy_behaviour({0.3, 0.1, 1.0, 0.7, 0.5});
  expect_behaviour(b, {0.5, 0.5, 0.5, 0.5}, 1e-15);
}

TEST(Strategy, ValidatesParameters) {
  EXPECT_THROW(strategy_behaviour({1.2, 0.0, 0.0, 0.0, 0.0}), DomainError);
  EXPECT_THROW(strategy_behaviour({0.1, 0.0, 0.0, 0.0, 1.5}), DomainError);
  EXPECT_THROW(QuantumStrategy({0.3, 0.1, kPi, 0.0, 0.0}).validate({0.2, 0.2}), DomainError);
}

TEST(Functionals, Examples) {
  const EnergyBound w(0.4, 0.3);
  const Behaviour perfect(1, 0, 0, 1);
  const Behaviour flat(0.5, 0.5, 0.5, 0.5);
  const double mu0 = mdl_mu(0.0, w);
  EXPECT_NEAR(functional_upper(perfect, 0.0, w), mu0, 1e-15);
  EXPECT_NEAR(functional_unif(perfect, 0.2, w), mdl_mu(0.2, w), 1e-15);
  for (double d : {0.0, 0.1, 0.3}) {
    const double mu = mdl_mu(d, w);
    EXPECT_NEAR(functional_upper(flat, d, w), (0.5 + d) * mu - (0.5 - d) / mu, 1e-12);
    EXPECT_NEAR(functional_unif(flat, d, w), 0.5 * (mu - 1.0 / mu), 1e-12);
  }
  const Behaviour b(0.7, 0.3, 0.2, 0.8);
  EXPECT_NEAR(functional_upper(b, 0.0, w), functional_unif(b, 0.0, w), 1e-15);
  EXPECT_NEAR(functional_upper(b, 0.0, w), mdl_value(JointDistribution::from(b, 0.5), 0.0, w), 1e-12);
}

TEST(Strategy, HelstromCeilingOnRandomStrategies) {
  Rng rng(5);
  for (int t = 0; t < 10000; ++t) {
    const EnergyBound w(rng.uniform(), rng.uniform());
    const auto s = random_strategy(rng, w);
    const double c = min_overlap(s.eps0, s.eps1);
    const double agree = strategy_behaviour(s).agreement();
    EXPECT_LE(agree, helstrom_agreement_max(c) + 1e-12);
    EXPECT_GE(agree, helstrom_agreement_min(c) - 1e-12);
  }
}

TEST(Strategy, DiscriminatingAngleReachesHelstromMinimum) {
  Rng rng(8);
  for (int t = 0; t < 1000; ++t) {
    const double e0 = rng.uniform();
    const double e1 = rng.uniform();
    const QuantumStrategy s{e0, e1, kPi, discriminating_angle(e0, e1, kPi), 0.0};
    EXPECT_NEAR(strategy_behaviour(s).agreement(), helstrom_agreement_min(min_overlap(e0, e1)), 1e-12);
  }
}

TEST(Inner, OrthogonalStrategyAtHalfEnergy) {
  const EnergyBound w(0.5, 0.5);
  const auto r = minimize_at(0.0, FunctionalKind::kUpper, w);
  expect_behaviour(strategy_behaviour(r.strategy), {0, 1, 1, 0}, 1e-12);
  EXPECT_NEAR(r.value, -1.0 / mdl_mu(0.0, w), 1e-9);
  EXPECT_NEAR(state_overlap(r.strategy), 0.0, 1e-12);
}

TEST(Violation, ExistsAtZeroBias) {
  const auto r = optimize_violation(0.0, FunctionalKind::kUpper);
  EXPECT_LT(r.value, r.bound);
  EXPECT_LT(r.margin, 0.0);
  EXPECT_NEAR(functional_upper(strategy_behaviour(r.strategy), 0.0, r.omega_opt), r.value, 1e-8);
  EXPECT_TRUE(r.strategy.respects(r.omega_opt));
}

TEST(Violation, UniformKindViolatesAtLargeBias) {
  for (double d : {0.45, 0.49}) {
    const auto r = optimize_violation(d, FunctionalKind::kUnif);
    EXPECT_LT(r.value, r.bound) << "delta " << d;
    EXPECT_NEAR(functional_unif(strategy_behaviour(r.strategy), d, r.omega_opt), r.value, 1e-8);
  }
}

TEST(Violation, Deterministic) {
  const auto a = optimize_violation(0.2, FunctionalKind::kUnif);
  const auto b = optimize_violation(0.2, FunctionalKind::kUnif);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.omega_opt, b.omega_opt);
}

TEST(Violation, MagnitudeNonIncreasingInBias) {
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 9; ++i) {
    const double d = 0.05 * i;
    const auto r = optimize_violation(d, FunctionalKind::kUnif);
    const double magnitude = std::max(0.0, -r.normalized_margin);
    EXPECT_LE(magnitude, prev + 1e-9) << "delta " << d;
    prev = magnitude;
  }
}

TEST(Violation, FullPhaseSearchAgrees) {
  SearchConfig cfg;
  cfg.grid_steps = 12;
  cfg.full_phase = true;
  const auto coarse = optimize_violation(0.1, FunctionalKind::kUnif, cfg);
  const auto fine = optimize_violation(0.1, FunctionalKind::kUnif);
  EXPECT_NEAR(coarse.normalized_margin, fine.normalized_margin, 1e-6);
}

// Random strategies inside the optimal energy bound, including phases and
// noisy measurements, never beat the optimizer.
TEST(Violation, RandomSamplingOracle) {
  for (auto kind : {FunctionalKind::kUpper, FunctionalKind::kUnif}) {
    const double d = 0.1;
    const auto r = optimize_violation(d, kind);
    Rng rng(31337);
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 1000000; ++t) {
      const auto s = random_strategy(rng, r.omega_opt);
      best = std::min(best, functional(kind, strategy_behaviour(s), d, r.omega_opt));
    }
    EXPECT_GE(best, r.value - 1e-6) << to_string(kind);
  }
}
