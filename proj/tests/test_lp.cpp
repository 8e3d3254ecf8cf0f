#include <gtest/gtest.h>

#include "sdira/lp.hpp"
#include "sdira/rng.hpp"

using namespace sdira;
using lp::Sense;
using lp::Status;

TEST(Simplex, TextbookProblem) {
  lp::Problem p;
  p.objective = {3.0, 2.0};
  p.add_row({1.0, 1.0}, Sense::kLessEqual, 4.0);
  p.add_row({1.0, 3.0}, Sense::kLessEqual, 6.0);
  p.add_row({1.0, 0.0}, Sense::kLessEqual, 3.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.x[0], 3.0, 1e-12);
  EXPECT_NEAR(s.x[1], 1.0, 1e-12);
  EXPECT_NEAR(s.objective, 11.0, 1e-12);
  EXPECT_NEAR(s.duals[0], 2.0, 1e-12);
  EXPECT_NEAR(s.duals[1], 0.0, 1e-12);
  EXPECT_NEAR(s.duals[2], 1.0, 1e-12);
}

TEST(Simplex, EqualityAndNegativeRhs) {
  // maximize -x - y  s.t.  x - y = -1,  x + y >= 3
  lp::Problem p;
  p.objective = {-1.0, -1.0};
  p.add_row({1.0, -1.0}, Sense::kEqual, -1.0);
  p.add_row({1.0, 1.0}, Sense::kGreaterEqual, 3.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, -3.0, 1e-12);
  EXPECT_NEAR(s.x[1] - s.x[0], 1.0, 1e-12);
}

TEST(Simplex, DetectsInfeasible) {
  lp::Problem p;
  p.objective = {1.0, 1.0};
  p.add_row({1.0, 1.0}, Sense::kGreaterEqual, 5.0);
  p.add_row({1.0, 1.0}, Sense::kLessEqual, 3.0);
  EXPECT_EQ(lp::solve(p).status, Status::kInfeasible);
}

TEST(Simplex, DetectsUnbounded) {
  lp::Problem p;
  p.objective = {1.0, 0.0};
  p.add_row({1.0, -1.0}, Sense::kLessEqual, 1.0);
  EXPECT_EQ(lp::solve(p).status, Status::kUnbounded);
}

TEST(Simplex, RejectsRaggedRows) {
  lp::Problem p;
  p.objective = {1.0, 0.0};
  p.add_row({1.0}, Sense::kLessEqual, 1.0);
  EXPECT_THROW(lp::solve(p), ComputationError);
}

// Strong duality and dual feasibility on random bounded problems.
TEST(Simplex, RandomProblemsSatisfyDuality) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.below(5);
    const std::size_t n = 2 + rng.below(8);
    lp::Problem p;
    p.objective.resize(n);
    for (auto& c : p.objective) c = rng.uniform(-1.0, 2.0);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row(n);
      for (auto& a : row) a = rng.uniform(0.1, 1.0);
      p.add_row(row, Sense::kLessEqual, rng.uniform(0.5, 2.0));
    }
    const auto s = lp::solve(p);
    ASSERT_EQ(s.status, Status::kOptimal);
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      EXPECT_GE(s.duals[i], -1e-9);
      dual_obj += s.duals[i] * p.rhs[i];
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += p.rows[i][j] * s.x[j];
      EXPECT_LE(lhs, p.rhs[i] + 1e-9);
    }
    EXPECT_NEAR(dual_obj, s.objective, 1e-9);
    for (std::size_t j = 0; j < n; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < m; ++i) col += s.duals[i] * p.rows[i][j];
      EXPECT_GE(col, p.objective[j] - 1e-9);
    }
  }
}
