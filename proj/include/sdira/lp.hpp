#pragma once

// Dense two-phase primal simplex for the small linear programs used by the
// classicality test and the guessing-probability column generation.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "sdira/errors.hpp"

namespace sdira::lp {

enum class Sense { kLessEqual, kEqual, kGreaterEqual };
enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

/// maximize objective.x  subject to  rows[i].x (sense[i]) rhs[i],  x >= 0
struct Problem {
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<Sense> senses;
  std::vector<double> objective;

  std::size_t num_rows() const { return rows.size(); }
  std::size_t num_cols() const { return objective.size(); }

  void add_row(std::vector<double> coeffs, Sense sense, double b) {
    rows.push_back(std::move(coeffs));
    senses.push_back(sense);
    rhs.push_back(b);
  }
};

struct Options {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-11;
  double optimality_tol = 1e-11;
  std::size_t max_iterations = 50000;
};

struct Solution {
  Status status = Status::kIterationLimit;
  std::vector<double> x;
  double objective = 0.0;
  /// Row prices y with objective_j - y.A_j <= 0 at optimality (y >= 0 on <= rows).
  std::vector<double> duals;
  /// Sum of artificials left after phase one (0 when feasible).
  double infeasibility = 0.0;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), data_(m * (n + 1), 0.0), basis_(m, 0) {}

  double& at(std::size_t i, std::size_t j) { return data_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  double rhs(std::size_t i) const { return at(i, n_); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  void pivot(std::size_t r, std::size_t c, std::vector<double>& reduced, double& value) {
    const double inv = 1.0 / at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) *= inv;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    const double f = reduced[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j < n_; ++j) reduced[j] -= f * at(r, j);
      value += f * rhs(r);
      reduced[c] = 0.0;
    }
    basis_[r] = c;
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

// Maximizes cost over the current tableau; columns with allowed[j] == false never enter.
inline Status optimize(Tableau& t, const std::vector<double>& cost, const std::vector<bool>& allowed,
                       const Options& opt, std::size_t& iterations) {
  const std::size_t m = t.rows();
  const std::size_t n = t.cols();
  std::vector<double> reduced(cost);
  double value = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double cb = cost[t.basis()[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) reduced[j] -= cb * t.at(i, j);
    value += cb * t.rhs(i);
  }
  std::size_t degenerate_streak = 0;
  while (true) {
    if (iterations++ >= opt.max_iterations) return Status::kIterationLimit;
    const bool bland = degenerate_streak > 2 * (m + 1);
    std::size_t enter = n;
    double best = opt.optimality_tol;
    for (std::size_t j = 0; j < n; ++j) {
      if (!allowed[j] || reduced[j] <= opt.optimality_tol) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (reduced[j] > best) {
        best = reduced[j];
        enter = j;
      }
    }
    if (enter == n) return Status::kOptimal;

    std::size_t leave = m;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = t.at(i, enter);
      if (a <= opt.pivot_tol) continue;
      const double r = std::max(0.0, t.rhs(i)) / a;
      if (r < ratio - 1e-15 || (r <= ratio + 1e-15 && leave < m && t.basis()[i] < t.basis()[leave])) {
        ratio = r;
        leave = i;
      }
    }
    if (leave == m) return Status::kUnbounded;
    degenerate_streak = (ratio <= 1e-14) ? degenerate_streak + 1 : 0;
    t.pivot(leave, enter, reduced, value);
  }
}

}  // namespace detail

inline Solution solve(const Problem& problem, const Options& opt = {}) {
  const std::size_t m = problem.num_rows();
  const std::size_t n = problem.num_cols();
  for (const auto& row : problem.rows) {
    if (row.size() != n) throw ComputationError("lp: row length does not match objective length");
  }
  if (problem.rhs.size() != m || problem.senses.size() != m) {
    throw ComputationError("lp: rhs/sense length mismatch");
  }

  // Normalize to rhs >= 0.
  std::vector<double> sign(m, 1.0);
  std::vector<Sense> senses = problem.senses;
  for (std::size_t i = 0; i < m; ++i) {
    if (problem.rhs[i] < 0.0) {
      sign[i] = -1.0;
      if (senses[i] == Sense::kLessEqual) {
        senses[i] = Sense::kGreaterEqual;
      } else if (senses[i] == Sense::kGreaterEqual) {
        senses[i] = Sense::kLessEqual;
      }
    }
  }

  std::size_t num_slack = 0;
  std::size_t num_art = 0;
  for (auto s : senses) {
    if (s != Sense::kEqual) ++num_slack;
    if (s != Sense::kLessEqual) ++num_art;
  }
  const std::size_t total = n + num_slack + num_art;
  const std::size_t first_art = n + num_slack;

  Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(total));
  detail::Tableau t(m, total);
  std::size_t slack = n;
  std::size_t art = first_art;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = sign[i] * problem.rows[i][j];
      t.at(i, j) = v;
      augmented(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
    t.rhs(i) = sign[i] * problem.rhs[i];
    if (senses[i] == Sense::kLessEqual) {
      t.at(i, slack) = 1.0;
      augmented(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(slack)) = 1.0;
      t.basis()[i] = slack++;
    } else {
      if (senses[i] == Sense::kGreaterEqual) {
        t.at(i, slack) = -1.0;
        augmented(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(slack)) = -1.0;
        ++slack;
      }
      t.at(i, art) = 1.0;
      augmented(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(art)) = 1.0;
      t.basis()[i] = art++;
    }
  }

  Solution sol;
  std::size_t iterations = 0;
  std::vector<bool> allowed(total, true);

  if (num_art > 0) {
    std::vector<double> phase1(total, 0.0);
    for (std::size_t j = first_art; j < total; ++j) phase1[j] = -1.0;
    const Status s1 = detail::optimize(t, phase1, allowed, opt, iterations);
    if (s1 == Status::kIterationLimit) {
      sol.status = s1;
      return sol;
    }
    double infeas = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] >= first_art) infeas += std::max(0.0, t.rhs(i));
    }
    sol.infeasibility = infeas;
    if (infeas > opt.feasibility_tol) {
      sol.status = Status::kInfeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    std::vector<double> dummy(total, 0.0);
    double dummy_value = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] < first_art) continue;
      std::size_t col = total;
      double best = opt.pivot_tol;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (std::abs(t.at(i, j)) > best) {
          best = std::abs(t.at(i, j));
          col = j;
        }
      }
      if (col != total) t.pivot(i, col, dummy, dummy_value);
    }
    for (std::size_t j = first_art; j < total; ++j) allowed[j] = false;
  }

  std::vector<double> cost(total, 0.0);
  std::copy(problem.objective.begin(), problem.objective.end(), cost.begin());
  const Status s2 = detail::optimize(t, cost, allowed, opt, iterations);
  sol.status = s2;
  if (s2 != Status::kOptimal) return sol;

  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis()[i] < n) sol.x[t.basis()[i]] = std::max(0.0, t.rhs(i));
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += problem.objective[j] * sol.x[j];

  Eigen::MatrixXd basis_matrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::VectorXd cb(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const auto col = static_cast<Eigen::Index>(t.basis()[i]);
    basis_matrix.col(static_cast<Eigen::Index>(i)) = augmented.col(col);
    cb(static_cast<Eigen::Index>(i)) = cost[t.basis()[i]];
  }
  const Eigen::VectorXd y = basis_matrix.transpose().fullPivLu().solve(cb);
  sol.duals.resize(m);
  for (std::size_t i = 0; i < m; ++i) sol.duals[i] = sign[i] * y(static_cast<Eigen::Index>(i));
  return sol;
}

}  // namespace sdira::lp
