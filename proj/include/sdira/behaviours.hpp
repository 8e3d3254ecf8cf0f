#pragma once

// Behaviours p(a|x), joint distributions p(a,x), energy bounds, and the
// measurement-dependent-locality (MDL) functional with its classical bound.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sdira/errors.hpp"
#include "sdira/lp.hpp"

namespace sdira {

/// Flat index of the (a, x) cell. Ordering is (0|0), (1|0), (0|1), (1|1):
/// the two entries of each input column are contiguous.
constexpr std::size_t cell(int a, int x) { return static_cast<std::size_t>(2 * x + a); }

/// Conditional distribution p(a|x) for binary a and x.
class Behaviour {
 public:
  Behaviour(double p00, double p10, double p01, double p11) : Behaviour(std::array<double, 4>{p00, p10, p01, p11}) {}

  explicit Behaviour(const std::array<double, 4>& p) : p_(p) {
    for (double v : p_) {
      if (!(v >= -tol::kProbability && v <= 1.0 + tol::kProbability)) {
        throw DomainError("Behaviour entry outside [0,1]");
      }
    }
    if (std::abs(p_[0] + p_[1] - 1.0) > tol::kProbability || std::abs(p_[2] + p_[3] - 1.0) > tol::kProbability) {
      throw DomainError("Behaviour columns must each sum to 1");
    }
  }

  double operator()(int a, int x) const { return p_[cell(a, x)]; }
  const std::array<double, 4>& values() const { return p_; }

  /// p(0|0) + p(1|1)
  double agreement() const { return p_[0] + p_[3]; }
  /// p(1|0) + p(0|1)
  double disagreement() const { return p_[1] + p_[2]; }

  friend bool operator==(const Behaviour&, const Behaviour&) = default;

 private:
  std::array<double, 4> p_;
};

/// Sub-normalised behaviour: both columns carry the same weight w in [0, 1].
class SubBehaviour {
 public:
  explicit SubBehaviour(const std::array<double, 4>& p) : p_(p) {
    for (double v : p_) {
      if (v < -tol::kProbability) throw DomainError("SubBehaviour entry negative");
    }
    const double w0 = p_[0] + p_[1];
    const double w1 = p_[2] + p_[3];
    if (std::abs(w0 - w1) > 1e-10) throw DomainError("SubBehaviour columns carry different weights");
    if (w0 > 1.0 + 1e-10) throw DomainError("SubBehaviour weight exceeds 1");
  }

  static SubBehaviour scaled(const Behaviour& b, double weight) {
    const auto& v = b.values();
    return SubBehaviour({weight * v[0], weight * v[1], weight * v[2], weight * v[3]});
  }

  double operator()(int a, int x) const { return p_[cell(a, x)]; }
  const std::array<double, 4>& values() const { return p_; }
  double weight() const { return 0.5 * (p_[0] + p_[1] + p_[2] + p_[3]); }
  double agreement() const { return p_[0] + p_[3]; }
  double disagreement() const { return p_[1] + p_[2]; }

 private:
  std::array<double, 4> p_;
};

/// Joint distribution q(a, x) over {0,1}^2, stored with the cell() ordering.
class JointDistribution {
 public:
  explicit JointDistribution(const std::array<double, 4>& q) : q_(q) {
    double sum = 0.0;
    for (double v : q_) {
      if (v < -tol::kProbability) throw DomainError("JointDistribution entry negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol::kProbability) throw DomainError("JointDistribution must sum to 1");
  }

  /// q(a,x) = p(a|x) v(x)
  static JointDistribution from(const Behaviour& b, double prob_x0) {
    const double v0 = prob_x0;
    const double v1 = 1.0 - prob_x0;
    return JointDistribution({b(0, 0) * v0, b(1, 0) * v0, b(0, 1) * v1, b(1, 1) * v1});
  }

  double operator()(int a, int x) const { return q_[cell(a, x)]; }
  const std::array<double, 4>& values() const { return q_; }
  double prob_equal() const { return q_[0] + q_[3]; }
  double prob_differ() const { return q_[1] + q_[2]; }

 private:
  std::array<double, 4> q_;
};

struct EnergyBound {
  double omega0 = 0.0;
  double omega1 = 0.0;

  EnergyBound() = default;
  EnergyBound(double w0, double w1) : omega0(w0), omega1(w1) {
    if (!(w0 >= 0.0) || !(w1 >= 0.0)) throw DomainError("energy bounds must be non-negative");
  }
  double operator[](int x) const { return x == 0 ? omega0 : omega1; }
  double sum() const { return omega0 + omega1; }
  friend bool operator==(const EnergyBound&, const EnergyBound&) = default;
};

inline void check_bias(double delta) {
  if (!(delta >= 0.0) || !(delta < 0.5)) throw DomainError("SV bias delta must lie in [0, 1/2)");
}

/// (1/4 - delta^2) omega0 omega1
inline double mdl_mu(double delta, const EnergyBound& omega) {
  check_bias(delta);
  if (!(omega.omega0 > 0.0) || !(omega.omega1 > 0.0)) {
    throw DomainError("mu vanishes unless both energy bounds are positive");
  }
  return (0.25 - delta * delta) * omega.omega0 * omega.omega1;
}

/// Classical lower bound B of the MDL functional.
inline double mdl_bound(double delta, const EnergyBound& omega) {
  const double mu = mdl_mu(delta, omega);
  return (0.5 - delta) * (mu + 1.0 / mu) * (1.0 - omega.sum()) - 1.0 / mu;
}

struct MdlParams {
  double delta = 0.0;
  EnergyBound omega;
  double mu = 0.0;
  double bound = 0.0;

  static MdlParams make(double delta, const EnergyBound& omega) {
    return MdlParams{delta, omega, mdl_mu(delta, omega), mdl_bound(delta, omega)};
  }

  /// Width mu + 1/mu of the range of the functional.
  double range() const { return mu + 1.0 / mu; }
};

/// mu p(a=x) - p(a!=x)/mu
inline double mdl_value(const JointDistribution& q, double delta, const EnergyBound& omega) {
  const double mu = mdl_mu(delta, omega);
  return mu * q.prob_equal() - q.prob_differ() / mu;
}

struct VertexSet {
  std::vector<Behaviour> vertices;
  /// True when omega0 + omega1 > 1: every behaviour is classical and the
  /// vertices are the four deterministic behaviours.
  bool vacuous = false;
};

/// Vertices of the energy-bounded classical set.
inline VertexSet classical_vertices(const EnergyBound& omega) {
  const double s = omega.sum();
  VertexSet out;
  if (s > 1.0) {
    out.vacuous = true;
    out.vertices = {Behaviour(1, 0, 1, 0), Behaviour(0, 1, 0, 1), Behaviour(1, 0, 0, 1), Behaviour(0, 1, 1, 0)};
    return out;
  }
  const std::array<Behaviour, 6> candidates = {
      Behaviour(1, 0, 1, 0),         Behaviour(0, 1, 0, 1),         Behaviour(1, 0, 1 - s, s),
      Behaviour(0, 1, s, 1 - s),     Behaviour(1 - s, s, 1, 0),     Behaviour(s, 1 - s, 0, 1),
  };
  for (const auto& c : candidates) {
    bool seen = false;
    for (const auto& v : out.vertices) seen = seen || (v == c);
    if (!seen) out.vertices.push_back(c);
  }
  return out;
}

/// Joints generated by the classical vertices under the two extreme SV input
/// distributions; the MDL polytope is contained in their convex hull.
inline std::vector<JointDistribution> classical_joint_generators(double delta, const EnergyBound& omega) {
  check_bias(delta);
  std::vector<JointDistribution> joints;
  for (const auto& b : classical_vertices(omega).vertices) {
    joints.push_back(JointDistribution::from(b, 0.5 + delta));
    joints.push_back(JointDistribution::from(b, 0.5 - delta));
  }
  return joints;
}

struct VertexMinimum {
  double minimum = 0.0;
  double bound = 0.0;
  /// minimum - bound; non-negative whenever the classical bound holds.
  double gap = 0.0;
  bool vacuous = false;
};

/// Brute-force minimum of the MDL functional over the finite candidate
/// vertex set of the MDL polytope.
inline VertexMinimum mdl_vertex_minimum(double delta, const EnergyBound& omega) {
  const double bound = mdl_bound(delta, omega);
  VertexMinimum out;
  out.bound = bound;
  out.vacuous = omega.sum() > 1.0;
  bool first = true;
  for (const auto& q : classical_joint_generators(delta, omega)) {
    const double v = mdl_value(q, delta, omega);
    if (first || v < out.minimum) out.minimum = v;
    first = false;
  }
  out.gap = out.minimum - bound;
  return out;
}

/// Hull membership of q among the classical joint generators.
inline bool is_classical_mdl(const JointDistribution& q, double delta, const EnergyBound& omega) {
  (void)mdl_mu(delta, omega);
  const auto joints = classical_joint_generators(delta, omega);
  lp::Problem problem;
  problem.objective.assign(joints.size(), 0.0);
  for (std::size_t c = 0; c < 4; ++c) {
    std::vector<double> row(joints.size());
    for (std::size_t j = 0; j < joints.size(); ++j) row[j] = joints[j].values()[c];
    problem.add_row(std::move(row), lp::Sense::kEqual, q.values()[c]);
  }
  lp::Options opt;
  opt.feasibility_tol = tol::kInequality;
  const auto sol = lp::solve(problem, opt);
  switch (sol.status) {
    case lp::Status::kOptimal:
      return true;
    case lp::Status::kInfeasible:
      return false;
    default:
      throw ComputationError("classicality LP ended in an unexpected state");
  }
}

}  // namespace sdira
