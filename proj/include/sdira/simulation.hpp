#pragma once

// Santha-Vazirani sources, device models and the protocol loop.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sdira/behaviours.hpp"
#include "sdira/eat.hpp"
#include "sdira/errors.hpp"
#include "sdira/extractor.hpp"
#include "sdira/quantum.hpp"
#include "sdira/rng.hpp"

namespace sdira {

enum class SourceKind { kUniform, kFixedBias, kAdaptiveGreedy };

inline std::string to_string(SourceKind k) {
  switch (k) {
    case SourceKind::kUniform:
      return "uniform";
    case SourceKind::kFixedBias:
      return "fixed-bias";
    case SourceKind::kAdaptiveGreedy:
      return "adaptive-adversarial";
  }
  return "?";
}

/// Score of emitting bit x next; the greedy source favours the larger score.
using SourceTarget = std::function<double(int x)>;

class SourceModel {
 public:
  static SourceModel uniform(std::uint64_t seed) { return SourceModel(SourceKind::kUniform, 0.0, seed, {}); }

  /// Pr[1] = 1/2 + delta on every emission.
  static SourceModel fixed_bias(double delta, std::uint64_t seed) {
    return SourceModel(SourceKind::kFixedBias, delta, seed, {});
  }

  static SourceModel greedy(double delta, SourceTarget target, std::uint64_t seed) {
    if (!target) throw DomainError("greedy source needs a target");
    return SourceModel(SourceKind::kAdaptiveGreedy, delta, seed, std::move(target));
  }

  SourceKind kind() const { return kind_; }
  double delta() const { return delta_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint8_t>& history() const { return history_; }
  /// Pr[bit = 1 | history] for every emission, in order.
  const std::vector<double>& emission_probabilities() const { return probs_; }

  /// Probability that the next bit is 1.
  double next_probability() const {
    switch (kind_) {
      case SourceKind::kUniform:
        return 0.5;
      case SourceKind::kFixedBias:
        return 0.5 + delta_;
      case SourceKind::kAdaptiveGreedy: {
        const double s1 = target_(1);
        const double s0 = target_(0);
        if (s1 > s0) return 0.5 + delta_;
        if (s1 < s0) return 0.5 - delta_;
        return 0.5;
      }
    }
    return 0.5;
  }

  int next() {
    const double p = next_probability();
    if (!(p >= 0.5 - delta_ - tol::kProbability && p <= 0.5 + delta_ + tol::kProbability)) {
      throw ContractViolation("source emission probability outside the SV band");
    }
    const int bit = rng_.bernoulli(p);
    probs_.push_back(p);
    history_.push_back(static_cast<std::uint8_t>(bit));
    return bit;
  }

 private:
  SourceModel(SourceKind kind, double delta, std::uint64_t seed, SourceTarget target)
      : kind_(kind), delta_(delta), seed_(seed), target_(std::move(target)), rng_(Rng::stream(seed, streams::kSource)) {
    check_bias(delta);
  }

  SourceKind kind_;
  double delta_;
  std::uint64_t seed_;
  SourceTarget target_;
  Rng rng_;
  std::vector<std::uint8_t> history_;
  std::vector<double> probs_;
};

inline SourceModel adversarial_source_greedy(double delta, SourceTarget target, std::uint64_t seed) {
  return SourceModel::greedy(delta, std::move(target), seed);
}

/// -E[c | x] for a declared behaviour: the greedy source then pushes c_bar down.
inline SourceTarget evasion_target(const Behaviour& declared, double delta, const EnergyBound& omega) {
  const double mu = mdl_mu(delta, omega);
  return [declared, mu](int x) { return -(mu * declared(x, x) - declared(1 - x, x) / mu); };
}

enum class DeviceKind { kHonestQuantum, kClassicalVertex, kIidBehaviour };

inline std::string to_string(DeviceKind k) {
  switch (k) {
    case DeviceKind::kHonestQuantum:
      return "honest-quantum";
    case DeviceKind::kClassicalVertex:
      return "classical-vertex";
    case DeviceKind::kIidBehaviour:
      return "iid-behaviour";
  }
  return "?";
}

/// Memoryless device: each output depends only on the current input and
/// the device's own stream.
class DeviceModel {
 public:
  static DeviceModel honest(const QuantumStrategy& strategy, const EnergyBound& omega, std::uint64_t seed) {
    strategy.validate();
    if (!strategy.respects(omega)) throw ContractViolation("honest strategy violates the declared energy bound");
    DeviceModel d(DeviceKind::kHonestQuantum, strategy_behaviour(strategy), omega, seed);
    d.strategy_ = strategy;
    return d;
  }

  static DeviceModel classical_vertex(std::size_t index, const EnergyBound& omega, std::uint64_t seed) {
    const auto set = classical_vertices(omega);
    if (index >= set.vertices.size()) throw DomainError("classical vertex index out of range");
    DeviceModel d(DeviceKind::kClassicalVertex, set.vertices[index], omega, seed);
    d.vertex_ = index;
    return d;
  }

  static DeviceModel iid(const Behaviour& b, const EnergyBound& omega, std::uint64_t seed) {
    return DeviceModel(DeviceKind::kIidBehaviour, b, omega, seed);
  }

  DeviceKind kind() const { return kind_; }
  const Behaviour& behaviour() const { return behaviour_; }
  const EnergyBound& omega() const { return omega_; }
  std::uint64_t seed() const { return seed_; }
  const QuantumStrategy& strategy() const { return strategy_; }
  std::size_t vertex_index() const { return vertex_; }

  int respond(int x) {
    if (x != 0 && x != 1) throw ContractViolation("device input must be a bit");
    return rng_.bernoulli(behaviour_(1, x));
  }

 private:
  DeviceModel(DeviceKind kind, const Behaviour& b, const EnergyBound& omega, std::uint64_t seed)
      : kind_(kind), behaviour_(b), omega_(omega), seed_(seed), rng_(Rng::stream(seed, streams::kDevice)) {}

  DeviceKind kind_;
  Behaviour behaviour_;
  EnergyBound omega_;
  std::uint64_t seed_;
  Rng rng_;
  QuantumStrategy strategy_{};
  std::size_t vertex_ = 0;
};

struct ProtocolConfig {
  std::size_t n = 100000;
  double i_exp = 0.0;
  double gamma_est = 0.0;
  /// 0 selects the extractor input length.
  std::size_t d = 0;
  double delta = 0.0;
  EnergyBound omega{0.1, 0.1};
  std::size_t m = 64;
  double eps_ext = 1e-6;

  /// Length of A after the public padding bit for even n.
  std::size_t extractor_length() const { return n % 2 == 0 ? n + 1 : n; }
  std::size_t second_length() const { return d == 0 ? extractor_length() : d; }

  void validate() const {
    if (n < 1) throw DomainError("n must be at least 1");
    check_bias(delta);
    (void)mdl_mu(delta, omega);
    if (!std::isfinite(i_exp)) throw DomainError("i_exp must be finite");
    if (!(gamma_est >= 0.0) || !std::isfinite(gamma_est)) throw DomainError("gamma_est must be finite and >= 0");
    if (second_length() != extractor_length()) {
      throw DomainError("d must equal the extractor input length " + std::to_string(extractor_length()));
    }
    if (m > extractor_length()) throw DomainError("m exceeds the extractor input length");
    if (!(eps_ext > 0.0 && eps_ext < 1.0)) throw DomainError("eps_ext must lie in (0,1)");
  }
};

struct ProtocolTranscript {
  std::vector<std::uint8_t> xs;
  std::vector<std::uint8_t> as;
  std::vector<double> cs;
  double c_bar = 0.0;
  bool aborted = false;
  BitString z;
  bool has_key = false;
  BitString k;
  ProtocolConfig params;
  std::uint64_t source_seed = 0;
  std::uint64_t device_seed = 0;
  std::string source_kind;
  std::string device_kind;
  /// Every source emission, including z, lay in the SV band of params.delta.
  bool sv_audit_passed = true;

  std::size_t n() const { return cs.size(); }
};

/// Neumaier-compensated mean.
inline double compensated_mean(const std::vector<double>& v) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return (sum + comp) / static_cast<double>(v.size());
}

namespace detail {
inline void audit_emission(double p, double delta) {
  if (!(p >= 0.5 - delta - tol::kProbability && p <= 0.5 + delta + tol::kProbability)) {
    throw ContractViolation("emission probability " + std::to_string(p) + " outside the SV band of delta " +
                            std::to_string(delta));
  }
}
}  // namespace detail

/// Abort iff c_bar > i_exp + gamma_est.
inline ProtocolTranscript run_protocol(SourceModel& source, DeviceModel& device, const ProtocolConfig& params) {
  params.validate();
  if (source.delta() > params.delta + tol::kProbability) {
    throw ContractViolation("source bias exceeds the protocol's delta");
  }
  if (!(device.omega() == params.omega)) throw ContractViolation("device declared a different energy bound");
  ProtocolTranscript t;
  t.params = params;
  t.source_seed = source.seed();
  t.device_seed = device.seed();
  t.source_kind = to_string(source.kind());
  t.device_kind = to_string(device.kind());
  const double mu = mdl_mu(params.delta, params.omega);
  const std::size_t n = params.n;
  t.xs.reserve(n);
  t.as.reserve(n);
  t.cs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int x = source.next();
    detail::audit_emission(source.emission_probabilities().back(), params.delta);
    const int a = device.respond(x);
    t.xs.push_back(static_cast<std::uint8_t>(x));
    t.as.push_back(static_cast<std::uint8_t>(a));
    t.cs.push_back(a == x ? mu : -1.0 / mu);
  }
  t.c_bar = compensated_mean(t.cs);
  t.aborted = t.c_bar > params.i_exp + params.gamma_est;
  if (t.aborted) return t;

  const std::size_t d = params.second_length();
  std::vector<std::uint8_t> zb;
  zb.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    zb.push_back(static_cast<std::uint8_t>(source.next()));
    detail::audit_emission(source.emission_probabilities().back(), params.delta);
  }
  t.z = BitString(std::move(zb));
  std::vector<std::uint8_t> padded = t.as;
  if (padded.size() % 2 == 0) padded.push_back(0);
  const ExtractorSpec spec{padded.size(), d, params.m};
  t.k = extract(BitString(std::move(padded)), t.z, spec);
  t.has_key = true;
  return t;
}

/// freq(a, x) = |{i : (a_i, x_i) = (a, x)}| / n
inline JointDistribution empirical_frequencies(const ProtocolTranscript& t) {
  if (t.xs.empty()) throw DomainError("empirical frequencies need at least one round");
  std::array<std::size_t, 4> counts{};
  for (std::size_t i = 0; i < t.xs.size(); ++i) ++counts[cell(t.as[i], t.xs[i])];
  const double n = static_cast<double>(t.xs.size());
  std::array<double, 4> q{};
  for (std::size_t c = 0; c < 4; ++c) q[c] = static_cast<double>(counts[c]) / n;
  return JointDistribution(q);
}

/// The abort test evaluated on the empirical joint.
inline bool abort_from_frequencies(const ProtocolTranscript& t) {
  return mdl_value(empirical_frequencies(t), t.params.delta, t.params.omega) > t.params.i_exp + t.params.gamma_est;
}

/// Expected c over one round when Pr[x = 1] = p1.
inline double expected_win(const Behaviour& b, double p1, double delta, const EnergyBound& omega) {
  const double mu = mdl_mu(delta, omega);
  auto col = [&](int x) { return mu * b(x, x) - b(1 - x, x) / mu; };
  return (1.0 - p1) * col(0) + p1 * col(1);
}

}  // namespace sdira
