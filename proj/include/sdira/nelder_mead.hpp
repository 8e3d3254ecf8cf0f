#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace sdira::opt {

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::vector<double> clamp(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    return x;
  }
};

struct NelderMeadOptions {
  std::size_t max_iterations = 400;
  double f_tol = 1e-12;
  double x_tol = 1e-10;
  /// Initial simplex edge as a fraction of each box side.
  double initial_step = 0.05;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Box-constrained Nelder-Mead; trial points are projected onto the box.
inline MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                                  const std::vector<double>& start, const Box& box,
                                  const NelderMeadOptions& options = {}) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, box.clamp(start));
  for (std::size_t i = 0; i < n; ++i) {
    const double side = box.upper[i] - box.lower[i];
    double step = options.initial_step * side;
    if (simplex[i + 1][i] + step > box.upper[i]) step = -step;
    simplex[i + 1][i] += step;
    simplex[i + 1] = box.clamp(simplex[i + 1]);
  }
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = fn(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  MinimizeResult result;
  for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    double x_spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) x_spread = std::max(x_spread, std::abs(simplex[i][d] - simplex[best][d]));
    }
    if (std::abs(values[worst] - values[best]) <= options.f_tol && x_spread <= options.x_tol) {
      result.converged = true;
      break;
    }
    if (x_spread <= options.x_tol * 1e-3) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
      return box.clamp(std::move(p));
    };

    auto reflected = along(-1.0);
    const double fr = fn(reflected);
    if (fr < values[best]) {
      auto expanded = along(-2.0);
      const double fe = fn(expanded);
      if (fe < fr) {
        simplex[worst] = std::move(expanded);
        values[worst] = fe;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = std::move(reflected);
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    auto contracted = along(outside ? -0.5 : 0.5);
    const double fc = fn(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = std::move(contracted);
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
      simplex[i] = box.clamp(simplex[i]);
      values[i] = fn(simplex[i]);
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(it - values.begin());
  result.x = simplex[idx];
  result.value = *it;
  return result;
}

}  // namespace sdira::opt
