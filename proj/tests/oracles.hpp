#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's algorithms; only its plain data types are shared.

#include "tmiter/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using tmiter::TreePoint;
using tmiter::Vec;

inline double tree_dist(const TreePoint& a, const TreePoint& b) {
  if (a.t == 0.0 || b.t == 0.0 || a.ray == b.ray) return std::abs(a.t - b.t);
  return a.t + b.t;
}

// The point q on the segment [x, y] with d(x, q) = s, found by testing every
// candidate on the two rays involved against d(x,q) = s and
// d(q,y) = d(x,y) - s rather than by walking the geodesic.
inline TreePoint tree_point_at(const TreePoint& x, const TreePoint& y,
                               double s) {
  const double total = tree_dist(x, y);
  std::vector<TreePoint> candidates{TreePoint::origin()};
  for (std::size_t ray : {x.ray, y.ray}) {
    if (ray == 0) continue;
    for (double t : {x.t + s, x.t - s, s - x.t}) {
      if (t > 0.0) candidates.push_back({ray, t});
    }
  }
  TreePoint best;
  double best_err = std::numeric_limits<double>::infinity();
  for (const auto& q : candidates) {
    const double err = std::abs(tree_dist(x, q) - s) +
                       std::abs(tree_dist(q, y) - (total - s));
    if (err < best_err) {
      best_err = err;
      best = q;
    }
  }
  return best;
}

// argmin_z 1/2 (z - x)^2 + thr |z| by comparing the objective at every
// stationary-point candidate of the three smooth pieces.
inline double prox_abs(double x, double thr) {
  auto objective = [&](double z) { return 0.5 * (z - x) * (z - x) + thr * std::abs(z); };
  double best = 0.0;
  if (const double z = x - thr; z > 0 && objective(z) < objective(best)) best = z;
  if (const double z = x + thr; z < 0 && objective(z) < objective(best)) best = z;
  return best;
}

// Tikhonov-Mann in a Hilbert space written out as a single vector recursion:
// x_{n+1} = (1 - l_n) v + l_n T_n v with v = (1 - b_n) u + b_n x_n.
inline std::vector<Vec> tm_direct(
    const std::function<Vec(std::uint64_t, const Vec&)>& T,
    const std::function<double(std::uint64_t)>& beta,
    const std::function<double(std::uint64_t)>& lambda, const Vec& u,
    const Vec& x0, std::uint64_t steps) {
  std::vector<Vec> xs{x0};
  xs.reserve(steps + 1);
  for (std::uint64_t n = 0; n < steps; ++n) {
    const Vec v = u + beta(n) * (xs.back() - u);
    xs.push_back(v + lambda(n) * (T(n, v) - v));
  }
  return xs;
}

// Least n with sum_{i=n+1}^{m} b_i <= eps for every m <= horizon, by scanning
// all (n, m) pairs. Quadratic; keep horizons small.
inline std::uint64_t brute_cauchy_index(const std::vector<double>& b,
                                        double eps) {
  const std::uint64_t horizon = b.size() - 1;
  for (std::uint64_t n = 0; n <= horizon; ++n) {
    bool ok = true;
    double partial = 0.0;
    for (std::uint64_t m = n + 1; m <= horizon && ok; ++m) {
      partial += b[m];
      ok = partial <= eps;
    }
    if (ok) return n;
  }
  return horizon;
}

// Least N with residuals[n] <= eps for every N <= n <= last.
inline std::uint64_t brute_tail_index(const std::vector<double>& r,
                                      std::uint64_t last, double eps) {
  std::uint64_t N = last + 1;
  while (N > 0 && r[N - 1] <= eps) --N;
  return N;
}

// Hand-rolled generators for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
  }
  Vec vec(Eigen::Index dim, double box) {
    Vec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = uniform(-box, box);
    return v;
  }
  TreePoint tree(std::size_t rays, double radius) {
    // The origin one time in eight.
    if (integer(0, 7) == 0) return TreePoint::origin();
    return {static_cast<std::size_t>(integer(1, rays)), uniform(1e-3, radius)};
  }
  // Mostly interior values, with the endpoints forced now and then.
  double unit() {
    switch (integer(0, 9)) {
      case 0: return 0.0;
      case 1: return 1.0;
      default: return uniform(0.0, 1.0);
    }
  }
};

}  // namespace oracle
