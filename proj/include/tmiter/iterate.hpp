#pragma once

#include "tmiter/geometry.hpp"
#include "tmiter/mappings.hpp"
#include "tmiter/sequences.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tmiter {

/// Everything needed to run the iteration: the space, the family, the
/// schedule, anchor u, start x0, a registered common fixed point p and the
/// bound M = ceil(max{d(x0,p), d(u,p)}), clamped to at least 1.
struct ProblemInstance {
  SpacePtr space;
  MappingFamily family;
  ParamSchedule schedule;
  Point u;
  Point x0;
  Point p;
  Index M = 1;
};

/// ceil(max{d(x0,p), d(u,p)}) with a floor of 1. Distances within 1e-12
/// relative of an integer are snapped to it first.
Index compute_M(const Space& space, const Point& x0, const Point& u,
                const Point& p);

/// Validates the points, checks p against T_n for n <= fixed_point_check_n
/// (throws std::invalid_argument if d(T_n p, p) > tol) and computes M. An
/// `M_override` smaller than the computed bound is rejected.
ProblemInstance make_instance(SpacePtr space, MappingFamily family,
                              ParamSchedule schedule, Point u, Point x0,
                              std::optional<Point> p = std::nullopt,
                              std::optional<Index> M_override = std::nullopt,
                              Index fixed_point_check_n = 1000,
                              double tol = 1e-9);

struct RunOptions {
  bool store_points = false;
};

/// Points beyond this horizon are never stored.
inline constexpr Index kMaxStoredHorizon = 1'000'000;

/// Orbit of x_{n+1} = (1 - l_n) u_n + l_n T_n u_n, u_n = (1 - b_n) u + b_n x_n.
/// Residual sequences are always recorded; points only on request.
struct IterationTrace {
  Index horizon = 0;

  std::vector<Point> x;  // horizon + 1 entries when stored
  std::vector<Point> u;  // horizon entries when stored

  std::vector<double> residual_step;  // d(x_n, x_{n+1})
  std::vector<double> residual_T;     // d(x_n, T_n x_n)
  std::vector<double> tfam_gap;       // d(T_{n+1} u_n, T_n u_n)

  std::vector<double> x_to_p;   // d(x_n, p), horizon + 1 entries
  std::vector<double> x_to_u;   // d(x_n, u), horizon + 1 entries
  std::vector<double> u_to_p;   // d(u_n, p)
  std::vector<double> u_to_Tu;  // d(u_n, T_n u_n)
  std::vector<double> u_step;   // d(u_{n+1}, u_n), horizon - 1 entries
};

IterationTrace run_tikhonov_mann(const ProblemInstance& inst, Index horizon,
                                 RunOptions opts = {});

/// y_{n+1} = (1 - b_{n+1}) u + b_{n+1} v_n, v_n = (1 - l_n) y_n + l_n T_n y_n,
/// started at y_0 = (1 - b_0) u + b_0 x_0.
struct HalpernTrace {
  Index horizon = 0;
  std::vector<Point> y;  // horizon + 1 entries when stored
  std::vector<Point> v;  // horizon entries when stored
  std::vector<double> residual_step;  // d(y_n, y_{n+1})
  std::vector<double> residual_T;     // d(y_n, T_n y_n)
};

HalpernTrace run_modified_halpern(const ProblemInstance& inst, Index horizon,
                                  RunOptions opts = {});

/// max over n of d(u_n, y_n) and d(x_{n+1}, v_n). Both traces need points.
struct EquivalenceGap {
  double max_u_y = 0.0;
  double max_x_v = 0.0;
  double max() const { return std::max(max_u_y, max_x_v); }
};

EquivalenceGap halpern_equivalence_gap(const Space& space,
                                       const IterationTrace& tm,
                                       const HalpernTrace& h);

/// One inequality checked along a trace.
struct InequalityCheck {
  InequalityCheck() = default;
  explicit InequalityCheck(std::string n) : name(std::move(n)) {}

  std::string name;
  Index checked = 0;
  double max_excess = 0.0;  // max of lhs - rhs; <= 0 when the bound is strict
  std::optional<Index> first_violation;
  bool passed() const { return !first_violation.has_value(); }

  /// Folds in one instance lhs <= rhs observed at index n.
  void record(Index n, double lhs, double rhs, double tol);
};

struct LemmaReport {
  std::vector<InequalityCheck> checks;
  bool passed() const;
  const InequalityCheck* find(std::string_view name) const;
};

/// d(x_n,p) <= M, d(x_n,u) <= 2M, d(u_n,p) <= M, d(u_n,T_n u_n) <= 2M.
LemmaReport check_basic_bounds(const ProblemInstance& inst,
                               const IterationTrace& trace, double tol);

/// (a) d(u_{n+1},u_n) <= b_{n+1} d(x_{n+1},x_n) + 2M|b_{n+1} - b_n|
/// (b) d(x_{n+2},x_{n+1}) <= b_{n+1} d(x_{n+1},x_n) + d(T_{n+1}u_n, T_n u_n)
///                            + 2M(|l_{n+1} - l_n| + |b_{n+1} - b_n|)
/// (c) l_n d(x_n, T_n x_n) <= d(x_n, x_{n+1}) + 2M(1 - b_n)
LemmaReport check_recursive_inequalities(const ProblemInstance& inst,
                                         const IterationTrace& trace,
                                         double tol);

/// Absolute tolerance plus 1e-12 relative to the size of the compared terms.
double inequality_slack(double tol, double lhs, double rhs);

}  // namespace tmiter
