#include "tmiter/iterate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tmiter {

namespace {

Index ceil_snapped(double v) {
  const double nearest = std::round(v);
  if (std::abs(v - nearest) <= 1e-12 * std::max(1.0, v)) {
    return static_cast<Index>(nearest);
  }
  return static_cast<Index>(std::ceil(v));
}

void check_horizon(Index horizon, const RunOptions& opts) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (opts.store_points && horizon > kMaxStoredHorizon) {
    throw std::invalid_argument("refusing to store points beyond horizon 1e6");
  }
}

void check_schedule_length(const ParamSchedule& s, Index needed) {
  if (s.length && *s.length < needed) {
    throw std::out_of_range("schedule '" + s.name + "' defines " +
                            std::to_string(*s.length) + " terms, run needs " +
                            std::to_string(needed));
  }
}

}  // namespace

double inequality_slack(double tol, double lhs, double rhs) {
  return tol + 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

void InequalityCheck::record(Index n, double lhs, double rhs, double tol) {
  ++checked;
  const double excess = lhs - rhs;
  if (checked == 1 || excess > max_excess) max_excess = excess;
  if (excess > inequality_slack(tol, lhs, rhs) && !first_violation) {
    first_violation = n;
  }
}

Index compute_M(const Space& space, const Point& x0, const Point& u,
                const Point& p) {
  const double m = std::max(space.dist(x0, p), space.dist(u, p));
  return std::max<Index>(1, ceil_snapped(m));
}

ProblemInstance make_instance(SpacePtr space, MappingFamily family,
                              ParamSchedule schedule, Point u, Point x0,
                              std::optional<Point> p,
                              std::optional<Index> M_override,
                              Index fixed_point_check_n, double tol) {
  if (!space) throw std::invalid_argument("null space");
  space->validate(u);
  space->validate(x0);
  Point fixed = p ? *p : family.fixed_point;
  space->validate(fixed);
  const FixedPointReport fp =
      check_fixed_point(family, *space, fixed, fixed_point_check_n, tol);
  if (!fp.passed()) {
    throw std::invalid_argument(
        "registered point is not a common fixed point: max d(T_n p, p) = " +
        std::to_string(fp.max_displacement));
  }
  Index M = compute_M(*space, x0, u, fixed);
  if (M_override) {
    if (*M_override < M) {
      throw std::invalid_argument("M override " + std::to_string(*M_override) +
                                  " is below ceil(max{d(x0,p), d(u,p)}) = " +
                                  std::to_string(M));
    }
    M = *M_override;
  }
  return ProblemInstance{std::move(space), std::move(family),
                         std::move(schedule), std::move(u), std::move(x0),
                         std::move(fixed), M};
}

IterationTrace run_tikhonov_mann(const ProblemInstance& inst, Index horizon,
                                 RunOptions opts) {
  check_horizon(horizon, opts);
  check_schedule_length(inst.schedule, horizon + 1);
  const Space& S = *inst.space;
  const MappingFamily& T = inst.family;

  IterationTrace tr;
  tr.horizon = horizon;
  tr.residual_step.reserve(horizon);
  tr.residual_T.reserve(horizon);
  tr.tfam_gap.reserve(horizon);
  tr.x_to_p.reserve(horizon + 1);
  tr.x_to_u.reserve(horizon + 1);
  tr.u_to_p.reserve(horizon);
  tr.u_to_Tu.reserve(horizon);
  tr.u_step.reserve(horizon);
  if (opts.store_points) {
    tr.x.reserve(horizon + 1);
    tr.u.reserve(horizon);
  }

  Point x = inst.x0;
  std::optional<Point> u_prev;
  for (Index n = 0; n < horizon; ++n) {
    tr.x_to_p.push_back(S.dist(x, inst.p));
    tr.x_to_u.push_back(S.dist(x, inst.u));
    if (opts.store_points) tr.x.push_back(x);

    const Point un = S.combine(inst.u, x, inst.schedule.beta(n));
    const Point Tun = T(n, un);
    Point next = S.combine(un, Tun, inst.schedule.lambda(n));

    tr.residual_step.push_back(S.dist(x, next));
    tr.residual_T.push_back(S.dist(x, T(n, x)));
    tr.tfam_gap.push_back(S.dist(T(n + 1, un), Tun));
    tr.u_to_p.push_back(S.dist(un, inst.p));
    tr.u_to_Tu.push_back(S.dist(un, Tun));
    if (u_prev) tr.u_step.push_back(S.dist(un, *u_prev));
    if (opts.store_points) tr.u.push_back(un);

    u_prev = un;
    x = std::move(next);
  }
  tr.x_to_p.push_back(S.dist(x, inst.p));
  tr.x_to_u.push_back(S.dist(x, inst.u));
  if (opts.store_points) tr.x.push_back(std::move(x));
  return tr;
}

HalpernTrace run_modified_halpern(const ProblemInstance& inst, Index horizon,
                                  RunOptions opts) {
  check_horizon(horizon, opts);
  check_schedule_length(inst.schedule, horizon + 1);
  const Space& S = *inst.space;
  const auto& beta = inst.schedule.beta;
  const auto& lambda = inst.schedule.lambda;

  HalpernTrace tr;
  tr.horizon = horizon;
  tr.residual_step.reserve(horizon);
  tr.residual_T.reserve(horizon);
  if (opts.store_points) {
    tr.y.reserve(horizon + 1);
    tr.v.reserve(horizon);
  }

  Point y = S.combine(inst.u, inst.x0, beta(0));
  for (Index n = 0; n < horizon; ++n) {
    if (opts.store_points) tr.y.push_back(y);
    const Point Ty = inst.family(n, y);
    Point v = S.combine(y, Ty, lambda(n));
    Point next = S.combine(inst.u, v, beta(n + 1));
    tr.residual_step.push_back(S.dist(y, next));
    tr.residual_T.push_back(S.dist(y, Ty));
    if (opts.store_points) tr.v.push_back(std::move(v));
    y = std::move(next);
  }
  if (opts.store_points) tr.y.push_back(std::move(y));
  return tr;
}

EquivalenceGap halpern_equivalence_gap(const Space& space,
                                       const IterationTrace& tm,
                                       const HalpernTrace& h) {
  if (tm.u.empty() || h.y.empty()) {
    throw std::invalid_argument("equivalence check needs stored points");
  }
  const std::size_t n = std::min({tm.u.size(), h.v.size()});
  EquivalenceGap gap;
  for (std::size_t i = 0; i < n; ++i) {
    gap.max_u_y = std::max(gap.max_u_y, space.dist(tm.u[i], h.y[i]));
    gap.max_x_v = std::max(gap.max_x_v, space.dist(tm.x[i + 1], h.v[i]));
  }
  return gap;
}

bool LemmaReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const InequalityCheck& c) { return c.passed(); });
}

const InequalityCheck* LemmaReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

LemmaReport check_basic_bounds(const ProblemInstance& inst,
                               const IterationTrace& trace, double tol) {
  const auto M = static_cast<double>(inst.M);
  InequalityCheck x_p{"d(x_n,p)<=M"};
  InequalityCheck x_u{"d(x_n,u)<=2M"};
  InequalityCheck u_p{"d(u_n,p)<=M"};
  InequalityCheck u_Tu{"d(u_n,T_n u_n)<=2M"};
  for (Index n = 0; n < trace.x_to_p.size(); ++n) {
    x_p.record(n, trace.x_to_p[n], M, tol);
    x_u.record(n, trace.x_to_u[n], 2 * M, tol);
  }
  for (Index n = 0; n < trace.u_to_p.size(); ++n) {
    u_p.record(n, trace.u_to_p[n], M, tol);
    u_Tu.record(n, trace.u_to_Tu[n], 2 * M, tol);
  }
  return LemmaReport{{x_p, x_u, u_p, u_Tu}};
}

LemmaReport check_recursive_inequalities(const ProblemInstance& inst,
                                         const IterationTrace& trace,
                                         double tol) {
  if (trace.horizon < 2) {
    throw std::invalid_argument("recursive inequalities need horizon >= 2");
  }
  const auto M = static_cast<double>(inst.M);
  const auto& beta = inst.schedule.beta;
  const auto& lambda = inst.schedule.lambda;
  const auto& s = trace.residual_step;

  InequalityCheck a{"u_step_recursion"};
  InequalityCheck b{"x_step_recursion"};
  InequalityCheck c{"lambda_T_residual"};
  for (Index n = 0; n + 1 < trace.horizon; ++n) {
    const double db = std::abs(beta(n + 1) - beta(n));
    const double dl = std::abs(lambda(n + 1) - lambda(n));
    a.record(n, trace.u_step[n], beta(n + 1) * s[n] + 2 * M * db, tol);
    b.record(n, s[n + 1],
           beta(n + 1) * s[n] + trace.tfam_gap[n] + 2 * M * (dl + db), tol);
  }
  for (Index n = 0; n < trace.horizon; ++n) {
    c.record(n, lambda(n) * trace.residual_T[n],
           s[n] + 2 * M * (1 - beta(n)), tol);
  }
  return LemmaReport{{a, b, c}};
}

}  // namespace tmiter
