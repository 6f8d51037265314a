#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "pathcert/polynomial.hpp"

namespace pathcert {

// One polynomial piece of a motion plan, parametrized on t in [0,1].
// Keys are the TC-space variable ids of the chain the plan drives.
struct PlanSegment {
  std::map<VarId, Polynomial<double>> coords;

  std::map<VarId, double> eval(double t) const {
    std::map<VarId, double> out;
    for (const auto& [v, p] : coords) out[v] = p.eval({{kTimeVar, t}});
    return out;
  }

  int degree() const {
    int d = 0;
    for (const auto& [v, p] : coords) d = std::max(d, p.degree());
    return d;
  }
};

using TcPoint = std::map<VarId, double>;

inline void require_same_vars(const TcPoint& a, const TcPoint& b,
                              const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(what);
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib)
    if (ia->first != ib->first) throw std::invalid_argument(what);
}

// rho(t) = s_start + t * (s_end - s_start)
inline PlanSegment linear_segment(const TcPoint& s_start, const TcPoint& s_end) {
  require_same_vars(s_start, s_end, "linear_segment: variable sets differ");
  PlanSegment seg;
  const auto t = Polynomial<double>::variable(kTimeVar);
  for (const auto& [v, x0] : s_start) {
    const double x1 = s_end.at(v);
    seg.coords[v] = Polynomial<double>::constant(x0) + (x1 - x0) * t;
  }
  return seg;
}

// Cubic Hermite on [0,1]: rho(0)=s0, rho(1)=s1, rho'(0)=v0, rho'(1)=v1.
inline PlanSegment hermite_cubic_segment(const TcPoint& s0, const TcPoint& v0,
                                         const TcPoint& s1, const TcPoint& v1) {
  require_same_vars(s0, s1, "hermite_cubic_segment: variable sets differ");
  require_same_vars(s0, v0, "hermite_cubic_segment: variable sets differ");
  require_same_vars(s0, v1, "hermite_cubic_segment: variable sets differ");
  using P = Polynomial<double>;
  const P t = P::variable(kTimeVar);
  const P t2 = t * t, t3 = t2 * t;
  const P h00 = 2.0 * t3 - 3.0 * t2 + P::constant(1.0);
  const P h10 = t3 - 2.0 * t2 + t;
  const P h01 = -2.0 * t3 + 3.0 * t2;
  const P h11 = t3 - t2;
  PlanSegment seg;
  for (const auto& [v, p0] : s0)
    seg.coords[v] =
        p0 * h00 + v0.at(v) * h10 + s1.at(v) * h01 + v1.at(v) * h11;
  return seg;
}

// Affine pullback of a segment whose parameter ranges over [t0,t1] onto [0,1].
inline PlanSegment reparametrize_to_unit(const PlanSegment& seg, double t0,
                                         double t1) {
  if (!(t1 > t0)) throw std::invalid_argument("reparametrize: need t1 > t0");
  using P = Polynomial<double>;
  const P u = P::constant(t0) + (t1 - t0) * P::variable(kTimeVar);
  PlanSegment out;
  for (const auto& [v, p] : seg.coords)
    out.coords[v] = p.substitute({{kTimeVar, u}});
  return out;
}

// Piecewise plan; each segment lives on its own unit interval.  Mismatched
// knots are recorded, not rejected: certification is per-segment anyway.
struct MotionPlan {
  std::vector<PlanSegment> segments;
  std::vector<double> knot_mismatches;  // one per interior knot

  static MotionPlan from_segments(std::vector<PlanSegment> segs) {
    MotionPlan plan;
    plan.segments = std::move(segs);
    for (std::size_t i = 0; i + 1 < plan.segments.size(); ++i) {
      const auto end_i = plan.segments[i].eval(1.0);
      const auto start_next = plan.segments[i + 1].eval(0.0);
      double worst = 0.0;
      for (const auto& [v, x] : end_i) {
        const auto it = start_next.find(v);
        worst = std::max(worst, it == start_next.end()
                                    ? std::abs(x)
                                    : std::abs(x - it->second));
      }
      plan.knot_mismatches.push_back(worst);
    }
    return plan;
  }

  double max_knot_mismatch() const {
    double m = 0.0;
    for (double x : knot_mismatches) m = std::max(m, x);
    return m;
  }

  bool continuous(double tol = 1e-9) const { return max_knot_mismatch() <= tol; }
};

}  // namespace pathcert
