#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pathcert/conic.hpp"
#include "pathcert/geometry.hpp"
#include "pathcert/kinematics.hpp"
#include "pathcert/plan.hpp"

namespace pathcert {

// A polynomial in t that is affine in a set of scalar unknowns (hyperplane
// coefficients): constant part plus one coefficient polynomial per unknown.
// Products of two unknown-bearing expressions throw, which enforces the
// affinity invariant by construction.
template <class S>
struct AffinePoly {
  Polynomial<S> constant;
  std::map<int, Polynomial<S>> lin;  // unknown id -> coefficient polynomial

  static AffinePoly known(Polynomial<S> p) {
    AffinePoly out;
    out.constant = std::move(p);
    return out;
  }
  static AffinePoly unknown(int id, Polynomial<S> coeff) {
    AffinePoly out;
    if (coeff.degree() >= 0) out.lin.emplace(id, std::move(coeff));
    return out;
  }

  bool is_known() const { return lin.empty(); }

  int degree() const {
    int d = constant.degree();
    for (const auto& [id, p] : lin) d = std::max(d, p.degree());
    return d;
  }

  Polynomial<S> instantiate(const std::vector<S>& values) const {
    Polynomial<S> out = constant;
    for (const auto& [id, p] : lin) {
      if (id < 0 || id >= static_cast<int>(values.size()))
        throw std::out_of_range("AffinePoly::instantiate: missing unknown");
      out += p * values[static_cast<std::size_t>(id)];
    }
    return out;
  }

  AffinePoly& operator+=(const AffinePoly& o) {
    constant += o.constant;
    for (const auto& [id, p] : o.lin) {
      auto [it, fresh] = lin.emplace(id, p);
      if (!fresh) {
        it->second += p;
        if (it->second.degree() < 0) lin.erase(it);
      }
    }
    return *this;
  }
  AffinePoly& operator-=(const AffinePoly& o) { return *this += -o; }

  AffinePoly operator-() const {
    AffinePoly out;
    out.constant = -constant;
    for (const auto& [id, p] : lin) out.lin.emplace(id, -p);
    return out;
  }

  friend AffinePoly operator+(AffinePoly a, const AffinePoly& b) {
    a += b;
    return a;
  }
  friend AffinePoly operator-(AffinePoly a, const AffinePoly& b) {
    a -= b;
    return a;
  }
  friend AffinePoly operator*(const AffinePoly& a, const Polynomial<S>& k) {
    AffinePoly out;
    out.constant = a.constant * k;
    for (const auto& [id, p] : a.lin) {
      Polynomial<S> prod = p * k;
      if (prod.degree() >= 0) out.lin.emplace(id, std::move(prod));
    }
    return out;
  }
  friend AffinePoly operator*(const Polynomial<S>& k, const AffinePoly& a) {
    return a * k;
  }
  friend AffinePoly operator*(const AffinePoly& a, const AffinePoly& b) {
    if (!a.is_known() && !b.is_known())
      throw std::domain_error(
          "AffinePoly: product would be quadratic in the unknowns");
    return a.is_known() ? b * a.constant : a * b.constant;
  }
};

// Symmetric matrix with AffinePoly entries, stored dense row-major.
template <class S>
struct AffineMatrix {
  int n = 0;
  std::vector<AffinePoly<S>> e;

  explicit AffineMatrix(int size = 0)
      : n(size), e(static_cast<std::size_t>(size * size)) {}

  AffinePoly<S>& at(int i, int j) { return e.at(i * n + j); }
  const AffinePoly<S>& at(int i, int j) const { return e.at(i * n + j); }

  void set_sym(int i, int j, AffinePoly<S> v) {
    if (i != j) at(j, i) = v;
    at(i, j) = std::move(v);
  }

  int degree() const {
    int d = -1;
    for (const auto& p : e) d = std::max(d, p.degree());
    return d;
  }
};

// The family of candidate separating hyperplanes a(t)'x + b(t) = 0 with
// degree-d coefficient polynomials.  The 4*(degree+1) scalar unknowns are
// numbered t-coefficient-major per component: a_x, a_y, a_z, then b.
struct HyperplaneTemplate {
  int degree = 1;

  int coeff_count() const { return 4 * (degree + 1); }
  int a_index(int w, int k) const { return w * (degree + 1) + k; }
  int b_index(int k) const { return 3 * (degree + 1) + k; }

  template <class S>
  AffinePoly<S> a_component(int w) const {
    AffinePoly<S> out;
    for (int k = 0; k <= degree; ++k)
      out += AffinePoly<S>::unknown(
          a_index(w, k), Polynomial<S>::term(Monomial::var(kTimeVar, k), S(1)));
    return out;
  }
  template <class S>
  AffinePoly<S> b_component() const {
    AffinePoly<S> out;
    for (int k = 0; k <= degree; ++k)
      out += AffinePoly<S>::unknown(
          b_index(k), Polynomial<S>::term(Monomial::var(kTimeVar, k), S(1)));
    return out;
  }
};

// Shape of the weighted-sum decomposition certifying nonnegativity of a
// degree-n polynomial on [0, 1]: p = w_l * l + w_n * n with l, n SOS.
// Even n = 2d uses weights {1, t(1-t)} and degrees {2d, 2d-2}; odd n = 2d+1
// uses {t, 1-t} and degrees {2d, 2d}.  deg_nu == -2 marks an absent term.
struct IntervalDecompTemplate {
  int n = 0;
  bool even = true;
  int deg_lambda = 0;
  int deg_nu = -2;

  bool has_nu() const { return deg_nu >= 0; }
  int lambda_basis() const { return deg_lambda / 2 + 1; }
  int nu_basis() const { return has_nu() ? deg_nu / 2 + 1 : 0; }
};

IntervalDecompTemplate decomposition_template(int n);

template <class S>
Polynomial<S> lambda_weight(const IntervalDecompTemplate& tpl) {
  if (tpl.even) return Polynomial<S>::constant(S(1));
  return Polynomial<S>::variable(kTimeVar);
}
template <class S>
Polynomial<S> nu_weight(const IntervalDecompTemplate& tpl) {
  const auto t = Polynomial<S>::variable(kTimeVar);
  const auto one = Polynomial<S>::constant(S(1));
  if (tpl.even) return t * (one - t);
  return one - t;
}

// One collision-pair constraint before lowering: either a scalar
// polynomial-nonnegativity condition on [0, 1] or a matrix PSD condition.
template <class S>
struct PairConstraint {
  std::string label;
  bool is_matrix = false;
  AffinePoly<S> scalar;
  AffineMatrix<S> matrix;
};

// Denominator-cleared separation conditions.  `sign` is +1 for the side
// required to satisfy a'x + b >= 1 and -1 for the side with a'x + b <= -1.
// Each polytope vertex with composed kinematics (f, g) yields the scalar
// condition sign*(a'f + b*g) - g >= 0 on [0, 1].
template <class S>
std::vector<AffinePoly<S>> build_polytope_side(
    const std::vector<ComposedPoint<S>>& vertices, const HyperplaneTemplate& hp,
    int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("build_polytope_side: sign must be +1 or -1");
  std::vector<AffinePoly<S>> out;
  const auto sgn = Polynomial<S>::constant(S(sign));
  for (const auto& v : vertices) {
    AffinePoly<S> c;
    for (int w = 0; w < 3; ++w) c += hp.a_component<S>(w) * v.num[w];
    c += hp.b_component<S>() * v.den;
    out.push_back(c * sgn - AffinePoly<S>::known(v.den));
  }
  return out;
}

// Sphere side: with h = sign*(a'f + b*g) - g, the 4x4 condition
// [[h*I, r*g*a], [r*g*a', h]] >= 0 on [0, 1] encodes
// sign*(a'c + b) >= 1 + r*|a| after clearing the positive denominator g.
template <class S>
AffineMatrix<S> build_sphere_side(const ComposedPoint<S>& center, double radius,
                                  const HyperplaneTemplate& hp, int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("build_sphere_side: sign must be +1 or -1");
  if (radius < 0.0)
    throw std::invalid_argument("build_sphere_side: negative radius");

  AffinePoly<S> h;
  for (int w = 0; w < 3; ++w) h += hp.a_component<S>(w) * center.num[w];
  h += hp.b_component<S>() * center.den;
  h = h * Polynomial<S>::constant(S(sign)) - AffinePoly<S>::known(center.den);

  const Polynomial<S> rg =
      center.den * Polynomial<S>::constant(scalar_from_double<S>(radius));
  AffineMatrix<S> m(4);
  for (int i = 0; i < 4; ++i) m.at(i, i) = h;
  for (int w = 0; w < 3; ++w) m.set_sym(w, 3, hp.a_component<S>(w) * rg);
  return m;
}

// All separation conditions for one ordered pair (A gets sign +1, B sign -1),
// in the deterministic order the program and the checker both rely on.
template <class S>
std::vector<PairConstraint<S>> build_pair_constraints(
    const KinematicChain& chain, const ConvexBody& body_a,
    const ConvexBody& body_b, const PlanSegment& segment,
    const HyperplaneTemplate& hp) {
  std::vector<PairConstraint<S>> out;
  auto add_body = [&](const ConvexBody& body, int sign) {
    body.validate();
    if (body.kind == ConvexBody::Kind::Polytope) {
      std::vector<ComposedPoint<S>> verts;
      for (const auto& v : body.vertices)
        verts.push_back(compose_with_plan<S>(
            chain, fk_point<S>(chain, 0, body.link, v), segment.coords));
      auto cons = build_polytope_side(verts, hp, sign);
      for (std::size_t i = 0; i < cons.size(); ++i) {
        PairConstraint<S> pc;
        pc.label = body.name + ":v" + std::to_string(i);
        pc.scalar = std::move(cons[i]);
        out.push_back(std::move(pc));
      }
    } else {
      const auto center = compose_with_plan<S>(
          chain, fk_point<S>(chain, 0, body.link, body.center), segment.coords);
      PairConstraint<S> pc;
      pc.label = body.name + ":sphere";
      pc.is_matrix = true;
      pc.matrix = build_sphere_side(center, body.radius, hp, sign);
      out.push_back(std::move(pc));
    }
  };
  add_body(body_a, +1);
  add_body(body_b, -1);
  return out;
}

// Where one lowered constraint lives inside an SdpProblem.
struct LoweredConstraint {
  std::string label;
  IntervalDecompTemplate tpl;
  int y_dim = 0;  // 0 for scalar constraints; matrix side length otherwise
  int gram_lambda = -1;  // PSD block indices
  int gram_nu = -1;      // -1 when the template has no nu term
  int slack_index = -1;  // nonnegative block entry holding gamma - floor
  double gamma_floor = 0.0;
  int first_row = 0;
  int row_count = 0;
};

// Coefficient-matching equalities for c(t) >= 0 on [0, 1]:
//   c == w_l * [t]'Ql[t] + w_n * [t]'Qn[t] + gamma,   gamma >= gamma_floor.
// Emits exactly tpl.n + 1 rows; throws if deg c exceeds the template.
LoweredConstraint lower_scalar_constraint(SdpProblem& sdp,
                                          const AffinePoly<double>& c,
                                          const IntervalDecompTemplate& tpl,
                                          double gamma_floor = 0.0,
                                          std::string label = {});

// Matrix analog via scalarization p(t, y) = y'M(t)y with multipliers SOS in
// the basis {t^i y_j : i <= deg/2, j < m} (y-degree exactly one) and slack
// gamma * |y|^2.  Emits (tpl.n + 1) * m * (m + 1) / 2 rows.
LoweredConstraint lower_matrix_constraint(SdpProblem& sdp,
                                          const AffineMatrix<double>& m,
                                          const IntervalDecompTemplate& tpl,
                                          double gamma_floor = 0.0,
                                          std::string label = {});

// One per-(pair, segment) feasibility program plus the symbol table needed to
// read a certificate back out of a solution.
struct PairProgram {
  std::string body_a, body_b;
  int segment_index = 0;
  HyperplaneTemplate hp;
  double gamma_min = 1e-6;
  SdpProblem sdp;
  std::vector<LoweredConstraint> constraints;
};

PairProgram assemble_pair_program(const KinematicChain& chain,
                                  const ConvexBody& body_a,
                                  const ConvexBody& body_b,
                                  const PlanSegment& segment, int segment_index,
                                  int hyperplane_degree,
                                  double gamma_min = 1e-6);

// A solved separation certificate: the concrete hyperplane polynomials plus,
// per constraint, the Gram matrices and slack that witness nonnegativity.
struct CertificateConstraint {
  std::string label;
  bool is_matrix = false;
  int target_degree = 0;
  Eigen::MatrixXd gram_lambda;
  Eigen::MatrixXd gram_nu;  // 0x0 when absent
  double gamma = 0.0;
};

struct Certificate {
  std::string body_a, body_b;
  int segment_index = 0;
  int hyperplane_degree = 1;
  Eigen::MatrixXd a_coeffs;  // 3 x (degree+1), row = component, col = t-power
  Eigen::VectorXd b_coeffs;  // degree+1
  std::vector<CertificateConstraint> constraints;

  Polynomial<double> a_poly(int w) const;
  Polynomial<double> b_poly() const;
  // Unknown vector in HyperplaneTemplate numbering (for instantiate()).
  std::vector<double> hyperplane_values() const;
};

Certificate extract_certificate(const PairProgram& prog,
                                const BlockValues& solution);

}  // namespace pathcert
