#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathcert/plan.hpp"
#include "pathcert/polynomial.hpp"

namespace pathcert {

enum class JointKind { Revolute, Prismatic };

// One joint: a fixed origin transform from the parent link frame to the joint
// frame, followed by rotation about (R) or translation along (P) `axis`.
struct Joint {
  JointKind kind = JointKind::Revolute;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Eigen::Matrix3d origin_rot = Eigen::Matrix3d::Identity();
  Eigen::Vector3d origin_xyz = Eigen::Vector3d::Zero();
  double lo = 0.0, hi = 0.0;  // C-space limits (radians / meters)
};

struct Link {
  std::string name;
  int parent = -1;  // -1 only for the world root
  bool has_joint = false;
  Joint joint;
  VarId tc_var = -1;
};

// Rooted tree of links; link 0 is always the fixed world frame.
class KinematicChain {
 public:
  KinematicChain() { links_.push_back(Link{"world", -1, false, {}, -1}); }

  int add_link(const std::string& name, int parent, const Joint& joint,
               VarId tc_var);
  void validate() const;  // throws std::invalid_argument

  const std::vector<Link>& links() const { return links_; }
  const Link& link(int i) const { return links_.at(i); }
  int size() const { return static_cast<int>(links_.size()); }
  int find_link(const std::string& name) const;  // -1 if absent

  std::vector<VarId> tc_vars() const;
  JointKind var_kind(VarId v) const;  // throws if v is not a chain variable

  // Numeric forward kinematics at a C-space configuration (theta for R,
  // displacement for P), keyed by the joint's TC variable id.
  Eigen::Isometry3d numeric_link_pose(int link,
                                      const std::map<VarId, double>& q) const;

 private:
  std::vector<Link> links_;
};

// theta = 2*atan(tau) for revolute variables; prismatic values pass through.
std::map<VarId, double> tc_to_cspace(const KinematicChain& chain,
                                     const std::map<VarId, double>& tc);
std::map<VarId, double> cspace_to_tc(const KinematicChain& chain,
                                     const std::map<VarId, double>& q);

// ---------------------------------------------------------------------------
// Symbolic rational kinematics.  A rigid transform with polynomial entries
// over a shared positive denominator: actual transform = (rot/den, trans/den).

template <class S>
struct RationalTransform {
  PolyMatrix<S> rot{3, 3, false};
  std::array<Polynomial<S>, 3> trans;
  Polynomial<S> den = Polynomial<S>::constant(S(1));

  static RationalTransform identity() {
    RationalTransform out;
    out.rot = PolyMatrix<S>::identity(3);
    return out;
  }
};

template <class S>
RationalTransform<S> compose(const RationalTransform<S>& a,
                             const RationalTransform<S>& b) {
  RationalTransform<S> out;
  out.rot = a.rot * b.rot;
  for (int i = 0; i < 3; ++i) {
    Polynomial<S> s;
    for (int j = 0; j < 3; ++j) s += a.rot.entry(i, j) * b.trans[j];
    out.trans[i] = s + b.den * a.trans[i];
  }
  out.den = a.den * b.den;
  return out;
}

// Generic inverse; note den becomes den^2.  Kinematic paths avoid this by
// inverting joint steps structurally (see fk_point).
template <class S>
RationalTransform<S> rt_inverse(const RationalTransform<S>& a) {
  RationalTransform<S> out;
  out.rot = a.rot.transpose() * a.den;
  for (int i = 0; i < 3; ++i) {
    Polynomial<S> s;
    for (int j = 0; j < 3; ++j) s += a.rot.entry(j, i) * a.trans[j];
    out.trans[i] = Polynomial<S>() - s;
  }
  out.den = a.den * a.den;
  return out;
}

template <class S>
RationalTransform<S> rt_from_rigid(const Eigen::Matrix3d& R,
                                   const Eigen::Vector3d& p) {
  RationalTransform<S> out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      out.rot.set_entry(i, j,
                        Polynomial<S>::constant(scalar_from_double<S>(R(i, j))));
    out.trans[i] = Polynomial<S>::constant(scalar_from_double<S>(p(i)));
  }
  return out;
}

// Tan-half-angle Rodrigues rotation: with K = skew(axis) and u = tan(theta/2),
//   R = [ (1+u^2) I + 2u K + 2u^2 K^2 ] / (1+u^2).
// K^2 is computed in S so the exact-arithmetic instantiation stays exact.
template <class S>
RationalTransform<S> joint_motion(const Joint& joint, VarId var,
                                  bool reversed = false) {
  using P = Polynomial<S>;
  RationalTransform<S> out;
  const P u = reversed ? P() - P::variable(var) : P::variable(var);
  if (joint.kind == JointKind::Prismatic) {
    out.rot = PolyMatrix<S>::identity(3);
    for (int i = 0; i < 3; ++i)
      out.trans[i] = scalar_from_double<S>(joint.axis(i)) * u;
    return out;
  }
  S k[3][3] = {};
  const S ax = scalar_from_double<S>(joint.axis(0));
  const S ay = scalar_from_double<S>(joint.axis(1));
  const S az = scalar_from_double<S>(joint.axis(2));
  k[0][1] = -az; k[0][2] = ay;
  k[1][0] = az;  k[1][2] = -ax;
  k[2][0] = -ay; k[2][1] = ax;
  S k2[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      S s = S(0);
      for (int l = 0; l < 3; ++l) s += k[i][l] * k[l][j];
      k2[i][j] = s;
    }
  const P u2 = u * u;
  out.den = P::constant(S(1)) + u2;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      P e = (i == j) ? out.den : P();
      e += (S(2) * k[i][j]) * u + (S(2) * k2[i][j]) * u2;
      out.rot.set_entry(i, j, e);
    }
  return out;
}

// Transform contributed by `link`'s joint: origin transform then joint motion.
template <class S>
RationalTransform<S> joint_step(const Link& link) {
  const auto fixed =
      rt_from_rigid<S>(link.joint.origin_rot, link.joint.origin_xyz);
  if (!link.has_joint) return fixed;
  return compose(fixed, joint_motion<S>(link.joint, link.tc_var));
}

// Structural inverse of a joint step: motion(-q) then origin^{-1}; keeps the
// denominator degree at 2 per revolute variable instead of squaring it.
template <class S>
RationalTransform<S> joint_step_inverse(const Link& link) {
  const Eigen::Matrix3d rt = link.joint.origin_rot.transpose();
  const auto fixed_inv =
      rt_from_rigid<S>(rt, (-rt * link.joint.origin_xyz).eval());
  if (!link.has_joint) return fixed_inv;
  return compose(joint_motion<S>(link.joint, link.tc_var, /*reversed=*/true),
                 fixed_inv);
}

// A point rigidly attached to `link`, expressed in `frame`, as three rational
// components over one shared positive denominator.
template <class S>
struct RationalPoint {
  int frame = 0;
  int link = 0;
  std::array<Polynomial<S>, 3> num;
  Polynomial<S> den = Polynomial<S>::constant(S(1));
  std::vector<VarId> vars;  // TC variables on the frame->link path

  RationalFunction<S> component(int i) const {
    return RationalFunction<S>(num.at(i), den, /*den_positive=*/true);
  }
};

using RationalFK = RationalPoint<double>;

namespace detail {
inline std::vector<int> path_to_root(const KinematicChain& chain, int link) {
  std::vector<int> out;
  for (int u = link; u != -1; u = chain.link(u).parent) out.push_back(u);
  return out;  // link first, root last
}
}  // namespace detail

// Symbolic FK along the tree path frame_F -> link_L applied to `point` (fixed
// in L's frame).  Per-variable degrees stay <= 2 (revolute) / <= 1 (prismatic).
template <class S>
RationalPoint<S> fk_point(const KinematicChain& chain, int frame_F, int link_L,
                          const Eigen::Vector3d& point) {
  if (frame_F < 0 || frame_F >= chain.size() || link_L < 0 ||
      link_L >= chain.size())
    throw std::invalid_argument("fk_point: invalid link id");

  auto up_f = detail::path_to_root(chain, frame_F);
  auto up_l = detail::path_to_root(chain, link_L);
  // strip the common suffix down to the lowest common ancestor
  while (up_f.size() > 1 && up_l.size() > 1 &&
         up_f[up_f.size() - 2] == up_l[up_l.size() - 2]) {
    up_f.pop_back();
    up_l.pop_back();
  }
  const int lca = up_f.back();  // == up_l.back()

  RationalPoint<S> out;
  out.frame = frame_F;
  out.link = link_L;

  auto T = RationalTransform<S>::identity();
  for (int u : up_f) {  // ascend F -> lca
    if (u == lca) break;
    T = compose(T, joint_step_inverse<S>(chain.link(u)));
    if (chain.link(u).has_joint) out.vars.push_back(chain.link(u).tc_var);
  }
  for (auto it = up_l.rbegin(); it != up_l.rend(); ++it) {  // descend lca -> L
    if (*it == lca) continue;
    T = compose(T, joint_step<S>(chain.link(*it)));
    if (chain.link(*it).has_joint) out.vars.push_back(chain.link(*it).tc_var);
  }

  for (int i = 0; i < 3; ++i) {
    Polynomial<S> s;
    for (int j = 0; j < 3; ++j)
      s += T.rot.entry(i, j) *
           Polynomial<S>::constant(scalar_from_double<S>(point(j)));
    out.num[i] = s + T.trans[i];
  }
  out.den = T.den;
  return out;
}

inline Eigen::Vector3d eval_point(const RationalPoint<double>& fk,
                                  const std::map<VarId, double>& tc) {
  const double d = fk.den.eval(tc);
  return Eigen::Vector3d(fk.num[0].eval(tc), fk.num[1].eval(tc),
                         fk.num[2].eval(tc)) /
         d;
}

template <class S>
struct ComposedPoint {
  std::array<Polynomial<S>, 3> num;
  Polynomial<S> den = Polynomial<S>::constant(S(1));
  int degree_bound = 0;  // declared bound on deg_t; actual degrees are <= this

  RationalFunction<S> component(int i) const {
    return RationalFunction<S>(num.at(i), den, true);
  }
};

// Substitute a plan segment's per-variable polynomials in t into the FK.
template <class S, class SegS = double>
ComposedPoint<S> compose_with_plan(const KinematicChain& chain,
                                   const RationalPoint<S>& fk,
                                   const std::map<VarId, Polynomial<SegS>>& seg) {
  std::map<VarId, Polynomial<S>> bind;
  int bound = 0;
  for (VarId v : fk.vars) {
    const auto it = seg.find(v);
    if (it == seg.end())
      throw std::invalid_argument("compose_with_plan: unbound TC variable");
    Polynomial<S> conv;
    for (const auto& [mono, c] : it->second.terms())
      conv += Polynomial<S>::term(mono, scalar_from_double<S>(
                                            static_cast<double>(c)));
    bind.emplace(v, std::move(conv));
    const int dr = std::max(it->second.degree(), 0);
    bound += (chain.var_kind(v) == JointKind::Revolute ? 2 : 1) * dr;
  }
  ComposedPoint<S> out;
  for (int i = 0; i < 3; ++i) out.num[i] = fk.num[i].substitute(bind);
  out.den = fk.den.substitute(bind);
  out.degree_bound = bound;
  return out;
}

inline Eigen::Vector3d eval_point(const ComposedPoint<double>& c, double t) {
  const std::map<VarId, double> at{{kTimeVar, t}};
  const double d = c.den.eval(at);
  return Eigen::Vector3d(c.num[0].eval(at), c.num[1].eval(at),
                         c.num[2].eval(at)) /
         d;
}

}  // namespace pathcert

