#include "pathcert/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace pathcert {

int KinematicChain::add_link(const std::string& name, int parent,
                             const Joint& joint, VarId tc_var) {
  if (parent < 0 || parent >= size())
    throw std::invalid_argument("add_link: parent out of range");
  links_.push_back(Link{name, parent, true, joint, tc_var});
  return size() - 1;
}

void KinematicChain::validate() const {
  std::set<VarId> seen;
  for (int i = 1; i < size(); ++i) {
    const Link& l = links_[i];
    if (l.parent < 0 || l.parent >= i)
      throw std::invalid_argument("chain: links must be listed parent-first");
    if (!l.has_joint) continue;
    const Joint& j = l.joint;
    if (std::abs(j.axis.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("chain: joint axis of '" + l.name +
                                  "' is not unit length");
    if (j.kind == JointKind::Revolute) {
      constexpr double pi = std::numbers::pi;
      if (!(j.lo > -pi && j.hi < pi && j.lo <= j.hi))
        throw std::invalid_argument(
            "chain: revolute limits of '" + l.name +
            "' must lie strictly inside (-pi, pi)");
    } else if (!(j.lo <= j.hi)) {
      throw std::invalid_argument("chain: bad limits on '" + l.name + "'");
    }
    if (l.tc_var == kTimeVar || l.tc_var < 0)
      throw std::invalid_argument("chain: reserved or negative variable id");
    if (!seen.insert(l.tc_var).second)
      throw std::invalid_argument("chain: duplicate TC variable id");
  }
}

int KinematicChain::find_link(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (links_[i].name == name) return i;
  return -1;
}

std::vector<VarId> KinematicChain::tc_vars() const {
  std::vector<VarId> out;
  for (const Link& l : links_)
    if (l.has_joint) out.push_back(l.tc_var);
  return out;
}

JointKind KinematicChain::var_kind(VarId v) const {
  for (const Link& l : links_)
    if (l.has_joint && l.tc_var == v) return l.joint.kind;
  throw std::invalid_argument("var_kind: unknown TC variable");
}

Eigen::Isometry3d KinematicChain::numeric_link_pose(
    int link, const std::map<VarId, double>& q) const {
  if (link < 0 || link >= size())
    throw std::invalid_argument("numeric_link_pose: invalid link");
  std::vector<int> path;
  for (int u = link; u != -1; u = links_[u].parent) path.push_back(u);
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const Link& l = links_[*it];
    if (*it == 0) continue;
    Eigen::Isometry3d step = Eigen::Isometry3d::Identity();
    step.linear() = l.joint.origin_rot;
    step.translation() = l.joint.origin_xyz;
    if (l.has_joint) {
      const auto qi = q.find(l.tc_var);
      if (qi == q.end())
        throw std::invalid_argument("numeric_link_pose: missing joint value");
      if (l.joint.kind == JointKind::Revolute) {
        step = step * Eigen::AngleAxisd(qi->second, l.joint.axis);
      } else {
        step = step * Eigen::Translation3d(qi->second * l.joint.axis);
      }
    }
    T = T * step;
  }
  return T;
}

std::map<VarId, double> tc_to_cspace(const KinematicChain& chain,
                                     const std::map<VarId, double>& tc) {
  std::map<VarId, double> q;
  for (const auto& [v, x] : tc)
    q[v] = chain.var_kind(v) == JointKind::Revolute ? 2.0 * std::atan(x) : x;
  return q;
}

std::map<VarId, double> cspace_to_tc(const KinematicChain& chain,
                                     const std::map<VarId, double>& q) {
  std::map<VarId, double> tc;
  for (const auto& [v, x] : q)
    tc[v] = chain.var_kind(v) == JointKind::Revolute ? std::tan(x / 2.0) : x;
  return tc;
}

}  // namespace pathcert
