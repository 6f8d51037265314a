#pragma once

// Shared scene builders for the test binaries.

#include <Eigen/Geometry>
#include <random>

#include "pathcert/kinematics.hpp"
#include "pathcert/plan.hpp"

namespace pathcert::fixtures {

inline constexpr VarId kTau = 1;  // pendulum angle (revolute)
inline constexpr VarId kZ = 2;    // rail displacement (prismatic)

// Prismatic rail along world x carrying a pendulum that rotates about -z,
// with the tip at (0, l1, 0) in the pendulum frame.  World-frame tip:
//   p_x = l1 * 2*tau/(1+tau^2) + z,  p_y = l1 * (1-tau^2)/(1+tau^2).
inline KinematicChain pendulum_on_rail() {
  KinematicChain chain;
  Joint rail;
  rail.kind = JointKind::Prismatic;
  rail.axis = Eigen::Vector3d::UnitX();
  rail.lo = -10.0;
  rail.hi = 10.0;
  const int rail_link = chain.add_link("rail", 0, rail, kZ);
  Joint swing;
  swing.kind = JointKind::Revolute;
  swing.axis = -Eigen::Vector3d::UnitZ();
  swing.lo = -3.0;
  swing.hi = 3.0;
  chain.add_link("pendulum", rail_link, swing, kTau);
  chain.validate();
  return chain;
}

// Planar 2R arm in the x-y plane, both joints about -z; link 2 is mounted a
// distance l1 along link 1's +y axis.  Tip at (0, l2, 0) in link 2's frame
// lands at (l1 sin q1 + l2 sin(q1+q2), l1 cos q1 + l2 cos(q1+q2), 0).
inline KinematicChain two_link_arm(double l1) {
  KinematicChain chain;
  Joint j1;
  j1.kind = JointKind::Revolute;
  j1.axis = -Eigen::Vector3d::UnitZ();
  j1.lo = -3.0;
  j1.hi = 3.0;
  const int link1 = chain.add_link("upper", 0, j1, 1);
  Joint j2 = j1;
  j2.origin_xyz = Eigen::Vector3d(0.0, l1, 0.0);
  chain.add_link("lower", link1, j2, 2);
  chain.validate();
  return chain;
}

// Serial chain with 1..4 random joints (kinds, axes, mount transforms).
inline KinematicChain random_chain(std::mt19937& rng, int dof) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  KinematicChain chain;
  int parent = 0;
  for (int i = 0; i < dof; ++i) {
    Joint j;
    j.kind = coin(rng) ? JointKind::Revolute : JointKind::Prismatic;
    Eigen::Vector3d ax;
    do {
      ax = Eigen::Vector3d(unit(rng), unit(rng), unit(rng));
    } while (ax.norm() < 0.1);
    j.axis = ax.normalized();
    j.origin_rot =
        Eigen::AngleAxisd(1.5 * unit(rng), Eigen::Vector3d::UnitZ())
            .toRotationMatrix() *
        Eigen::AngleAxisd(1.5 * unit(rng), Eigen::Vector3d::UnitX())
            .toRotationMatrix();
    j.origin_xyz = Eigen::Vector3d(unit(rng), unit(rng), unit(rng));
    j.lo = j.kind == JointKind::Revolute ? -3.0 : -2.0;
    j.hi = -j.lo;
    parent = chain.add_link("link" + std::to_string(i + 1), parent, j, i + 1);
  }
  chain.validate();
  return chain;
}

// Straight-line pendulum-on-rail motion from (tau0, z0) to (tau1, z1).
inline PlanSegment linear_tau_z(double tau0, double tau1, double z0,
                                double z1) {
  return linear_segment({{kTau, tau0}, {kZ, z0}}, {{kTau, tau1}, {kZ, z1}});
}

// Random TC-space configuration for every joint of `chain`.
inline std::map<VarId, double> random_tc_config(const KinematicChain& chain,
                                                std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(-1.5, 1.5);
  std::map<VarId, double> tc;
  for (VarId v : chain.tc_vars()) tc[v] = unit(rng);
  return tc;
}

}  // namespace pathcert::fixtures
