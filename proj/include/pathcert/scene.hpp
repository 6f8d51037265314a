#pragma once

#include <string>
#include <vector>

#include "pathcert/geometry.hpp"
#include "pathcert/kinematics.hpp"

namespace pathcert {

// A kinematic chain with attached collision geometry and the list of body
// pairs that must stay separated.
struct Scene {
  KinematicChain chain;
  std::vector<ConvexBody> bodies;
  std::vector<CollisionPair> pairs;

  const ConvexBody& body(int i) const { return bodies.at(i); }
  int find_body(const std::string& name) const;  // -1 when absent
  void validate() const;  // throws std::invalid_argument
};

}  // namespace pathcert
