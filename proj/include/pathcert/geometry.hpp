#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <string>
#include <vector>

namespace pathcert {

// Convex collision geometry rigidly attached to a chain link.  Coordinates
// are in the owning link's frame.
struct ConvexBody {
  enum class Kind { Sphere, Polytope };

  Kind kind = Kind::Sphere;
  std::string name;
  int link = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // sphere only
  double radius = 0.0;                               // sphere only
  std::vector<Eigen::Vector3d> vertices;             // polytope only

  static ConvexBody sphere(std::string name, int link,
                           const Eigen::Vector3d& center, double radius);
  static ConvexBody polytope(std::string name, int link,
                             std::vector<Eigen::Vector3d> vertices);
  void validate() const;  // throws std::invalid_argument
};

// Unordered pair of body indices into a scene's body list.
struct CollisionPair {
  int a = 0;
  int b = 0;
  friend bool operator==(const CollisionPair&, const CollisionPair&) = default;
};

// Euclidean separation distance between two placed bodies; <= 0 indicates
// intersection (magnitude of negative values is not meaningful).
double min_distance(const ConvexBody& body_a, const Eigen::Isometry3d& pose_a,
                    const ConvexBody& body_b, const Eigen::Isometry3d& pose_b);

// Distance from the origin to the convex hull of `points`.  The returned
// value never under-reports: it is the norm of a feasible hull point, hence
// an upper bound on the true distance; the iteration stops once the certified
// gap against the support lower bound is below `tol`.
double min_norm_point(const std::vector<Eigen::Vector3d>& points,
                      double tol = 1e-10, int max_iter = 100000);

}  // namespace pathcert
