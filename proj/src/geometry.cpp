#include "pathcert/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pathcert {

ConvexBody ConvexBody::sphere(std::string name, int link,
                              const Eigen::Vector3d& center, double radius) {
  ConvexBody b;
  b.kind = Kind::Sphere;
  b.name = std::move(name);
  b.link = link;
  b.center = center;
  b.radius = radius;
  b.validate();
  return b;
}

ConvexBody ConvexBody::polytope(std::string name, int link,
                                std::vector<Eigen::Vector3d> vertices) {
  ConvexBody b;
  b.kind = Kind::Polytope;
  b.name = std::move(name);
  b.link = link;
  b.vertices = std::move(vertices);
  b.validate();
  return b;
}

void ConvexBody::validate() const {
  if (kind == Kind::Sphere) {
    if (!(radius > 0.0) || !center.allFinite())
      throw std::invalid_argument("sphere '" + name +
                                  "': radius must be positive and center finite");
  } else {
    if (vertices.empty())
      throw std::invalid_argument("polytope '" + name + "': needs >= 1 vertex");
    for (const auto& v : vertices)
      if (!v.allFinite())
        throw std::invalid_argument("polytope '" + name +
                                    "': non-finite vertex");
  }
}

// Min-norm point in a convex hull by pairwise Frank-Wolfe.  Each step moves
// weight from the current away vertex toward the support vertex; the support
// value <x, p_s>/|x| is a valid lower bound on the hull distance, so the gap
// |x| - L certifies the answer.
double min_norm_point(const std::vector<Eigen::Vector3d>& points, double tol,
                      int max_iter) {
  if (points.empty()) throw std::invalid_argument("min_norm_point: empty set");
  const int n = static_cast<int>(points.size());

  int start = 0;
  for (int i = 1; i < n; ++i)
    if (points[i].squaredNorm() < points[start].squaredNorm()) start = i;

  std::vector<double> w(n, 0.0);
  w[start] = 1.0;
  Eigen::Vector3d x = points[start];

  for (int iter = 0; iter < max_iter; ++iter) {
    const double nx = x.norm();
    if (nx <= tol) return 0.0;

    int s = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double v = x.dot(points[i]);
      if (v < best) {
        best = v;
        s = i;
      }
    }
    const double lower = std::max(0.0, best / nx);
    if (nx - lower <= tol) return nx;

    int a = -1;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (w[i] <= 0.0) continue;
      const double v = x.dot(points[i]);
      if (v > worst) {
        worst = v;
        a = i;
      }
    }

    const Eigen::Vector3d d = points[s] - points[a];
    const double dd = d.squaredNorm();
    if (dd <= 0.0) return nx;  // support == away: x is optimal over its face
    double step = -x.dot(d) / dd;
    step = std::min(std::max(step, 0.0), w[a]);
    if (step <= 0.0) return nx;
    w[s] += step;
    w[a] -= step;
    x += step * d;
  }
  return x.norm();  // cap hit; still an upper bound, never optimistic
}

namespace {

std::vector<Eigen::Vector3d> world_vertices(const ConvexBody& b,
                                            const Eigen::Isometry3d& pose) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(b.vertices.size());
  for (const auto& v : b.vertices) out.push_back(pose * v);
  return out;
}

double sphere_sphere(const Eigen::Vector3d& ca, double ra,
                     const Eigen::Vector3d& cb, double rb) {
  return (ca - cb).norm() - ra - rb;
}

double sphere_polytope(const Eigen::Vector3d& c, double r,
                       const std::vector<Eigen::Vector3d>& verts) {
  std::vector<Eigen::Vector3d> diff;
  diff.reserve(verts.size());
  for (const auto& v : verts) diff.push_back(c - v);
  return min_norm_point(diff) - r;
}

double polytope_polytope(const std::vector<Eigen::Vector3d>& va,
                         const std::vector<Eigen::Vector3d>& vb) {
  std::vector<Eigen::Vector3d> diff;
  diff.reserve(va.size() * vb.size());
  for (const auto& a : va)
    for (const auto& b : vb) diff.push_back(a - b);
  return min_norm_point(diff);
}

// Stable operand order: the same computation runs regardless of argument
// order, which makes min_distance(A,B) == min_distance(B,A) bit-for-bit.
bool should_swap(const ConvexBody& a, const Eigen::Isometry3d& pose_a,
                 const ConvexBody& b, const Eigen::Isometry3d& pose_b) {
  if (a.kind != b.kind) return a.kind == ConvexBody::Kind::Polytope;
  if (a.kind == ConvexBody::Kind::Sphere) {
    const Eigen::Vector3d ca = pose_a * a.center, cb = pose_b * b.center;
    for (int i = 0; i < 3; ++i) {
      if (ca(i) < cb(i)) return false;
      if (ca(i) > cb(i)) return true;
    }
    return false;
  }
  if (a.vertices.size() != b.vertices.size())
    return a.vertices.size() > b.vertices.size();
  const auto va = world_vertices(a, pose_a), vb = world_vertices(b, pose_b);
  for (std::size_t k = 0; k < va.size(); ++k)
    for (int i = 0; i < 3; ++i) {
      if (va[k](i) < vb[k](i)) return false;
      if (va[k](i) > vb[k](i)) return true;
    }
  return false;
}

}  // namespace

double min_distance(const ConvexBody& body_a, const Eigen::Isometry3d& pose_a,
                    const ConvexBody& body_b, const Eigen::Isometry3d& pose_b) {
  if (should_swap(body_a, pose_a, body_b, pose_b))
    return min_distance(body_b, pose_b, body_a, pose_a);

  using Kind = ConvexBody::Kind;
  if (body_a.kind == Kind::Sphere && body_b.kind == Kind::Sphere)
    return sphere_sphere(pose_a * body_a.center, body_a.radius,
                         pose_b * body_b.center, body_b.radius);
  if (body_a.kind == Kind::Sphere)
    return sphere_polytope(pose_a * body_a.center, body_a.radius,
                           world_vertices(body_b, pose_b));
  return polytope_polytope(world_vertices(body_a, pose_a),
                           world_vertices(body_b, pose_b));
}

}  // namespace pathcert
