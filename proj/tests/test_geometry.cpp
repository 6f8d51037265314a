#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <random>

#include "pathcert/geometry.hpp"

using namespace pathcert;

namespace {

const Eigen::Isometry3d kId = Eigen::Isometry3d::Identity();

ConvexBody unit_square(const std::string& name, double cx, double cy) {
  return ConvexBody::polytope(name, 0,
                              {{cx - 0.5, cy - 0.5, 0.0},
                               {cx + 0.5, cy - 0.5, 0.0},
                               {cx + 0.5, cy + 0.5, 0.0},
                               {cx - 0.5, cy + 0.5, 0.0}});
}

Eigen::Isometry3d translate(const Eigen::Vector3d& d) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translation() = d;
  return t;
}

std::mt19937 rng(123);

ConvexBody random_body(const std::string& name) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> kind(0, 1);
  if (kind(rng)) {
    return ConvexBody::sphere(name, 0, {u(rng), u(rng), u(rng)},
                              0.1 + 0.4 * std::abs(u(rng)));
  }
  std::uniform_int_distribution<int> nv(1, 6);
  std::vector<Eigen::Vector3d> verts;
  const Eigen::Vector3d base(u(rng), u(rng), u(rng));
  const int n = nv(rng);
  for (int i = 0; i < n; ++i)
    verts.push_back(base + 0.5 * Eigen::Vector3d(u(rng), u(rng), u(rng)));
  return ConvexBody::polytope(name, 0, std::move(verts));
}

}  // namespace

TEST_CASE("body validation") {
  CHECK_THROWS_AS(ConvexBody::sphere("s", 0, {0, 0, 0}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ConvexBody::sphere("s", 0, {0, 0, 0}, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ConvexBody::polytope("p", 0, {}), std::invalid_argument);
  CHECK_NOTHROW(ConvexBody::polytope("p", 0, {{0, 0, 0}}));
}

TEST_CASE("hand distances") {
  SUBCASE("two unit spheres, centers 3 apart") {
    const auto a = ConvexBody::sphere("a", 0, {0, 0, 0}, 1.0);
    const auto b = ConvexBody::sphere("b", 0, {3, 0, 0}, 1.0);
    CHECK(min_distance(a, kId, b, kId) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("sphere center inside polytope reports intersection") {
    const auto s = ConvexBody::sphere("s", 0, {0, 0, 0}, 0.25);
    const auto box = ConvexBody::polytope("box", 0,
                                          {{-1, -1, -1},
                                           {1, -1, -1},
                                           {-1, 1, -1},
                                           {1, 1, -1},
                                           {-1, -1, 1},
                                           {1, -1, 1},
                                           {-1, 1, 1},
                                           {1, 1, 1}});
    CHECK(min_distance(s, kId, box, kId) <= 0.0);
  }
  SUBCASE("unit square vs point at (2,0): distance 1.5") {
    // square spans x in [-0.5, 0.5]; nearest face at x=0.5
    const auto sq = unit_square("sq", 0.0, 0.0);
    const auto pt = ConvexBody::polytope("pt", 0, {{2.0, 0.0, 0.0}});
    CHECK(min_distance(sq, kId, pt, kId) == doctest::Approx(1.5).epsilon(1e-9));
  }
  SUBCASE("unit squares two apart edge-to-edge") {
    const auto a = unit_square("a", 0.0, 0.0);
    const auto b = unit_square("b", 2.0, 0.0);
    CHECK(min_distance(a, kId, b, kId) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("corner-to-corner diagonal distance") {
    const auto a = unit_square("a", 0.0, 0.0);
    const auto b = unit_square("b", 2.0, 2.0);
    CHECK(min_distance(a, kId, b, kId) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  }
  SUBCASE("sphere vs box face") {
    const auto s = ConvexBody::sphere("s", 0, {3.0, 0.0, 0.0}, 0.5);
    const auto sq = unit_square("sq", 0.0, 0.0);
    CHECK(min_distance(s, kId, sq, kId) == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("overlapping squares report non-positive") {
    const auto a = unit_square("a", 0.0, 0.0);
    const auto b = unit_square("b", 0.25, 0.0);
    CHECK(min_distance(a, kId, b, kId) <= 0.0);
  }
}

TEST_CASE("min-norm point basics") {
  CHECK(min_norm_point({{3, 4, 0}}) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(min_norm_point({{1, 0, 0}, {-1, 0, 0}}) <= 1e-10);
  CHECK(min_norm_point({{1, 1, 0}, {1, -1, 0}}) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("symmetry of min_distance") {
  for (int k = 0; k < 200; ++k) {
    const auto a = random_body("a");
    const auto b = random_body("b");
    const double ab = min_distance(a, kId, b, kId);
    const double ba = min_distance(b, kId, a, kId);
    CHECK(std::abs(ab - ba) <= 1e-12);
  }
}

TEST_CASE("translation invariance") {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const auto a = random_body("a");
    const auto b = random_body("b");
    const Eigen::Vector3d shift(u(rng), u(rng), u(rng));
    const double before = min_distance(a, kId, b, kId);
    const double after =
        min_distance(a, translate(shift), b, translate(shift));
    CHECK(std::abs(before - after) <= 1e-9);
  }
}

TEST_CASE("distance oracle agrees with dense sphere sampling") {
  // Cross-check polytope-polytope FW answers against brute-force sampling of
  // convex combinations, which can only over-estimate the distance.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const auto a = random_body("a");
    const auto b = random_body("b");
    const double d = min_distance(a, kId, b, kId);
    if (a.kind != ConvexBody::Kind::Polytope ||
        b.kind != ConvexBody::Kind::Polytope)
      continue;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 2000; ++s) {
      // random convex combinations on both hulls
      Eigen::Vector3d pa = Eigen::Vector3d::Zero(),
                      pb = Eigen::Vector3d::Zero();
      double wa = 0, wb = 0;
      for (const auto& v : a.vertices) {
        const double w = u(rng);
        pa += w * v;
        wa += w;
      }
      for (const auto& v : b.vertices) {
        const double w = u(rng);
        pb += w * v;
        wb += w;
      }
      best = std::min(best, (pa / wa - pb / wb).norm());
    }
    // FW reports the exact hull distance, so sampling can never beat it by
    // more than numerical slack.
    CHECK(d <= best + 1e-9);
  }
}
