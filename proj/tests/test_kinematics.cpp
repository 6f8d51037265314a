#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "pathcert/kinematics.hpp"
#include "pathcert/scalars.hpp"

using namespace pathcert;
using fixtures::kTau;
using fixtures::kZ;

namespace {
using P = Polynomial<double>;
const P tau = P::variable(kTau);
const P zv = P::variable(kZ);
}  // namespace

TEST_CASE("chain validation") {
  SUBCASE("world-only chain is valid") {
    KinematicChain chain;
    chain.validate();
    CHECK(chain.size() == 1);
    CHECK(chain.tc_vars().empty());
  }
  SUBCASE("non-unit axis rejected") {
    KinematicChain chain;
    Joint j;
    j.axis = Eigen::Vector3d(1.0, 1.0, 0.0);
    j.lo = -1;
    j.hi = 1;
    chain.add_link("a", 0, j, 1);
    CHECK_THROWS_AS(chain.validate(), std::invalid_argument);
  }
  SUBCASE("revolute limit at pi rejected (open interval)") {
    KinematicChain chain;
    Joint j;
    j.lo = -1.0;
    j.hi = std::numbers::pi;
    chain.add_link("a", 0, j, 1);
    CHECK_THROWS_AS(chain.validate(), std::invalid_argument);
  }
  SUBCASE("duplicate variable ids rejected") {
    KinematicChain chain;
    Joint j;
    j.lo = -1;
    j.hi = 1;
    chain.add_link("a", 0, j, 1);
    chain.add_link("b", 1, j, 1);
    CHECK_THROWS_AS(chain.validate(), std::invalid_argument);
  }
  SUBCASE("time variable id reserved") {
    KinematicChain chain;
    Joint j;
    j.lo = -1;
    j.hi = 1;
    chain.add_link("a", 0, j, kTimeVar);
    CHECK_THROWS_AS(chain.validate(), std::invalid_argument);
  }
}

TEST_CASE("pendulum on rail golden coefficients") {
  const double l1 = 0.75;
  const auto chain = fixtures::pendulum_on_rail();
  const int tip_link = chain.find_link("pendulum");
  REQUIRE(tip_link > 0);
  const auto fk = fk_point<double>(chain, 0, tip_link, {0.0, l1, 0.0});

  const P one = P::constant(1.0);
  // p_x = l1*2*tau/(1+tau^2) + z, p_y = l1*(1-tau^2)/(1+tau^2) over a shared
  // denominator 1+tau^2 -- exact coefficient-level match.
  CHECK(fk.den == one + tau * tau);
  CHECK(fk.num[0] == (2.0 * l1) * tau + zv * (one + tau * tau));
  CHECK(fk.num[1] == l1 * (one - tau * tau));
  CHECK(fk.num[2].is_zero());
  REQUIRE(fk.vars.size() == 2);
}

TEST_CASE("pendulum symbolic vs numeric over 100-point grid") {
  const double l1 = 0.75;
  const auto chain = fixtures::pendulum_on_rail();
  const int tip_link = chain.find_link("pendulum");
  const auto fk = fk_point<double>(chain, 0, tip_link, {0.0, l1, 0.0});
  const Eigen::Vector3d local(0.0, l1, 0.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double tv = -2.0 + 4.0 * i / 9.0;
      const double zval = -1.0 + 2.0 * j / 9.0;
      const std::map<VarId, double> tc{{kTau, tv}, {kZ, zval}};
      const Eigen::Vector3d sym = eval_point(fk, tc);
      const Eigen::Vector3d num =
          chain.numeric_link_pose(tip_link, tc_to_cspace(chain, tc)) * local;
      worst = std::max(worst, (sym - num).norm());
    }
  CHECK(worst <= 1e-9);
}

TEST_CASE("point on the frame itself is a constant rational") {
  const auto chain = fixtures::pendulum_on_rail();
  const int tip_link = chain.find_link("pendulum");
  const auto fk = fk_point<double>(chain, tip_link, tip_link, {0.25, -1.0, 2.0});
  CHECK(fk.vars.empty());
  CHECK(fk.den == P::constant(1.0));
  CHECK(fk.num[0] == P::constant(0.25));
  CHECK(fk.num[1] == P::constant(-1.0));
  CHECK(fk.num[2] == P::constant(2.0));
}

TEST_CASE("two-link arm straight-up pose and numeric oracle") {
  const double l1 = 0.5, l2 = 0.25;
  const auto chain = fixtures::two_link_arm(l1);
  const int tip_link = chain.find_link("lower");
  const auto fk = fk_point<double>(chain, 0, tip_link, {0.0, l2, 0.0});

  const Eigen::Vector3d at_zero = eval_point(fk, {{1, 0.0}, {2, 0.0}});
  CHECK(at_zero.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(at_zero.y() == doctest::Approx(l1 + l2).epsilon(1e-12));

  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double q1 = 1.4 * d(rng), q2 = 1.4 * d(rng);
    const Eigen::Vector3d expect(l1 * std::sin(q1) + l2 * std::sin(q1 + q2),
                                 l1 * std::cos(q1) + l2 * std::cos(q1 + q2),
                                 0.0);
    const std::map<VarId, double> tc{{1, std::tan(q1 / 2)},
                                     {2, std::tan(q2 / 2)}};
    CHECK((eval_point(fk, tc) - expect).norm() <= 1e-9);
  }
}

TEST_CASE("FK consistency across random chains") {
  std::mt19937 rng(20260823);
  std::uniform_int_distribution<int> dof(1, 4);
  int draws = 0;
  while (draws < 1000) {
    const auto chain = fixtures::random_chain(rng, dof(rng));
    const int tip = chain.size() - 1;
    std::uniform_real_distribution<double> pt(-1.0, 1.0);
    const Eigen::Vector3d local(pt(rng), pt(rng), pt(rng));
    const auto fk = fk_point<double>(chain, 0, tip, local);

    // degree bounds per variable, exactly as the rational construction implies
    for (VarId v : fk.vars) {
      const int cap = chain.var_kind(v) == JointKind::Revolute ? 2 : 1;
      for (int i = 0; i < 3; ++i) CHECK(fk.num[i].degree_in(v) <= cap);
      CHECK(fk.den.degree_in(v) <=
            (chain.var_kind(v) == JointKind::Revolute ? 2 : 0));
    }

    for (int rep = 0; rep < 5 && draws < 1000; ++rep, ++draws) {
      const auto tc = fixtures::random_tc_config(chain, rng);
      const Eigen::Vector3d sym = eval_point(fk, tc);
      const Eigen::Vector3d num =
          chain.numeric_link_pose(tip, tc_to_cspace(chain, tc)) * local;
      CHECK((sym - num).norm() <= 1e-9);
      CHECK(fk.den.eval(tc) >= 1.0 - 1e-12);  // product of (1 + tau^2) factors
    }
  }
}

TEST_CASE("relative FK between two branches keeps degrees tight") {
  // Y-shaped tree: two pendulums on one rail; express arm B's tip in arm A's
  // frame.  The common rail joint cancels and must not appear.
  KinematicChain chain;
  Joint rail;
  rail.kind = JointKind::Prismatic;
  rail.axis = Eigen::Vector3d::UnitX();
  rail.lo = -5;
  rail.hi = 5;
  const int base = chain.add_link("base", 0, rail, 3);
  Joint swing;
  swing.axis = -Eigen::Vector3d::UnitZ();
  swing.lo = -3;
  swing.hi = 3;
  const int arm_a = chain.add_link("armA", base, swing, 1);
  Joint swing_b = swing;
  swing_b.origin_xyz = Eigen::Vector3d(0.4, 0.0, 0.0);
  const int arm_b = chain.add_link("armB", base, swing_b, 2);
  chain.validate();

  const Eigen::Vector3d local(0.0, 0.5, 0.0);
  const auto fk = fk_point<double>(chain, arm_a, arm_b, local);
  CHECK(fk.vars.size() == 2);  // rail variable cancelled
  CHECK(fk.den.degree_in(3) == 0);
  CHECK(fk.den.degree_in(1) <= 2);
  CHECK(fk.den.degree_in(2) <= 2);

  std::mt19937 rng(7);
  for (int k = 0; k < 25; ++k) {
    const auto tc = fixtures::random_tc_config(chain, rng);
    const auto q = tc_to_cspace(chain, tc);
    const Eigen::Vector3d expect =
        chain.numeric_link_pose(arm_a, q).inverse() *
        (chain.numeric_link_pose(arm_b, q) * local);
    std::map<VarId, double> tc_used = tc;
    tc_used.erase(3);  // symbolic form must not need the cancelled variable
    CHECK((eval_point(fk, tc_used) - expect).norm() <= 1e-9);
  }
}

TEST_CASE("rational transform inverse") {
  Joint j;
  j.axis = Eigen::Vector3d(1.0, 2.0, 2.0).normalized();
  j.origin_xyz = Eigen::Vector3d(0.3, -0.2, 0.1);
  j.origin_rot =
      Eigen::AngleAxisd(0.8, Eigen::Vector3d::UnitY()).toRotationMatrix();
  Link link{"l", 0, true, j, 1};
  const auto T = joint_step<double>(link);
  const auto Tinv = rt_inverse(T);
  const auto I = compose(T, Tinv);
  const std::map<VarId, double> at{{1, 0.6}};
  const double d = I.den.eval(at);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(I.trans[i].eval(at) / d) <= 1e-12);
    for (int jj = 0; jj < 3; ++jj)
      CHECK(std::abs(I.rot.entry(i, jj).eval(at) / d - (i == jj ? 1 : 0)) <=
            1e-12);
  }
  // structural inverse leaves the denominator degree at 2
  const auto Sinv = joint_step_inverse<double>(link);
  CHECK(Sinv.den.degree_in(1) == 2);
  CHECK(Tinv.den.degree_in(1) == 4);
}

TEST_CASE("compose with plan") {
  const double l1 = 0.75;
  const auto chain = fixtures::pendulum_on_rail();
  const int tip_link = chain.find_link("pendulum");
  const auto fk = fk_point<double>(chain, 0, tip_link, {0.0, l1, 0.0});
  const P t = P::variable(kTimeVar);
  const P one = P::constant(1.0);

  SUBCASE("identity plan tau(t)=t reproduces the known p_y") {
    const std::map<VarId, P> seg{{kTau, t}, {kZ, P()}};
    const auto c = compose_with_plan(chain, fk, seg);
    CHECK(c.num[1] == l1 * (one - t * t));
    CHECK(c.den == one + t * t);
    CHECK(c.degree_bound == 2);  // z is constant: only the revolute var counts
  }
  SUBCASE("constant segment evaluates to the fixed configuration") {
    const std::map<VarId, P> seg{{kTau, P::constant(0.5)},
                                 {kZ, P::constant(-0.25)}};
    const auto c = compose_with_plan(chain, fk, seg);
    CHECK(c.num[0].degree() == 0);
    const Eigen::Vector3d direct = eval_point(fk, {{kTau, 0.5}, {kZ, -0.25}});
    CHECK((eval_point(c, 0.3) - direct).norm() <= 1e-12);
  }
  SUBCASE("tau(t)=t, z(t)=1-t matches numeric FK along the plan") {
    const std::map<VarId, P> seg{{kTau, t}, {kZ, one - t}};
    const auto c = compose_with_plan(chain, fk, seg);
    CHECK(c.degree_bound == 3);
    for (int i = 0; i < 3; ++i) CHECK(c.num[i].degree() <= c.degree_bound);
    const Eigen::Vector3d local(0.0, l1, 0.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double tv = i / 19.0;
      const std::map<VarId, double> tc{{kTau, tv}, {kZ, 1.0 - tv}};
      const Eigen::Vector3d num =
          chain.numeric_link_pose(tip_link, tc_to_cspace(chain, tc)) * local;
      worst = std::max(worst, (eval_point(c, tv) - num).norm());
    }
    CHECK(worst <= 1e-9);
  }
  SUBCASE("unbound variable is an error") {
    const std::map<VarId, P> seg{{kTau, t}};
    CHECK_THROWS_AS(compose_with_plan(chain, fk, seg), std::invalid_argument);
  }
}

TEST_CASE("exact-scalar FK instantiation") {
  // The checker rebuilds constraints over exact rationals; make sure the
  // symbolic path works there and matches the double path coefficient-wise
  // for binary-exact model data.
  const auto chain = fixtures::pendulum_on_rail();
  const int tip_link = chain.find_link("pendulum");
  const auto fkd = fk_point<double>(chain, 0, tip_link, {0.0, 0.75, 0.0});
  const auto fkr = fk_point<Rational>(chain, 0, tip_link, {0.0, 0.75, 0.0});
  CHECK(fkr.den == Polynomial<Rational>::constant(Rational(1)) +
                       pow(Polynomial<Rational>::variable(kTau), 2));
  for (int i = 0; i < 3; ++i) {
    for (const auto& [m, coeff] : fkd.num[i].terms())
      CHECK(fkr.num[i].coeff(m) == to_rational(coeff));
  }
}
