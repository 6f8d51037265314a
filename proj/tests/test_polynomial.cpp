#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pathcert/polynomial.hpp"
#include "pathcert/scalars.hpp"

using namespace pathcert;

namespace {

using Poly = Polynomial<double>;
using Rf = RationalFunction<double>;

Poly t_var() { return Poly::variable(kTimeVar); }

// Small random polynomial generator for property tests.
Poly random_poly(std::mt19937& rng, const std::vector<VarId>& vars, int max_deg) {
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_int_distribution<int> deg(0, max_deg);
  Poly p;
  const auto basis = monomial_basis(vars, deg(rng));
  std::uniform_int_distribution<int> pick(0, 1);
  for (const auto& m : basis)
    if (pick(rng)) p += Poly::term(m, coeff(rng));
  return p;
}

}  // namespace

TEST_CASE("monomial basics") {
  const Monomial m({{2, 3}, {1, 1}});
  CHECK(m.total_degree() == 4);
  CHECK(m.degree_in(2) == 3);
  CHECK(m.degree_in(7) == 0);
  CHECK((Monomial::var(1) * Monomial::var(2)) == Monomial({{1, 1}, {2, 1}}));
  CHECK(Monomial::one().is_one());
  CHECK_THROWS_AS(Monomial({{1, -1}}), std::invalid_argument);
}

TEST_CASE("monomial basis counts and order") {
  SUBCASE("one variable, degree 3") {
    const auto b = monomial_basis({1}, 3);
    REQUIRE(b.size() == 4);
    CHECK(b[0] == Monomial::one());
    CHECK(b[1] == Monomial::var(1));
    CHECK(b[2] == Monomial::var(1, 2));
    CHECK(b[3] == Monomial::var(1, 3));
  }
  SUBCASE("two variables, degree 2 has C(4,2)=6 entries") {
    const auto b = monomial_basis({1, 2}, 2);
    REQUIRE(b.size() == 6);
    // 1, x, y, x^2, xy, y^2 with x = var 1, y = var 2
    CHECK(b[1] == Monomial::var(1));
    CHECK(b[2] == Monomial::var(2));
    CHECK(b[3] == Monomial::var(1, 2));
    CHECK(b[4] == (Monomial::var(1) * Monomial::var(2)));
    CHECK(b[5] == Monomial::var(2, 2));
  }
  SUBCASE("three variables, degree 0") {
    const auto b = monomial_basis({1, 2, 3}, 0);
    REQUIRE(b.size() == 1);
    CHECK(b[0].is_one());
  }
  SUBCASE("graded-lex comparator agrees with basis order") {
    const auto b = monomial_basis({1, 2, 3}, 3);
    GradedLexLess less;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      CHECK(less(b[i], b[i + 1]));
      CHECK(!less(b[i + 1], b[i]));
    }
  }
}

TEST_CASE("polynomial arithmetic examples") {
  const Poly x = Poly::variable(1);
  const Poly one = Poly::constant(1.0);

  SUBCASE("(x+1)(x-1) = x^2 - 1") {
    const Poly p = (x + one) * (x - one);
    CHECK(p == pow(x, 2) - one);
    CHECK(p.degree() == 2);
  }
  SUBCASE("p * 0 = 0") {
    const Poly p = (x + one) * Poly();
    CHECK(p.is_zero());
    CHECK(p.degree() == -1);
  }
  SUBCASE("tan-half-angle Pythagorean identity (1-u^2)^2 + (2u)^2 = (1+u^2)^2") {
    const Poly u = Poly::variable(3);
    const Poly lhs = pow(one - u * u, 2) + pow(2.0 * u, 2);
    CHECK(lhs == pow(one + u * u, 2));
  }
  SUBCASE("degree is additive for nonzero factors") {
    const Poly p = x * x + 2.0 * x;
    const Poly q = x - one;
    CHECK((p * q).degree() == p.degree() + q.degree());
  }
}

TEST_CASE("univariate coefficient vectors") {
  const Poly x = Poly::variable(1);
  SUBCASE("x^2 - 1 -> [-1, 0, 1]") {
    const auto c = univariate_coeff_vector(x * x - Poly::constant(1.0), 1);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == -1.0);
    CHECK(c[1] == 0.0);
    CHECK(c[2] == 1.0);
  }
  SUBCASE("zero -> [0]") {
    const auto c = univariate_coeff_vector(Poly(), 1);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == 0.0);
  }
  SUBCASE("(1+t^2)^2 -> [1,0,2,0,1]") {
    const Poly t = t_var();
    const auto c = univariate_coeff_vector(pow(Poly::constant(1.0) + t * t, 2),
                                           kTimeVar);
    REQUIRE(c.size() == 5);
    CHECK(c[0] == 1.0);
    CHECK(c[2] == 2.0);
    CHECK(c[4] == 1.0);
  }
  SUBCASE("foreign variable is an error") {
    CHECK_THROWS_AS(univariate_coeff_vector(x * t_var(), 1), std::invalid_argument);
  }
}

TEST_CASE("evaluation") {
  const Poly x = Poly::variable(1);
  CHECK((x * x - Poly::constant(1.0)).eval({{1, 3.0}}) == doctest::Approx(8.0));
  CHECK_THROWS_AS((x * x).eval({}), std::invalid_argument);

  const Poly u = Poly::variable(2);
  const Rf cos_sub(Poly::constant(1.0) - u * u, Poly::constant(1.0) + u * u, true);
  const Rf sin_sub(2.0 * u, Poly::constant(1.0) + u * u, true);
  CHECK(cos_sub.eval({{2, 0.0}}) == doctest::Approx(1.0));
  CHECK(sin_sub.eval({{2, 1.0}}) == doctest::Approx(1.0));

  const Rf pole(Poly::constant(1.0), Poly::variable(2), false);
  CHECK_THROWS_AS(pole.eval({{2, 0.0}}), std::domain_error);
}

TEST_CASE("substitution") {
  const Poly u = Poly::variable(2);
  const Rf sin_sub(2.0 * u, Poly::constant(1.0) + u * u, true);

  SUBCASE("identity binding keeps the function") {
    const Rf out = sin_sub.substitute({{2, t_var()}});
    CHECK(out.num() == 2.0 * t_var());
    CHECK(out.den() == Poly::constant(1.0) + t_var() * t_var());
    CHECK(out.denominator_positive());
  }
  SUBCASE("constant binding to zero") {
    const Rf out = sin_sub.substitute({{2, Poly()}});
    CHECK(out.num().is_zero());
    CHECK(out.den() == Poly::constant(1.0));
  }
  SUBCASE("unbound variables remain free") {
    const Poly p = u * Poly::variable(3);
    const Poly out = p.substitute({{2, t_var()}});
    CHECK(out.degree_in(3) == 1);
    CHECK(out.degree_in(kTimeVar) == 1);
  }
}

TEST_CASE("ring axioms on random polynomials") {
  // Integer coefficients keep every product/sum exact in double, so the
  // coefficient-wise operator== is the right check here.
  std::mt19937 rng(20240811);
  std::uniform_int_distribution<int> coeff(-3, 3);
  auto random_int_poly = [&](int max_deg) {
    Poly p;
    for (const auto& m : monomial_basis({1, 2}, max_deg))
      p += Poly::term(m, static_cast<double>(coeff(rng)));
    return p;
  };
  for (int trial = 0; trial < 50; ++trial) {
    const Poly p = random_int_poly(3);
    const Poly q = random_int_poly(3);
    const Poly r = random_int_poly(2);
    CHECK((p + q) * r == p * r + q * r);
    CHECK(p * q == q * p);
    CHECK(p + Poly() == p);
  }
}

TEST_CASE("substitute commutes with eval at random points") {
  std::mt19937 rng(77001);
  std::uniform_real_distribution<double> pt(-1.5, 1.5);
  int points_checked = 0;
  while (points_checked < 100) {
    const Poly p = random_poly(rng, {1, 2}, 3);
    std::map<VarId, Poly> bindings = {
        {1, random_poly(rng, {kTimeVar}, 2)},
        {2, random_poly(rng, {kTimeVar}, 2)},
    };
    const Poly composed = p.substitute(bindings);
    for (int k = 0; k < 5; ++k, ++points_checked) {
      const double t = pt(rng);
      const double direct = composed.eval({{kTimeVar, t}});
      const double via = p.eval({{1, bindings.at(1).eval({{kTimeVar, t}})},
                                 {2, bindings.at(2).eval({{kTimeVar, t}})}});
      const double scale = std::max({1.0, std::abs(direct), std::abs(via)});
      CHECK(std::abs(direct - via) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("trig substitution identity c^2 + s^2 == 1 exactly") {
  const Poly u = Poly::variable(5);
  const Rf c(Poly::constant(1.0) - u * u, Poly::constant(1.0) + u * u, true);
  const Rf s(2.0 * u, Poly::constant(1.0) + u * u, true);
  const Rf sum = c * c + s * s;
  // Clearing denominators: num == den exactly, coefficient-wise.
  CHECK(sum.num() == sum.den());
  CHECK(sum.denominator_positive());
}

TEST_CASE("rational function arithmetic keeps unreduced denominators") {
  const Poly u = Poly::variable(1);
  const Rf a(Poly::constant(1.0), Poly::constant(1.0) + u * u, true);
  const Rf b(u, Poly::constant(1.0) + u * u, true);
  const Rf sum = a + b;
  CHECK(sum.den() == pow(Poly::constant(1.0) + u * u, 2));
  CHECK(sum.num() == (Poly::constant(1.0) + u) * (Poly::constant(1.0) + u * u));
  CHECK_THROWS_AS(Rf(u, Poly(), false), std::invalid_argument);
}

TEST_CASE("exact rational scalar mode") {
  using RPoly = Polynomial<Rational>;
  const RPoly u = RPoly::variable(1);
  const RPoly one = RPoly::constant(Rational(1));
  CHECK(pow(one - u * u, 2) + pow(Rational(2) * u, 2) == pow(one + u * u, 2));
  // double -> rational conversion is exact for dyadic values
  CHECK(to_rational(0.375) == Rational(3, 8));
  CHECK(to_double(Rational(3, 8)) == 0.375);
}

TEST_CASE("poly matrix") {
  PolyMatrix<double> m(2, 2, true);
  m.set_entry(0, 1, Poly::variable(1));
  CHECK(m.entry(1, 0) == Poly::variable(1));
  const auto id = PolyMatrix<double>::identity(3);
  CHECK(id.entry(0, 0) == Poly::constant(1.0));
  CHECK(id.entry(0, 1).is_zero());
  CHECK(id.degree() == 0);

  PolyMatrix<double> a(2, 2);
  a.set_entry(0, 0, Poly::variable(1));
  a.set_entry(0, 1, Poly::constant(1.0));
  a.set_entry(1, 0, Poly());
  a.set_entry(1, 1, Poly::variable(1));
  const auto sq = a * a;
  CHECK(sq.entry(0, 0) == pow(Poly::variable(1), 2));
  CHECK(sq.entry(0, 1) == 2.0 * Poly::variable(1));
}
