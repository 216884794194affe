#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <vector>

#include "memint/polynomial.hpp"
#include "memint/rational.hpp"

using namespace memint;

TEST_CASE("rational parsing accepts p and p/q and rejects junk") {
  CHECK(parse_rational("2/3", "x") == Rational(2, 3));
  CHECK(parse_rational("-7", "x") == Rational(-7));
  CHECK(parse_rational("-3/4", "x") == Rational(-3, 4));
  CHECK(parse_rational("+5/10", "x") == Rational(1, 2));
  CHECK_THROWS_AS(parse_rational("", "x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0", "x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1.5", "x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("2/", "x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("a/b", "x"), std::invalid_argument);
  // Error message names the offending field.
  try {
    parse_rational("oops", "forms[0].coef");
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("forms[0].coef") != std::string::npos);
  }
}

TEST_CASE("rational formatting") {
  CHECK(rational_to_string(Rational(2, 3)) == "2/3");
  CHECK(rational_to_string(Rational(-4, 2)) == "-2");
  CHECK(rational_to_string(Rational(0)) == "0");
}

TEST_CASE("exact scalar arithmetic with real fast path and complex products") {
  ExactScalar a(Rational(1, 2));
  ExactScalar b(Rational(1, 3));
  CHECK((a + b) == ExactScalar(Rational(5, 6)));
  CHECK((a * b) == ExactScalar(Rational(1, 6)));
  CHECK((a - b) == ExactScalar(Rational(1, 6)));
  CHECK(a.is_real());

  ExactScalar i = ExactScalar::i();
  CHECK((i * i) == ExactScalar(-1));
  ExactScalar z(Rational(1), Rational(2));   // 1 + 2i
  ExactScalar w(Rational(3), Rational(-1));  // 3 - i
  // (1+2i)(3-i) = 5 + 5i
  CHECK((z * w) == ExactScalar(Rational(5), Rational(5)));
  CHECK(z.divided_by(Int(2)) == ExactScalar(Rational(1, 2), Rational(1)));
  CHECK(z.str() == "1 + 2 i");
  CHECK((z - z).is_zero());
  CHECK(ExactScalar(Rational(0), Rational(-1)).str() == "-i");
}

TEST_CASE("polynomial construction and arithmetic") {
  // p = x0^2 + 2 x1, q = x0 - x1
  Poly x0 = Poly::variable(2, 0), x1 = Poly::variable(2, 1);
  Poly p = x0 * x0 + x1.scaled(ExactScalar(2));
  Poly q = x0 - x1;
  Poly prod = p * q;
  // (x0^2 + 2 x1)(x0 - x1) = x0^3 - x0^2 x1 + 2 x0 x1 - 2 x1^2
  Poly expect(2);
  expect.add_term({3, 0}, ExactScalar(1));
  expect.add_term({2, 1}, ExactScalar(-1));
  expect.add_term({1, 1}, ExactScalar(2));
  expect.add_term({0, 2}, ExactScalar(-2));
  CHECK(prod == expect);
  CHECK((p - p).is_zero());
  CHECK(p.degree(0) == 2);
  CHECK(p.degree(1) == 1);
  CHECK(prod.total_degree() == 3);
}

TEST_CASE("derivative and antiderivative are mutually inverse on monomials") {
  Poly p = Poly::monomial(2, {3, 2}, ExactScalar(Rational(5, 7)));
  CHECK(p.antiderivative(0).derivative(0) == p);
  CHECK(p.derivative(1).antiderivative(1) == p);
  // antiderivative of x^a has coefficient 1/(a+1)
  Poly x = Poly::variable(1, 0);
  Poly x4 = x * x * x * x;
  Poly ad = x4.antiderivative(0);
  Poly expect = Poly::monomial(1, {5}, ExactScalar(Rational(1, 5)));
  CHECK(ad == expect);
}

TEST_CASE("substitution of constants, variables, and polynomials") {
  // p = x0^2 x1 + x1
  Poly p(2);
  p.add_term({2, 1}, ExactScalar(1));
  p.add_term({0, 1}, ExactScalar(1));
  // x0 := 1/2  ->  (1/4) x1 + x1 = (5/4) x1
  Poly at_half = p.substitute(0, ExactScalar(Rational(1, 2)));
  Poly expect1 = Poly::monomial(2, {0, 1}, ExactScalar(Rational(5, 4)));
  CHECK(at_half == expect1);
  // x0 := x1  ->  x1^3 + x1
  Poly merged = p.substitute(0, Poly::variable(2, 1));
  Poly expect2(2);
  expect2.add_term({0, 3}, ExactScalar(1));
  expect2.add_term({0, 1}, ExactScalar(1));
  CHECK(merged == expect2);
  // x0 := 2 x0 - 1 (affine)
  Poly affine = Poly::variable(2, 0).scaled(ExactScalar(2)) - Poly::constant(2, ExactScalar(1));
  Poly shifted = p.substitute(0, affine);
  // (2x0-1)^2 x1 + x1 = (4x0^2 - 4x0 + 2) x1
  Poly expect3(2);
  expect3.add_term({2, 1}, ExactScalar(4));
  expect3.add_term({1, 1}, ExactScalar(-4));
  expect3.add_term({0, 1}, ExactScalar(2));
  CHECK(shifted == expect3);
}

TEST_CASE("composition and remap") {
  // f(x0, x1) = x0 x1 + x0^2, with x0 := u+v, x1 := u*v (2 new vars)
  Poly f(2);
  f.add_term({1, 1}, ExactScalar(1));
  f.add_term({2, 0}, ExactScalar(1));
  Poly u = Poly::variable(2, 0), v = Poly::variable(2, 1);
  Poly g = f.compose({u + v, u * v});
  // (u+v)uv + (u+v)^2
  Poly expect = (u + v) * u * v + (u + v) * (u + v);
  CHECK(g == expect);

  Poly h = Poly::monomial(2, {2, 1}, ExactScalar(3));
  Poly r = h.remap(4, {3, 1});
  Poly expect_r = Poly::monomial(4, {0, 1, 0, 2}, ExactScalar(3));
  CHECK(r == expect_r);
}

TEST_CASE("exact evaluation agrees with compiled floating evaluation") {
  Poly p(3);
  p.add_term({2, 0, 1}, ExactScalar(Rational(1, 3)));
  p.add_term({0, 1, 0}, ExactScalar(Rational(-2, 5), Rational(1, 7)));
  p.add_term({1, 1, 1}, ExactScalar(4));
  CompiledPoly cp = compile(p);
  const std::vector<ExactScalar> xq = {ExactScalar(Rational(1, 2)), ExactScalar(Rational(2, 3)),
                                       ExactScalar(Rational(-1, 4))};
  const std::vector<double> xd = {0.5, 2.0 / 3.0, -0.25};
  std::complex<double> exact_val = p.eval(std::span<const ExactScalar>(xq)).to_complex();
  std::complex<double> comp_val = cp.eval(std::span<const double>(xd));
  CHECK(std::abs(exact_val - comp_val) < 1e-14);

  // Complex points too.
  const std::vector<std::complex<double>> xc = {{0.5, 0.1}, {0.2, -0.3}, {1.0, 0.0}};
  std::complex<double> slow = p.eval(std::span<const std::complex<double>>(xc));
  std::complex<double> fast = cp.eval(std::span<const std::complex<double>>(xc));
  CHECK(std::abs(slow - fast) < 1e-14);
}

TEST_CASE("constant detection and zero polynomial") {
  Poly z(3);
  CHECK(z.is_zero());
  CHECK(z.is_constant());
  CHECK(z.constant_value() == ExactScalar(0));
  Poly c = Poly::constant(3, ExactScalar(Rational(7, 2)));
  CHECK(c.is_constant());
  CHECK(c.constant_value() == ExactScalar(Rational(7, 2)));
  CHECK_FALSE(Poly::variable(3, 1).is_constant());
  // adding opposite terms cancels to zero
  Poly a = Poly::monomial(2, {1, 1}, ExactScalar(2));
  Poly b = Poly::monomial(2, {1, 1}, ExactScalar(-2));
  CHECK((a + b).is_zero());
}
