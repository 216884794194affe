#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "memint/integrate.hpp"

using namespace memint;

namespace {

Poly p1(std::initializer_list<std::pair<int, Rational>> terms) {
  Poly p(1);
  for (const auto& [e, c] : terms) p.add_term({e}, ExactScalar(c));
  return p;
}

// omega_k = k x^{k-1} dx on the line; integrates to x^k.
DifferentialForm omega(int k) {
  return monomial_form(1, {1}, Poly::monomial(1, {k - 1}, ExactScalar(k)));
}

ObserverPermutations single(std::vector<int> images) {
  return ObserverPermutations({Permutation(std::move(images))});
}

const Membrane line = identity_membrane(1);

// Planar loops with distinct shapes (components vanish at both endpoints).
Membrane loop_a() {
  return polynomial_path_membrane({p1({{1, 1}, {2, -1}}), p1({{2, 1}, {3, -1}})});
}
Membrane loop_b() {
  return polynomial_path_membrane({p1({{1, 1}, {2, -1}}), p1({{1, 1}, {2, -3}, {3, 2}})});
}

const DifferentialForm area_form = constant_form(2, {1, 2}, ExactScalar(1));

EngineConfig exact_cfg() { return EngineConfig{}; }
EngineConfig quad_cfg(int q = 8) {
  EngineConfig cfg;
  cfg.engine = Engine::Quadrature;
  cfg.quad_order = q;
  return cfg;
}
EngineConfig mc_cfg(std::uint64_t seed, long long samples = 100000) {
  EngineConfig cfg;
  cfg.engine = Engine::MonteCarlo;
  cfg.seed = seed;
  cfg.mc_samples = samples;
  return cfg;
}

}  // namespace

TEST_CASE("engine names parse and print") {
  CHECK(engine_name(Engine::Exact) == "exact");
  CHECK(engine_name(Engine::Quadrature) == "quadrature");
  CHECK(engine_name(Engine::MonteCarlo) == "montecarlo");
  CHECK(parse_engine("quadrature") == Engine::Quadrature);
  CHECK_FALSE(parse_engine("fast").has_value());
}

TEST_CASE("config validation names the offending field") {
  EngineConfig cfg;
  cfg.quad_order = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(), "quad_order: must be >= 1", std::invalid_argument);
  cfg = EngineConfig{};
  cfg.mc_samples = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = EngineConfig{};
  cfg.engine = Engine::MonteCarlo;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // missing seed
  cfg.seed = 7;
  cfg.validate();
}

TEST_CASE("order-simplex integrals of monomials") {
  const ObserverPermutations id2 = ObserverPermutations::identity(1, 2);
  CHECK(exact_engine_integrate(Poly::constant(2, ExactScalar(1)), id2) ==
        ExactScalar(Rational(1, 2)));
  CHECK(exact_engine_integrate(Poly::variable(2, 0), id2) == ExactScalar(Rational(1, 6)));
  // t1^a t2^b integrates to 1/((a+1)(a+b+2)) on 0 < t1 < t2 < 1.
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b) {
      const ExactScalar got =
          exact_engine_integrate(Poly::monomial(2, {a, b}, ExactScalar(1)), id2);
      CHECK(got == ExactScalar(Rational(1, (a + 1) * (a + b + 2))));
    }
  // Relabeled domain 0 < t2 < t1 < 1: t1^2 t2 integrates to 1/(2*5) = 1/10.
  const ExactScalar swapped =
      exact_engine_integrate(Poly::monomial(2, {2, 1}, ExactScalar(1)), single({2, 1}));
  CHECK(swapped == ExactScalar(Rational(1, 10)));
  // Variable-count mismatch is refused.
  CHECK_THROWS_AS(exact_engine_integrate(Poly::variable(1, 0), id2), std::invalid_argument);
}

TEST_CASE("line integrals: pair identities and the swapped sign") {
  const std::vector<DifferentialForm> w12{omega(1), omega(2)};
  const IntegralResult r = iterated_integral(line, w12, ObserverPermutations::identity(1, 2),
                                             exact_cfg());
  REQUIRE(r.is_exact());
  CHECK(*r.exact == ExactScalar(Rational(2, 3)));
  CHECK(r.value_str() == "2/3");

  const IntegralResult rswap = iterated_integral(line, w12, single({2, 1}), exact_cfg());
  CHECK(*rswap.exact == ExactScalar(Rational(-1, 3)));
}

TEST_CASE("line integrals: all ordered triples") {
  struct Case {
    std::vector<int> order;
    Rational expect;
  };
  // Values of  ∫ omega_{o1} omega_{o2} omega_{o3}  over 0<t1<t2<t3<1.
  const std::vector<Case> cases{
      {{1, 2, 3}, Rational(1, 3)},  {{1, 3, 2}, Rational(1, 4)},  {{2, 1, 3}, Rational(1, 6)},
      {{2, 3, 1}, Rational(1, 10)}, {{3, 1, 2}, Rational(1, 12)}, {{3, 2, 1}, Rational(1, 15)}};
  for (const Case& c : cases) {
    const std::vector<DifferentialForm> forms{omega(c.order[0]), omega(c.order[1]),
                                              omega(c.order[2])};
    const IntegralResult r =
        iterated_integral(line, forms, ObserverPermutations::identity(1, 3), exact_cfg());
    CHECK(*r.exact == ExactScalar(c.expect));
  }
}

TEST_CASE("classical reduction: permuted observers equal signed reordered forms") {
  // For paths, an observer permutation only relabels the events: the value
  // is the permutation's parity times the identity-order integral of the
  // reordered forms.  Exhaustive over sizes 1..3 here (larger in the
  // acceptance run).
  for (int s = 1; s <= 3; ++s) {
    std::vector<DifferentialForm> forms;
    for (int k = 1; k <= s; ++k) forms.push_back(omega(k));
    for (const Permutation& p : all_permutations(s)) {
      const IntegralResult lhs =
          iterated_integral(line, forms, ObserverPermutations({p}), exact_cfg());
      std::vector<DifferentialForm> reordered;
      for (int k = 1; k <= s; ++k) reordered.push_back(forms[p(k) - 1]);
      const IntegralResult rhs = iterated_integral(line, reordered,
                                                   ObserverPermutations::identity(1, s),
                                                   exact_cfg());
      ExactScalar expect = *rhs.exact;
      if (parity(p) < 0) expect = -expect;
      CHECK(*lhs.exact == expect);
    }
  }
}

TEST_CASE("membranes over the square: cube volume and double-volume") {
  const Membrane id2 = identity_membrane(2);
  const IntegralResult vol = iterated_integral(id2, {area_form},
                                               ObserverPermutations::identity(2, 1), exact_cfg());
  CHECK(*vol.exact == ExactScalar(1));
  const IntegralResult vol2 = iterated_integral(
      id2, {area_form, area_form}, ObserverPermutations::identity(2, 2), exact_cfg());
  CHECK(*vol2.exact == ExactScalar(Rational(1, 4)));
}

TEST_CASE("plane loops: frozen values, composition, piecewise chains") {
  const DifferentialForm w = monomial_form(2, {1}, Poly::variable(2, 1));  // x2 dx1
  const ObserverPermutations id1 = ObserverPermutations::identity(1, 1);
  const IntegralResult ra = iterated_integral(loop_a(), {w}, id1, exact_cfg());
  CHECK(*ra.exact == ExactScalar(Rational(-1, 60)));
  const IntegralResult rb = iterated_integral(loop_b(), {w}, id1, exact_cfg());
  CHECK(*rb.exact == ExactScalar(Rational(1, 30)));
  const Membrane c = compose(loop_a(), loop_b());
  const IntegralResult rc = iterated_integral(c, {w}, id1, exact_cfg());
  CHECK(*rc.exact == ExactScalar(Rational(1, 60)));

  // Piecewise s=2 chain: the pair-shuffle identity J^id - J^swap =
  // (single of omega_1) * (single of omega_2) holds exactly.
  const DifferentialForm w2 = monomial_form(2, {2}, Poly::variable(2, 0));  // x1 dx2
  const IntegralResult jid =
      iterated_integral(c, {w, w2}, ObserverPermutations::identity(1, 2), exact_cfg());
  const IntegralResult jsw = iterated_integral(c, {w, w2}, single({2, 1}), exact_cfg());
  const IntegralResult s1 = iterated_integral(c, {w}, id1, exact_cfg());
  const IntegralResult s2 = iterated_integral(c, {w2}, id1, exact_cfg());
  CHECK(*jid.exact - *jsw.exact == *s1.exact * *s2.exact);
}

TEST_CASE("s = 0 returns exactly one; constants kill positive s") {
  for (EngineConfig cfg : {exact_cfg(), quad_cfg(), mc_cfg(11)}) {
    const IntegralResult r = iterated_integral(line, {}, ObserverPermutations::identity(1, 0), cfg);
    REQUIRE(r.is_exact());
    CHECK(*r.exact == ExactScalar(1));
  }
  const Membrane cst = constant_membrane(1, {ExactScalar(Rational(1, 3))});
  const IntegralResult r = iterated_integral(cst, {monomial_form(1, {1}, Poly::variable(1, 0))},
                                             ObserverPermutations::identity(1, 1), exact_cfg());
  CHECK(*r.exact == ExactScalar(0));
}

TEST_CASE("multilinearity in the first slot") {
  const ExactScalar a(Rational(2, 3)), b(Rational(-1, 5));
  // a*omega_2 + b*omega_3 as a single form.
  DifferentialForm combo(1, 1);
  combo.add_term({1}, CoefficientFunction::from_poly(
                          Poly::monomial(1, {1}, ExactScalar(2) * a) +
                          Poly::monomial(1, {2}, ExactScalar(3) * b)));
  const ObserverPermutations id2 = ObserverPermutations::identity(1, 2);
  const IntegralResult lhs = iterated_integral(line, {combo, omega(1)}, id2, exact_cfg());
  const IntegralResult r2 = iterated_integral(line, {omega(2), omega(1)}, id2, exact_cfg());
  const IntegralResult r3 = iterated_integral(line, {omega(3), omega(1)}, id2, exact_cfg());
  CHECK(*lhs.exact == a * *r2.exact + b * *r3.exact);
}

TEST_CASE("input validation names the failing slot") {
  CHECK_THROWS_AS(iterated_integral(identity_membrane(2), {omega(1)},
                                    ObserverPermutations::identity(2, 1), exact_cfg()),
                  std::invalid_argument);  // degree 1 != n = 2
  CHECK_THROWS_AS(iterated_integral(line, {area_form}, ObserverPermutations::identity(1, 1),
                                    exact_cfg()),
                  std::invalid_argument);  // ambient 2 != d = 1
  CHECK_THROWS_AS(iterated_integral(line, {omega(1)}, ObserverPermutations::identity(1, 2),
                                    exact_cfg()),
                  std::invalid_argument);  // s mismatch
  CHECK_THROWS_AS(iterated_integral(line, {omega(1)}, ObserverPermutations::identity(2, 1),
                                    exact_cfg()),
                  std::invalid_argument);  // n mismatch
  // Exact engine rejects black-box membranes and callback coefficients.
  CHECK_THROWS_AS(iterated_integral(torus_loop_membrane(2.0, 0.5),
                                    {constant_form(3, {1, 2}, ExactScalar(1))},
                                    ObserverPermutations::identity(2, 1), exact_cfg()),
                  std::invalid_argument);
  DifferentialForm cb(1, 1);
  cb.add_term({1}, CoefficientFunction::from_callback(
                       [](std::span<const std::complex<double>> z) { return z[0]; }));
  CHECK_THROWS_AS(iterated_integral(line, {cb}, ObserverPermutations::identity(1, 1), exact_cfg()),
                  std::invalid_argument);
  // Field mismatch: complex form over a real membrane.
  CHECK_THROWS_AS(iterated_integral(line, {constant_form(1, {1}, ExactScalar(1), Field::Complex)},
                                    ObserverPermutations::identity(1, 1), exact_cfg()),
                  std::invalid_argument);
}

TEST_CASE("quadrature: simplex volumes and cross-engine agreement") {
  // Constant density over 0 < t1 < t2 < t3 < 1.
  const DensityFn one = [](std::span<const double>) { return std::complex<double>(1.0); };
  const IntegralResult v3 =
      quadrature_engine_integrate(one, ObserverPermutations::identity(1, 3), quad_cfg());
  CHECK(std::abs(v3.value - 1.0 / 6) < 1e-12);
  CHECK(v3.points_used > 0);

  // The 2/3 line example.
  const IntegralResult q23 = iterated_integral(line, {omega(1), omega(2)},
                                               ObserverPermutations::identity(1, 2), quad_cfg());
  CHECK(std::abs(q23.value - 2.0 / 3) < 1e-12);
  CHECK(q23.error_estimate < 1e-12);

  // The quarter on the square.
  const IntegralResult q14 = iterated_integral(identity_membrane(2), {area_form, area_form},
                                               ObserverPermutations::identity(2, 2), quad_cfg());
  CHECK(std::abs(q14.value - 0.25) < 1e-12);

  // Piecewise composite path: subdivision keeps Gauss exactness.
  const Membrane c = compose(loop_a(), loop_b());
  const DifferentialForm w = monomial_form(2, {1}, Poly::variable(2, 1));
  const IntegralResult qc =
      iterated_integral(c, {w}, ObserverPermutations::identity(1, 1), quad_cfg());
  CHECK(std::abs(qc.value - 1.0 / 60) < 1e-12);

  // The swapped observer keeps its sign under quadrature.
  const IntegralResult qsw =
      iterated_integral(line, {omega(1), omega(2)}, single({2, 1}), quad_cfg());
  CHECK(std::abs(qsw.value - (-1.0 / 3)) < 1e-12);

  // Dimension cap.
  CHECK_THROWS_AS(
      quadrature_engine_integrate(one, ObserverPermutations::identity(3, 3), quad_cfg()),
      std::invalid_argument);
}

TEST_CASE("quadrature on a trigonometric membrane matches the closed form") {
  // Flux of x3 dx1^dx2 through the torus surface: 2 pi^2 R r^2.
  const Membrane torus = torus_loop_membrane(2.0, 0.5);
  const DifferentialForm w = monomial_form(3, {1, 2}, Poly::variable(3, 2));
  const IntegralResult r = iterated_integral(torus, {w}, ObserverPermutations::identity(2, 1),
                                             quad_cfg(12));
  const double expect = 2.0 * std::numbers::pi * std::numbers::pi * 2.0 * 0.25;
  CHECK(std::abs(r.value - expect) < 1e-6);
  CHECK(r.error_estimate < 1e-3);
}

TEST_CASE("monte carlo: statistics, replay, and missing-seed rejection") {
  const IntegralResult mc = iterated_integral(line, {omega(1), omega(2)},
                                              ObserverPermutations::identity(1, 2), mc_cfg(42));
  CHECK(mc.error_estimate > 0);
  CHECK(std::abs(mc.value - 2.0 / 3) <= 3 * mc.error_estimate);
  CHECK(mc.points_used == 100000);
  REQUIRE(mc.seed.has_value());

  // Bit-identical replay.
  const IntegralResult again = iterated_integral(line, {omega(1), omega(2)},
                                                 ObserverPermutations::identity(1, 2), mc_cfg(42));
  CHECK(mc.value.real() == again.value.real());
  CHECK(mc.value.imag() == again.value.imag());
  CHECK(mc.error_estimate == again.error_estimate);

  // Indicator-only integrand: the simplex volume 1/2.
  const IntegralResult half = iterated_integral(line, {omega(1), omega(1)},
                                                ObserverPermutations::identity(1, 2), mc_cfg(7));
  CHECK(std::abs(half.value - 0.5) <= 3 * half.error_estimate);

  // The square's double volume.
  const IntegralResult quarter =
      iterated_integral(identity_membrane(2), {area_form, area_form},
                        ObserverPermutations::identity(2, 2), mc_cfg(1234));
  CHECK(std::abs(quarter.value - 0.25) <= 3 * quarter.error_estimate);

  EngineConfig noseed;
  noseed.engine = Engine::MonteCarlo;
  CHECK_THROWS_AS(iterated_integral(line, {omega(1)}, ObserverPermutations::identity(1, 1),
                                    noseed),
                  std::invalid_argument);
}

TEST_CASE("chains integrate linearly") {
  const Membrane a = loop_a(), b = loop_b();
  MembraneChain chain;
  chain.terms.emplace_back(2, a);
  chain.terms.emplace_back(-3, b);
  const DifferentialForm w = monomial_form(2, {1}, Poly::variable(2, 1));
  const IntegralResult r =
      chain_iterated_integral(chain, {w}, ObserverPermutations::identity(1, 1), exact_cfg());
  REQUIRE(r.is_exact());
  // 2*(-1/60) - 3*(1/30) = -1/30 - 1/10 = -2/15.
  CHECK(*r.exact == ExactScalar(Rational(-2, 15)));
}
