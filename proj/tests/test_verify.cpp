#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "memint/verify.hpp"

using namespace memint;

namespace {

Poly p1(std::initializer_list<std::pair<int, Rational>> terms) {
  Poly p(1);
  for (const auto& [e, c] : terms) p.add_term({e}, ExactScalar(c));
  return p;
}

DifferentialForm omega(int k) {
  return monomial_form(1, {1}, Poly::monomial(1, {k - 1}, ExactScalar(k)));
}

Membrane loop_a() {
  return polynomial_path_membrane({p1({{1, 1}, {2, -1}}), p1({{2, 1}, {3, -1}})});
}
Membrane loop_b() {
  return polynomial_path_membrane({p1({{1, 1}, {2, -1}}), p1({{1, 1}, {2, -3}, {3, 2}})});
}

const DifferentialForm w21 = monomial_form(2, {1}, Poly::variable(2, 1));
const DifferentialForm w12 = monomial_form(2, {2}, Poly::variable(2, 0));

EngineConfig exact_cfg() { return EngineConfig{}; }

// gamma_1 = t, gamma_2 = t + i u t(1 - t): endpoint-fixed product family.
HomotopyFamily bend_family() {
  HomotopyFamily family;
  Poly f1(2);
  f1.add_term({1, 0}, ExactScalar(1));
  Poly f2(2);
  f2.add_term({1, 0}, ExactScalar(1));
  f2.add_term({1, 1}, ExactScalar::i());
  f2.add_term({2, 1}, -ExactScalar::i());
  family.factors = {f1, f2};
  return family;
}

const DifferentialForm z1_vol = monomial_form(2, {1, 2}, Poly::variable(2, 0), Field::Complex);

}  // namespace

TEST_CASE("report plumbing: names and engine metadata") {
  CHECK(verdict_name(Verdict::Pass) == "pass");
  CHECK(verdict_name(Verdict::Fail) == "fail");
  CHECK(verdict_name(Verdict::Error) == "error");
  CHECK(engine_metadata(exact_cfg()) == "exact");
  EngineConfig q;
  q.engine = Engine::Quadrature;
  CHECK(engine_metadata(q) == "quadrature(q=8,depth=1)");
  EngineConfig m;
  m.engine = Engine::MonteCarlo;
  m.seed = 42;
  CHECK(engine_metadata(m) == "montecarlo(seed=42,N=100000)");
}

TEST_CASE("reparametrization: exact invariance and sign-flip detection") {
  PolynomialMembrane square_map;
  square_map.n = square_map.d = 1;
  square_map.breaks = {{}};
  square_map.cells = {{Poly::monomial(1, {2}, ExactScalar(1))}};
  const Reparametrization phi = make_reparametrization(std::move(square_map));
  const Membrane line = identity_membrane(1);
  const std::vector<DifferentialForm> forms{omega(1), omega(2)};
  const CheckReport rep = check_reparametrization(
      "line-square", line, phi, forms, ObserverPermutations::identity(1, 2), exact_cfg());
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.abs_deviation == 0.0);
  CHECK(rep.lhs == "2/3");
  CHECK(rep.rhs == "2/3");
  CHECK(rep.tolerance == 0.0);
  CHECK(rep.engine == "exact");

  CheckOptions flip;
  flip.inject_sign_flip = true;
  const CheckReport bad = check_reparametrization(
      "line-square", line, phi, forms, ObserverPermutations::identity(1, 2), exact_cfg(), flip);
  CHECK(bad.verdict == Verdict::Fail);
  CHECK(bad.rhs == "-2/3");
}

TEST_CASE("naturality: shear map on a plane loop") {
  const std::vector<Poly> shear{Poly::variable(2, 0),
                                Poly::variable(2, 1) + Poly::monomial(2, {2, 0}, ExactScalar(1))};
  const CheckReport rep =
      check_naturality("shear", shear, loop_a(), {w21, w12},
                       ObserverPermutations::identity(1, 2), exact_cfg());
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.abs_deviation == 0.0);
}

TEST_CASE("shuffle: product equals the sum over interleaving orders") {
  const Membrane line = identity_membrane(1);
  // Trivial blocks: 1 * 1 = 1/2 + 1/2.
  const CheckReport unit =
      check_shuffle("unit", line, {omega(1)}, {omega(1)}, ObserverPermutations::identity(1, 1),
                    ObserverPermutations::identity(1, 1), exact_cfg());
  CHECK(unit.verdict == Verdict::Pass);
  CHECK(unit.lhs == "1");
  CHECK(unit.rhs == "1");

  // Reversed left block: the family that separates interleavings from other
  // permutation families.
  const CheckReport twisted = check_shuffle(
      "twisted", line, {omega(1), omega(2)}, {omega(3)},
      ObserverPermutations({Permutation({2, 1})}), ObserverPermutations::identity(1, 1),
      exact_cfg());
  CHECK(twisted.verdict == Verdict::Pass);
  CHECK(twisted.abs_deviation == 0.0);
  CHECK(twisted.lhs == "1/3");
  CHECK(twisted.note == "interleaving orders: 3");

  CheckOptions flip;
  flip.inject_sign_flip = true;
  const CheckReport bad = check_shuffle(
      "twisted", line, {omega(1), omega(2)}, {omega(3)},
      ObserverPermutations({Permutation({2, 1})}), ObserverPermutations::identity(1, 1),
      exact_cfg(), flip);
  CHECK(bad.verdict == Verdict::Fail);
}

TEST_CASE("composition: split sum over closed plane loops") {
  const CheckReport rep =
      check_composition("loops", loop_a(), loop_b(), {w21, w12}, exact_cfg());
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.abs_deviation == 0.0);

  CheckOptions flip;
  flip.inject_sign_flip = true;
  const CheckReport bad = check_composition("loops", loop_a(), loop_b(), {w21}, exact_cfg(), flip);
  CHECK(bad.verdict == Verdict::Fail);
}

TEST_CASE("vanishing: zero below the diagonal, products on it") {
  const std::vector<Membrane> ab{loop_a(), loop_b()};
  const CheckReport zero = check_vanishing("s1r2", ab, {w21}, exact_cfg());
  CHECK(zero.verdict == Verdict::Pass);
  CHECK(zero.lhs == "0");
  CHECK(zero.rhs == "0");

  const CheckReport prod = check_vanishing("s2r2", ab, {w21, w12}, exact_cfg());
  CHECK(prod.verdict == Verdict::Pass);
  CHECK(prod.abs_deviation == 0.0);

  CHECK_THROWS_AS(check_vanishing("bad", ab, {w21, w12, w21}, exact_cfg()),
                  std::invalid_argument);

  CheckOptions flip;
  flip.inject_sign_flip = true;
  const CheckReport bad = check_vanishing("s1r2", ab, {w21}, exact_cfg(), flip);
  CHECK(bad.verdict == Verdict::Fail);
}

TEST_CASE("classical reduction: observer order vs reordered forms") {
  const Membrane line = identity_membrane(1);
  const CheckReport rep =
      check_classical_reduction("s3", line, {omega(1), omega(2), omega(3)},
                                Permutation({3, 1, 2}), exact_cfg());
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.abs_deviation == 0.0);
  CHECK_THROWS_AS(check_classical_reduction("bad", identity_membrane(2), {}, Permutation({}),
                                            exact_cfg()),
                  std::invalid_argument);
}

TEST_CASE("homotopy family: construction, validation, exact invariance") {
  const HomotopyFamily family = bend_family();
  family.validate();
  const Membrane mid = family.membrane_at(Rational(1, 2));
  REQUIRE(mid.polynomial());
  std::vector<std::complex<double>> out(2);
  const double t[2] = {0.5, 0.5};
  mid.eval(std::span<const double>(t, 2), out);
  CHECK(std::abs(out[0] - std::complex<double>(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(out[1] - std::complex<double>(0.5, 0.125)) < 1e-15);

  EngineConfig cfg = exact_cfg();
  cfg.field = Field::Complex;
  const CheckReport rep = check_homotopy_invariance(
      "bend", family, {z1_vol, z1_vol}, ObserverPermutations::identity(2, 2),
      {Rational(0), Rational(1, 2), Rational(1)}, cfg);
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.abs_deviation == 0.0);
  CHECK(rep.lhs == "1/16");

  CheckOptions flip;
  flip.inject_sign_flip = true;
  const CheckReport bad = check_homotopy_invariance(
      "bend", family, {z1_vol, z1_vol}, ObserverPermutations::identity(2, 2),
      {Rational(0), Rational(1)}, cfg, flip);
  CHECK(bad.verdict == Verdict::Fail);

  // A factor whose endpoint moves with u is rejected.
  HomotopyFamily broken = bend_family();
  Poly drift(2);
  drift.add_term({0, 1}, ExactScalar(1));  // gamma(t, u) = u
  broken.factors[1] = drift;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  CHECK_THROWS_AS(check_homotopy_invariance("short", family, {z1_vol, z1_vol},
                                            ObserverPermutations::identity(2, 2), {Rational(0)},
                                            cfg),
                  std::invalid_argument);
}

TEST_CASE("engine-matched tolerances: quadrature relative, monte carlo 3 sigma") {
  EngineConfig q;
  q.engine = Engine::Quadrature;
  const CheckReport quad =
      check_shuffle("quad", identity_membrane(1), {omega(1)}, {omega(2)},
                    ObserverPermutations::identity(1, 1), ObserverPermutations::identity(1, 1), q);
  CHECK(quad.verdict == Verdict::Pass);
  CHECK(quad.tolerance == 1e-8);
  CHECK(quad.engine == "quadrature(q=8,depth=1)");

  EngineConfig m;
  m.engine = Engine::MonteCarlo;
  m.seed = 2024;
  m.mc_samples = 20000;
  const CheckReport mc = check_classical_reduction(
      "mc", identity_membrane(1), {omega(1), omega(2)}, Permutation({2, 1}), m);
  CHECK(mc.tolerance > 0.0);
  CHECK(mc.verdict == Verdict::Pass);
}

TEST_CASE("guarded checks turn engine mismatches into error verdicts") {
  const CheckReport rep = guarded_check("classical-reduction", "torus", exact_cfg(), [] {
    return check_classical_reduction("torus", torus_loop_membrane(2.0, 0.5), {}, Permutation({}),
                                     EngineConfig{});
  });
  CHECK(rep.verdict == Verdict::Error);
  CHECK(rep.note.find("path") != std::string::npos);
}

TEST_CASE("built-in identities suite: exact engine, every deviation exactly zero") {
  const std::vector<CheckReport> reports = run_builtin_suite("identities", exact_cfg());
  CHECK(reports.size() > 50);
  std::set<std::string> ids, checks;
  for (const CheckReport& r : reports) {
    CAPTURE(r.scenario_id);
    CAPTURE(r.note);
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.abs_deviation == 0.0);
    ids.insert(r.scenario_id);
    checks.insert(r.check);
  }
  CHECK(ids.size() == reports.size());  // scenario ids are unique
  CHECK(checks == std::set<std::string>{"classical-reduction", "shuffle", "composition",
                                        "vanishing", "reparametrization", "naturality"});
}

TEST_CASE("built-in negative controls: every report fails") {
  const std::vector<CheckReport> reports = run_builtin_suite("negative-controls", exact_cfg());
  CHECK(reports.size() == 7);
  for (const CheckReport& r : reports) {
    CAPTURE(r.scenario_id);
    CHECK(r.verdict == Verdict::Fail);
  }
}

TEST_CASE("suite names and the compatibility alias") {
  CHECK(builtin_suite_names() == std::vector<std::string>{"identities", "negative-controls"});
  CHECK(is_builtin_suite("identities"));
  CHECK(is_builtin_suite("negative-controls"));
  CHECK(is_builtin_suite("paper-identities"));
  CHECK_FALSE(is_builtin_suite("everything"));
  const size_t canonical = run_builtin_suite("identities", exact_cfg()).size();
  CHECK(run_builtin_suite("paper-identities", exact_cfg()).size() == canonical);
  CHECK_THROWS_AS(run_builtin_suite("everything", exact_cfg()), std::invalid_argument);
}
