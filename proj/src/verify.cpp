#include "memint/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "memint/combinatorics.hpp"

namespace memint {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Error: return "error";
  }
  return "";
}

std::string engine_metadata(const EngineConfig& cfg) {
  switch (cfg.engine) {
    case Engine::Exact:
      return "exact";
    case Engine::Quadrature:
      return "quadrature(q=" + std::to_string(cfg.quad_order) +
             ",depth=" + std::to_string(cfg.subdivision_depth) + ")";
    case Engine::MonteCarlo:
      return "montecarlo(seed=" + (cfg.seed ? std::to_string(*cfg.seed) : std::string("unset")) +
             ",N=" + std::to_string(cfg.mc_samples) + ")";
  }
  return "";
}

namespace {

// A computed side of an identity: numeric value, exact value when the engine
// produced one, and a first-order monte-carlo standard error.
struct Val {
  std::complex<double> v{0.0, 0.0};
  std::optional<ExactScalar> exact;
  double se = 0.0;
};

Val from_result(const IntegralResult& r) {
  Val out;
  out.v = r.value;
  out.exact = r.exact;
  if (r.engine == Engine::MonteCarlo) out.se = r.error_estimate;
  return out;
}

Val val_zero() {
  Val out;
  out.exact = ExactScalar(0);
  return out;
}

Val operator-(const Val& a) {
  Val out;
  out.v = -a.v;
  if (a.exact) out.exact = -*a.exact;
  out.se = a.se;
  return out;
}

Val operator+(const Val& a, const Val& b) {
  Val out;
  out.v = a.v + b.v;
  if (a.exact && b.exact) out.exact = *a.exact + *b.exact;
  out.se = std::hypot(a.se, b.se);
  return out;
}

Val operator*(const Val& a, const Val& b) {
  Val out;
  out.v = a.v * b.v;
  if (a.exact && b.exact) out.exact = *a.exact * *b.exact;
  out.se = std::hypot(std::abs(a.v) * b.se, std::abs(b.v) * a.se);
  return out;
}

// Deviation between two sides, honoring exactness: rationally equal values
// deviate by exactly zero no matter what the doubles round to.
double pair_deviation(const Val& a, const Val& b) {
  if (a.exact && b.exact) {
    const ExactScalar diff = *a.exact - *b.exact;
    return diff.is_zero() ? 0.0 : diff.abs_double();
  }
  return std::abs(a.v - b.v);
}

// The plain integral over the ordered domain (the engine's value carries the
// orientation sign of rho; multiplying it back out gives the unsigned one).
Val unsigned_integral(const Membrane& g, const std::vector<DifferentialForm>& forms,
                      const ObserverPermutations& rho, const EngineConfig& cfg) {
  Val out = from_result(iterated_integral(g, forms, rho, cfg));
  if (wedge_sign(rho) < 0) out = -out;
  return out;
}

CheckReport finalize(std::string check, std::string id, const EngineConfig& cfg, const Val& l,
                     const Val& r, const CheckOptions& opt, std::string note = "") {
  CheckReport rep;
  rep.check = std::move(check);
  rep.scenario_id = std::move(id);
  rep.engine_kind = cfg.engine;
  rep.engine = engine_metadata(cfg);
  rep.note = std::move(note);
  rep.lhs = value_string(l.v, l.exact);
  rep.rhs = value_string(r.v, r.exact);
  rep.abs_deviation = pair_deviation(l, r);
  rep.rel_deviation = rep.abs_deviation / std::max({1.0, std::abs(l.v), std::abs(r.v)});
  double measured = rep.abs_deviation;
  switch (cfg.engine) {
    case Engine::Exact:
      rep.tolerance = opt.tolerance.value_or(0.0);
      break;
    case Engine::Quadrature:
      rep.tolerance = opt.tolerance.value_or(1e-8);
      measured = rep.rel_deviation;
      break;
    case Engine::MonteCarlo:
      rep.tolerance = opt.tolerance.value_or(3.0 * std::hypot(l.se, r.se));
      break;
  }
  rep.verdict = measured <= rep.tolerance ? Verdict::Pass : Verdict::Fail;
  return rep;
}

}  // namespace

CheckReport check_reparametrization(const std::string& id, const Membrane& g,
                                    const Reparametrization& phi,
                                    const std::vector<DifferentialForm>& forms,
                                    const ObserverPermutations& rho, const EngineConfig& cfg,
                                    const CheckOptions& opt) {
  const Val l = from_result(iterated_integral(g, forms, rho, cfg));
  Val r = from_result(iterated_integral(reparametrize(g, phi), forms, rho, cfg));
  if (opt.inject_sign_flip) r = -r;
  return finalize("reparametrization", id, cfg, l, r, opt);
}

CheckReport check_naturality(const std::string& id, const std::vector<Poly>& map_components,
                             const Membrane& g, const std::vector<DifferentialForm>& forms,
                             const ObserverPermutations& rho, const EngineConfig& cfg,
                             const CheckOptions& opt) {
  const Membrane image = apply_polynomial_map(map_components, g);
  const Val l = from_result(iterated_integral(image, forms, rho, cfg));
  std::vector<DifferentialForm> pulled;
  pulled.reserve(forms.size());
  for (const DifferentialForm& w : forms) pulled.push_back(pullback_form(map_components, w));
  Val r = from_result(iterated_integral(g, pulled, rho, cfg));
  if (opt.inject_sign_flip) r = -r;
  return finalize("naturality", id, cfg, l, r, opt);
}

CheckReport check_shuffle(const std::string& id, const Membrane& g,
                          const std::vector<DifferentialForm>& forms_a,
                          const std::vector<DifferentialForm>& forms_b,
                          const ObserverPermutations& rho, const ObserverPermutations& rho_prime,
                          const EngineConfig& cfg, const CheckOptions& opt) {
  const Val l =
      unsigned_integral(g, forms_a, rho, cfg) * unsigned_integral(g, forms_b, rho_prime, cfg);
  std::vector<DifferentialForm> all = forms_a;
  all.insert(all.end(), forms_b.begin(), forms_b.end());
  const std::vector<ObserverPermutations> merges = merge_orders(rho, rho_prime);
  Val r = val_zero();
  for (size_t i = 0; i < merges.size(); ++i) {
    Val term = unsigned_integral(g, all, merges[i], cfg);
    if (opt.inject_sign_flip && i + 1 == merges.size()) term = -term;
    r = r + term;
  }
  return finalize("shuffle", id, cfg, l, r, opt,
                  "interleaving orders: " + std::to_string(merges.size()));
}

CheckReport check_composition(const std::string& id, const Membrane& g1, const Membrane& g2,
                              const std::vector<DifferentialForm>& forms, const EngineConfig& cfg,
                              const CheckOptions& opt) {
  const int n = g1.n();
  const int s = static_cast<int>(forms.size());
  const Membrane composite = compose(g1, g2);
  const Val l = from_result(
      iterated_integral(composite, forms, ObserverPermutations::identity(n, s), cfg));
  Val r = val_zero();
  for (int j = 0; j <= s; ++j) {
    const std::vector<DifferentialForm> head(forms.begin(), forms.begin() + j);
    const std::vector<DifferentialForm> tail(forms.begin() + j, forms.end());
    Val term =
        from_result(iterated_integral(g1, head, ObserverPermutations::identity(n, j), cfg)) *
        from_result(iterated_integral(g2, tail, ObserverPermutations::identity(n, s - j), cfg));
    if (opt.inject_sign_flip && j == s) term = -term;
    r = r + term;
  }
  return finalize("composition", id, cfg, l, r, opt);
}

CheckReport check_vanishing(const std::string& id, const std::vector<Membrane>& alphas,
                            const std::vector<DifferentialForm>& forms, const EngineConfig& cfg,
                            const CheckOptions& opt) {
  const int r_factors = static_cast<int>(alphas.size());
  const int s = static_cast<int>(forms.size());
  if (s > r_factors)
    throw std::invalid_argument("vanishing check: needs at least as many factors as forms");
  MembraneChain chain = expand_vanishing_chain(alphas);
  if (opt.inject_sign_flip) chain.terms.front().first = -chain.terms.front().first;
  const int n = alphas.front().n();
  const Val l = from_result(
      chain_iterated_integral(chain, forms, ObserverPermutations::identity(n, s), cfg));
  Val r = val_zero();
  if (s == r_factors) {
    Val prod;
    prod.v = 1.0;
    prod.exact = ExactScalar(1);
    for (int j = 0; j < s; ++j)
      prod = prod * from_result(iterated_integral(alphas[j], {forms[j]},
                                                  ObserverPermutations::identity(n, 1), cfg));
    r = prod;
  }
  return finalize("vanishing", id, cfg, l, r, opt,
                  "chain terms: " + std::to_string(chain.terms.size()));
}

CheckReport check_classical_reduction(const std::string& id, const Membrane& g,
                                      const std::vector<DifferentialForm>& forms,
                                      const Permutation& rho, const EngineConfig& cfg,
                                      const CheckOptions& opt) {
  if (g.n() != 1)
    throw std::invalid_argument("classical reduction: the membrane must be a path (n = 1)");
  const int s = static_cast<int>(forms.size());
  const Val l = from_result(iterated_integral(g, forms, ObserverPermutations({rho}), cfg));
  std::vector<DifferentialForm> reordered;
  reordered.reserve(forms.size());
  for (int k = 1; k <= s; ++k) reordered.push_back(forms[rho(k) - 1]);
  Val r = from_result(
      iterated_integral(g, reordered, ObserverPermutations::identity(1, s), cfg));
  if (parity(rho) < 0) r = -r;
  if (opt.inject_sign_flip) r = -r;
  return finalize("classical-reduction", id, cfg, l, r, opt);
}

void HomotopyFamily::validate() const {
  if (factors.empty())
    throw std::invalid_argument("homotopy family: needs at least one factor path");
  for (const Poly& f : factors) {
    if (f.nvars() != 2)
      throw std::invalid_argument("homotopy family: factors must be polynomials in (t, u)");
    for (int t = 0; t <= 1; ++t) {
      const Poly end = f.substitute(0, ExactScalar(t));
      if (!(end.derivative(1) == Poly(2)))
        throw std::invalid_argument(
            "homotopy family: factor endpoints must not move with the deformation parameter");
    }
  }
}

Membrane HomotopyFamily::membrane_at(const Rational& u) const {
  const int n = dimension();
  PolynomialMembrane rep;
  rep.n = n;
  rep.d = n;
  rep.field = field;
  rep.breaks.assign(n, {});
  std::vector<Poly> comps;
  comps.reserve(n);
  for (int nu = 0; nu < n; ++nu) {
    const Poly slice = factors[nu].substitute(1, ExactScalar(u));
    comps.push_back(slice.remap(n, {nu, nu}));  // u is gone; t becomes t_nu
  }
  rep.cells.push_back(std::move(comps));
  return Membrane::from_polynomial(std::move(rep));
}

CheckReport check_homotopy_invariance(const std::string& id, const HomotopyFamily& family,
                                      const std::vector<DifferentialForm>& forms,
                                      const ObserverPermutations& rho,
                                      const std::vector<Rational>& u_samples,
                                      const EngineConfig& cfg, const CheckOptions& opt) {
  family.validate();
  if (u_samples.size() < 2)
    throw std::invalid_argument("homotopy check: needs at least two deformation samples");
  std::vector<Val> vals;
  vals.reserve(u_samples.size());
  std::string note;
  for (const Rational& u : u_samples) {
    vals.push_back(from_result(iterated_integral(family.membrane_at(u), forms, rho, cfg)));
    if (!note.empty()) note += "; ";
    note += "u=" + rational_to_string(u) + ": " + value_string(vals.back().v, vals.back().exact);
  }
  if (opt.inject_sign_flip) vals.back() = -vals.back();
  // Report the worst pair.
  size_t bi = 0, bj = vals.size() - 1;
  double worst = -1.0;
  for (size_t i = 0; i < vals.size(); ++i)
    for (size_t j = i + 1; j < vals.size(); ++j) {
      const double dev = pair_deviation(vals[i], vals[j]);
      if (dev > worst) {
        worst = dev;
        bi = i;
        bj = j;
      }
    }
  return finalize("homotopy-invariance", id, cfg, vals[bi], vals[bj], opt, note);
}

CheckReport guarded_check(const std::string& check, const std::string& id,
                          const EngineConfig& cfg, const std::function<CheckReport()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    CheckReport rep;
    rep.check = check;
    rep.scenario_id = id;
    rep.lhs = "-";
    rep.rhs = "-";
    rep.verdict = Verdict::Error;
    rep.engine_kind = cfg.engine;
    rep.engine = engine_metadata(cfg);
    rep.note = e.what();
    return rep;
  }
}

// ---- built-in suites --------------------------------------------------------

namespace {

Poly upoly(std::initializer_list<std::pair<int, Rational>> terms) {
  Poly p(1);
  for (const auto& [e, c] : terms) p.add_term({e}, ExactScalar(c));
  return p;
}

// k x^{k-1} dx on the line.
DifferentialForm line_form(int k) {
  return monomial_form(1, {1}, Poly::monomial(1, {k - 1}, ExactScalar(k)));
}

// Plane loops based at the origin with pairwise different shapes.
Membrane plane_loop(int which) {
  const Poly lobe = upoly({{1, 1}, {2, -1}});          // t(1-t)
  const Poly tall = upoly({{2, 1}, {3, -1}});          // t^2(1-t)
  const Poly skew = upoly({{1, 1}, {2, -3}, {3, 2}});  // t(1-t)(1-2t)
  switch (which) {
    case 0: return polynomial_path_membrane({lobe, tall});
    case 1: return polynomial_path_membrane({lobe, skew});
    default: return polynomial_path_membrane({tall, lobe});
  }
}

DifferentialForm plane_form_21() { return monomial_form(2, {1}, Poly::variable(2, 1)); }
DifferentialForm plane_form_12() { return monomial_form(2, {2}, Poly::variable(2, 0)); }

// Degree-2 forms on the plane with coefficient 1, x1, x2.
DifferentialForm square_form(int which) {
  switch (which) {
    case 1: return constant_form(2, {1, 2}, ExactScalar(1));
    case 2: return monomial_form(2, {1, 2}, Poly::variable(2, 0));
    default: return monomial_form(2, {1, 2}, Poly::variable(2, 1));
  }
}

Membrane square_bump(int which) {
  const std::vector<std::vector<int>> exps =
      which == 0 ? std::vector<std::vector<int>>{{1, 1}, {2, 1}}
                 : std::vector<std::vector<int>>{{1, 2}, {1, 1}};
  return bump_membrane(2, {ExactScalar(0), ExactScalar(0)}, {ExactScalar(1), ExactScalar(1)},
                       exps);
}

std::string perm_digits(const Permutation& p) {
  std::string s;
  for (int i = 1; i <= p.size(); ++i) s += std::to_string(p(i));
  return s.empty() ? "e" : s;
}

std::string rho_digits(const ObserverPermutations& r) {
  std::string s;
  for (int nu = 1; nu <= r.observers(); ++nu) {
    if (nu > 1) s += "x";
    s += perm_digits(r.perm(nu));
  }
  return s;
}

// All tuples in Per(s)^n.
std::vector<ObserverPermutations> observer_tuples(int n, int s) {
  const std::vector<Permutation> per = all_permutations(s);
  std::vector<ObserverPermutations> out;
  std::vector<size_t> idx(n, 0);
  while (true) {
    std::vector<Permutation> pick;
    pick.reserve(n);
    for (int nu = 0; nu < n; ++nu) pick.push_back(per[idx[nu]]);
    out.push_back(ObserverPermutations(std::move(pick)));
    int nu = n - 1;
    while (nu >= 0 && ++idx[nu] == per.size()) idx[nu--] = 0;
    if (nu < 0) break;
  }
  return out;
}

// The certified homotopy family used by the flip control: gamma_1 = t,
// gamma_2 = t + i u t(1-t).
HomotopyFamily control_family() {
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

DifferentialForm holomorphic_z1_form() {
  return monomial_form(2, {1, 2}, Poly::variable(2, 0), Field::Complex);
}

void run_identity_checks(std::vector<CheckReport>& out, const EngineConfig& cfg,
                         const CheckOptions& opt) {
  auto add = [&](const std::string& check, const std::string& id,
                 const std::function<CheckReport()>& fn) {
    out.push_back(guarded_check(check, id, cfg, fn));
  };
  const Membrane line = identity_membrane(1);
  const Membrane square = identity_membrane(2);
  const Membrane loop_a = plane_loop(0), loop_b = plane_loop(1), loop_c = plane_loop(2);
  const DifferentialForm w21 = plane_form_21(), w12 = plane_form_12();

  // Classical reduction: every observer order on the line, sizes 1..4.
  for (int s = 1; s <= 4; ++s) {
    std::vector<DifferentialForm> forms;
    for (int k = 1; k <= s; ++k) forms.push_back(line_form(k));
    for (const Permutation& p : all_permutations(s)) {
      const std::string id = "classical-s" + std::to_string(s) + "-rho" + perm_digits(p);
      add("classical-reduction", id,
          [=] { return check_classical_reduction(id, line, forms, p, cfg, opt); });
    }
  }

  // Shuffle relations: exhaustive observer orders for n <= 2, s + s' <= 3,
  // plus the empty right block.
  for (int n = 1; n <= 2; ++n) {
    const Membrane& g = n == 1 ? line : square;
    auto family_form = [&](int k) { return n == 1 ? line_form(k) : square_form(k); };
    for (int s = 1; s <= 2; ++s)
      for (int sp = 0; s + sp <= 3; ++sp) {
        if (sp == 0 && s != 2) continue;  // one trivial empty-block case per n
        std::vector<DifferentialForm> fa, fb;
        for (int k = 1; k <= s; ++k) fa.push_back(family_form(k));
        for (int k = s + 1; k <= s + sp; ++k) fb.push_back(family_form(k));
        for (const ObserverPermutations& rho : observer_tuples(n, s))
          for (const ObserverPermutations& rhop : observer_tuples(n, sp)) {
            const std::string id = "shuffle-n" + std::to_string(n) + "-s" + std::to_string(s) +
                                   std::to_string(sp) + "-rho" + rho_digits(rho) + "-rhop" +
                                   rho_digits(rhop);
            add("shuffle", id,
                [=] { return check_shuffle(id, g, fa, fb, rho, rhop, cfg, opt); });
          }
      }
  }

  // Composition of closed membranes: plane loops (n = 1) and bumps (n = 2).
  {
    const Membrane bump_a = square_bump(0), bump_b = square_bump(1);
    const std::vector<DifferentialForm> loop1{w21};
    const std::vector<DifferentialForm> loop2{w21, w12};
    const std::vector<DifferentialForm> bump1{square_form(2)};
    const std::vector<DifferentialForm> bump2{square_form(2), square_form(3)};
    add("composition", "composition-n1-s1",
        [=] { return check_composition("composition-n1-s1", loop_a, loop_b, loop1, cfg, opt); });
    add("composition", "composition-n1-s2",
        [=] { return check_composition("composition-n1-s2", loop_a, loop_b, loop2, cfg, opt); });
    add("composition", "composition-n2-s1",
        [=] { return check_composition("composition-n2-s1", bump_a, bump_b, bump1, cfg, opt); });
    add("composition", "composition-n2-s2",
        [=] { return check_composition("composition-n2-s2", bump_a, bump_b, bump2, cfg, opt); });
    const Membrane still = constant_membrane(1, {ExactScalar(0), ExactScalar(0)});
    add("composition", "composition-constant-factor", [=] {
      return check_composition("composition-constant-factor", loop_a, still, loop1, cfg, opt);
    });
  }

  // Vanishing of augmentation products over the plane loops.
  {
    const std::vector<Membrane> ab{loop_a, loop_b};
    const std::vector<Membrane> abc{loop_a, loop_b, loop_c};
    add("vanishing", "vanishing-s1-r2",
        [=] { return check_vanishing("vanishing-s1-r2", ab, {w21}, cfg, opt); });
    add("vanishing", "vanishing-s1-r3",
        [=] { return check_vanishing("vanishing-s1-r3", abc, {w21}, cfg, opt); });
    add("vanishing", "vanishing-s2-r3",
        [=] { return check_vanishing("vanishing-s2-r3", abc, {w21, w12}, cfg, opt); });
    add("vanishing", "vanishing-product-r1", [=] {
      return check_vanishing("vanishing-product-r1", {loop_a}, {w21}, cfg, opt);
    });
    add("vanishing", "vanishing-product-r2",
        [=] { return check_vanishing("vanishing-product-r2", ab, {w21, w12}, cfg, opt); });
  }

  // Reparametrization invariance.
  {
    // phi(x) = x on the line.
    PolynomialMembrane ident;
    ident.n = ident.d = 1;
    ident.breaks = {{}};
    ident.cells = {{Poly::variable(1, 0)}};
    // phi(x) = x^2 on the line.
    PolynomialMembrane square_map;
    square_map.n = square_map.d = 1;
    square_map.breaks = {{}};
    square_map.cells = {{Poly::monomial(1, {2}, ExactScalar(1))}};
    // Product map (x1^2, x2^3) on the square.
    PolynomialMembrane prod_map;
    prod_map.n = prod_map.d = 2;
    prod_map.breaks = {{}, {}};
    prod_map.cells = {{Poly::monomial(2, {2, 0}, ExactScalar(1)),
                       Poly::monomial(2, {0, 3}, ExactScalar(1))}};
    // Piecewise-linear bijection of the line with knots 1/4, 1/2.
    PolynomialMembrane pl_map;
    pl_map.n = pl_map.d = 1;
    pl_map.breaks = {{Rational(1, 4), Rational(1, 2)}};
    pl_map.cells = {{upoly({{1, 2}})},
                    {upoly({{0, Rational(1, 4)}, {1, 1}})},
                    {upoly({{0, Rational(1, 2)}, {1, Rational(1, 2)}})}};
    // Per-axis map on the square mixing a piecewise-linear axis with a
    // polynomial one: (pl(x1), x2^2) with pl kinked at 1/2.
    PolynomialMembrane mixed_map;
    mixed_map.n = mixed_map.d = 2;
    mixed_map.breaks = {{Rational(1, 2)}, {}};
    Poly kink_lo(2), kink_hi(2);
    kink_lo.add_term({1, 0}, ExactScalar(Rational(3, 2)));
    kink_hi.add_term({0, 0}, ExactScalar(Rational(1, 2)));
    kink_hi.add_term({1, 0}, ExactScalar(Rational(1, 2)));
    const Poly ysq = Poly::monomial(2, {0, 2}, ExactScalar(1));
    mixed_map.cells = {{kink_lo, ysq}, {kink_hi, ysq}};

    const Membrane bump = square_bump(0);
    const std::vector<DifferentialForm> pair_line{line_form(1), line_form(2)};
    const std::vector<DifferentialForm> pair_square{square_form(2), square_form(1)};
    add("reparametrization", "reparam-identity-map", [=] {
      return check_reparametrization("reparam-identity-map", line,
                                     make_reparametrization(ident), pair_line,
                                     ObserverPermutations::identity(1, 2), cfg, opt);
    });
    add("reparametrization", "reparam-line-square-map", [=] {
      return check_reparametrization("reparam-line-square-map", line,
                                     make_reparametrization(square_map), pair_line,
                                     ObserverPermutations::identity(1, 2), cfg, opt);
    });
    add("reparametrization", "reparam-product-mixed-orders", [=] {
      return check_reparametrization(
          "reparam-product-mixed-orders", bump, make_reparametrization(prod_map), pair_square,
          ObserverPermutations({Permutation({1, 2}), Permutation({2, 1})}), cfg, opt);
    });
    add("reparametrization", "reparam-piecewise-linear", [=] {
      return check_reparametrization("reparam-piecewise-linear", compose(loop_a, loop_b),
                                     make_reparametrization(pl_map), {w21},
                                     ObserverPermutations::identity(1, 1), cfg, opt);
    });
    add("reparametrization", "reparam-mixed-axes-2d", [=] {
      return check_reparametrization(
          "reparam-mixed-axes-2d", bump, make_reparametrization(mixed_map), pair_square,
          ObserverPermutations({Permutation({2, 1}), Permutation({1, 2})}), cfg, opt);
    });
  }

  // Naturality under polynomial maps of the target.
  {
    const std::vector<Poly> linear{
        Poly::monomial(2, {1, 0}, ExactScalar(2)) + Poly::variable(2, 1),
        Poly::variable(2, 1) - Poly::monomial(2, {1, 0}, ExactScalar(3))};
    const std::vector<Poly> shear{Poly::variable(2, 0),
                                  Poly::variable(2, 1) + Poly::monomial(2, {2, 0}, ExactScalar(1))};
    const std::vector<Poly> embed{Poly::variable(2, 0), Poly::variable(2, 1),
                                  Poly::variable(2, 0) + Poly::monomial(2, {0, 2}, ExactScalar(1))};
    const Membrane bump = square_bump(0);
    add("naturality", "naturality-linear", [=] {
      return check_naturality("naturality-linear", linear, loop_a, {w21, w12},
                              ObserverPermutations::identity(1, 2), cfg, opt);
    });
    add("naturality", "naturality-shear", [=] {
      return check_naturality("naturality-shear", shear, bump,
                              {square_form(2), square_form(1)},
                              ObserverPermutations::identity(2, 2), cfg, opt);
    });
    const DifferentialForm w3 = monomial_form(3, {1}, Poly::variable(3, 2));
    const DifferentialForm w3b = monomial_form(3, {2}, Poly::variable(3, 0));
    add("naturality", "naturality-embedding", [=] {
      return check_naturality("naturality-embedding", embed, loop_a, {w3, w3b},
                              ObserverPermutations::identity(1, 2), cfg, opt);
    });
  }
}

std::vector<CheckReport> identities_suite(const EngineConfig& cfg) {
  std::vector<CheckReport> out;
  run_identity_checks(out, cfg, CheckOptions{});
  return out;
}

std::vector<CheckReport> negative_controls_suite(const EngineConfig& cfg) {
  std::vector<CheckReport> out;
  CheckOptions flip;
  flip.inject_sign_flip = true;
  auto add = [&](const std::string& check, const std::string& id,
                 const std::function<CheckReport()>& fn) {
    out.push_back(guarded_check(check, id, cfg, fn));
  };
  const Membrane line = identity_membrane(1);
  const Membrane loop_a = plane_loop(0), loop_b = plane_loop(1);
  const DifferentialForm w21 = plane_form_21(), w12 = plane_form_12();

  add("classical-reduction", "control-classical", [=] {
    return check_classical_reduction("control-classical", line, {line_form(1), line_form(2)},
                                     Permutation({2, 1}), cfg, flip);
  });
  add("shuffle", "control-shuffle", [=] {
    return check_shuffle("control-shuffle", line, {line_form(1), line_form(2)}, {line_form(3)},
                         ObserverPermutations({Permutation({2, 1})}),
                         ObserverPermutations::identity(1, 1), cfg, flip);
  });
  add("composition", "control-composition", [=] {
    return check_composition("control-composition", loop_a, loop_b, {w21}, cfg, flip);
  });
  add("vanishing", "control-vanishing", [=] {
    return check_vanishing("control-vanishing", {loop_a, loop_b}, {w21}, cfg, flip);
  });
  {
    PolynomialMembrane square_map;
    square_map.n = square_map.d = 1;
    square_map.breaks = {{}};
    square_map.cells = {{Poly::monomial(1, {2}, ExactScalar(1))}};
    add("reparametrization", "control-reparametrization", [=] {
      return check_reparametrization("control-reparametrization", line,
                                     make_reparametrization(square_map),
                                     {line_form(1), line_form(2)},
                                     ObserverPermutations::identity(1, 2), cfg, flip);
    });
  }
  {
    const std::vector<Poly> shear{Poly::variable(2, 0),
                                  Poly::variable(2, 1) + Poly::monomial(2, {2, 0}, ExactScalar(1))};
    add("naturality", "control-naturality", [=] {
      return check_naturality("control-naturality", shear, loop_a, {w21, w12},
                              ObserverPermutations::identity(1, 2), cfg, flip);
    });
  }
  {
    EngineConfig complex_cfg = cfg;
    complex_cfg.field = Field::Complex;
    const HomotopyFamily family = control_family();
    const DifferentialForm w = holomorphic_z1_form();
    add("homotopy-invariance", "control-homotopy", [=] {
      return check_homotopy_invariance(
          "control-homotopy", family, {w, w}, ObserverPermutations::identity(2, 2),
          {Rational(0), Rational(1, 2), Rational(1)}, complex_cfg, flip);
    });
  }
  return out;
}

}  // namespace

std::vector<std::string> builtin_suite_names() { return {"identities", "negative-controls"}; }

bool is_builtin_suite(std::string_view name) {
  return name == "identities" || name == "negative-controls" || name == "paper-identities";
}

std::vector<CheckReport> run_builtin_suite(std::string_view name, const EngineConfig& cfg) {
  if (name == "identities" || name == "paper-identities") return identities_suite(cfg);
  if (name == "negative-controls") return negative_controls_suite(cfg);
  throw std::invalid_argument("suite: unknown built-in suite name");
}

}  // namespace memint
