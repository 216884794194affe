// Acceptance gate: one pass/fail line per criterion, exit 0 only when all
// six hold.  Each criterion is self-timed and carries its budget inline.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "memint/cli.hpp"
#include "memint/combinatorics.hpp"
#include "memint/forms.hpp"
#include "memint/integrate.hpp"
#include "memint/membranes.hpp"
#include "memint/polynomial.hpp"
#include "memint/rational.hpp"
#include "memint/scenario.hpp"
#include "memint/verify.hpp"

namespace {

using namespace memint;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<Scenario> corpus_compute_scenarios() {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(SCENARIO_DIR))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) {
    const Json doc = read_json_file(f.string());
    if (doc.contains("suite")) continue;
    Scenario s = parse_scenario(doc);
    if (s.kind == "compute") out.push_back(std::move(s));
  }
  return out;
}

Scenario corpus_scenario(const std::string& name) {
  return parse_scenario(read_json_file(std::string(SCENARIO_DIR) + "/" + name));
}

// All n-tuples of permutations of {1..s}.
std::vector<ObserverPermutations> all_observer_tuples(int n, int s) {
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

unsigned long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  unsigned long long r = 1;
  for (int j = 1; j <= k; ++j) r = r * static_cast<unsigned long long>(n - k + j) / j;
  return r;
}

EngineConfig exact_cfg() { return EngineConfig{}; }

EngineConfig quad_cfg(int order) {
  EngineConfig cfg;
  cfg.engine = Engine::Quadrature;
  cfg.quad_order = order;
  return cfg;
}

EngineConfig mc_cfg(std::uint64_t seed, long long samples) {
  EngineConfig cfg;
  cfg.engine = Engine::MonteCarlo;
  cfg.seed = seed;
  cfg.mc_samples = samples;
  return cfg;
}

// ---- criterion bodies -------------------------------------------------------

// 1. The exhaustive exact-identity suite: every comparison an exact rational
//    equality (deviation literally zero), full coverage counts, under 60 s.
Outcome criterion_identities() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<CheckReport> reports = run_builtin_suite("identities", exact_cfg());
  std::map<std::string, int> counts;
  for (const CheckReport& r : reports) {
    counts[r.check]++;
    o.require(r.verdict == Verdict::Pass, r.scenario_id + ": " + verdict_name(r.verdict) +
                                              (r.note.empty() ? "" : " (" + r.note + ")"));
    o.require(r.abs_deviation == 0.0,
              r.scenario_id + ": deviation " + std::to_string(r.abs_deviation) + " != 0");
    o.require(r.engine_kind == Engine::Exact, r.scenario_id + ": not the exact engine");
  }
  const std::map<std::string, int> expected{
      {"classical-reduction", 33},  // all orders of s events, s = 1..4
      {"shuffle", 20},              // exhaustive order pairs, n <= 2, s+s' <= 3
      {"composition", 5},          {"vanishing", 5},
      {"reparametrization", 5},    {"naturality", 3}};
  for (const auto& [check, want] : expected)
    o.require(counts[check] == want, check + ": " + std::to_string(counts[check]) +
                                         " checks, expected " + std::to_string(want));
  const double dt = seconds_since(t0);
  o.require(dt < 60.0, "runtime " + fmt(dt) + "s exceeds 60s");
  if (o.ok)
    o.detail = std::to_string(reports.size()) + " checks, every deviation exactly zero [" +
               fmt(dt) + "s]";
  return o;
}

// 2. Frozen derived values: the two-form pair on the line (both orders), the
//    2-d volume scenario, and the monomial simplex family for a, b <= 4.
Outcome criterion_spot_values() {
  Outcome o;
  const auto value_of = [&](const std::string& file) {
    return run_compute_scenario(corpus_scenario(file), exact_cfg());
  };
  const auto expect = [&](const std::string& file, const Rational& want) {
    const IntegralResult r = value_of(file);
    o.require(r.exact && *r.exact == ExactScalar(want),
              file + ": got " + r.value_str() + ", want " + rational_to_string(want));
  };
  expect("compute-pair-identity.json", Rational(2, 3));
  expect("compute-pair-swapped.json", Rational(-1, 3));
  expect("compute-volume-2d.json", Rational(1, 4));

  const Membrane line = identity_membrane(1);
  int checked = 0;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b) {
      const std::vector<DifferentialForm> forms{
          monomial_form(1, {1}, Poly::monomial(1, {a}, ExactScalar(1))),
          monomial_form(1, {1}, Poly::monomial(1, {b}, ExactScalar(1)))};
      const IntegralResult r =
          iterated_integral(line, forms, ObserverPermutations::identity(1, 2), exact_cfg());
      const Rational want(1, (a + 1) * (a + b + 2));
      o.require(r.exact && *r.exact == ExactScalar(want),
                "simplex monomial a=" + std::to_string(a) + " b=" + std::to_string(b) + ": got " +
                    r.value_str() + ", want " + rational_to_string(want));
      ++checked;
    }
  if (o.ok)
    o.detail = "pair 2/3 and -1/3, volume 1/4, " + std::to_string(checked) +
               " simplex monomials 1/((a+1)(a+b+2))";
  return o;
}

// 3. Engine agreement on every polynomial corpus scenario: quadrature within
//    1e-10 of exact, seeded Monte-Carlo within three standard errors and
//    bit-identical on replay, under 120 s.
Outcome criterion_cross_engine() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::uint64_t kSeed = 42;
  constexpr long long kSamples = 100000;
  int compared = 0, skipped = 0;
  for (const Scenario& s : corpus_compute_scenarios()) {
    IntegralResult exact;
    try {
      exact = run_compute_scenario(s, exact_cfg());
    } catch (const std::invalid_argument&) {
      ++skipped;  // not piecewise-polynomial data; the exact engine refuses it
      continue;
    }
    const std::complex<double> truth = exact.exact->to_complex();

    const IntegralResult quad = run_compute_scenario(s, quad_cfg(8));
    const double quad_dev = std::abs(quad.value - truth);
    o.require(quad_dev <= 1e-10,
              s.id + ": |quadrature - exact| = " + fmt(quad_dev) + " > 1e-10");

    const IntegralResult mc = run_compute_scenario(s, mc_cfg(kSeed, kSamples));
    const double mc_dev = std::abs(mc.value - truth);
    o.require(mc_dev <= 3.0 * mc.error_estimate,
              s.id + ": |montecarlo - exact| = " + fmt(mc_dev) + " > 3 x " +
                  fmt(mc.error_estimate));
    const IntegralResult replay = run_compute_scenario(s, mc_cfg(kSeed, kSamples));
    o.require(replay.value == mc.value && replay.error_estimate == mc.error_estimate &&
                  replay.points_used == mc.points_used,
              s.id + ": montecarlo replay with the same seed not bit-identical");
    ++compared;
  }
  o.require(compared >= 6, "only " + std::to_string(compared) + " polynomial scenarios compared");
  const double dt = seconds_since(t0);
  o.require(dt < 120.0, "runtime " + fmt(dt) + "s exceeds 120s");
  if (o.ok)
    o.detail = std::to_string(compared) + " polynomial scenarios x 3 engines (" +
               std::to_string(skipped) + " black-box skipped), seed 42 replay bit-identical [" +
               fmt(dt) + "s]";
  return o;
}

// A deformation family whose integrand degree (23 per variable) exceeds what
// either quadrature order integrates exactly, so the deviation measures real
// convergence rather than rounding noise.
const char* kHighDegreeFamily = R"({
  "id": "homotopy-deg23", "kind": "check", "field": "complex",
  "check": "homotopy-invariance",
  "factors": [
    {"vars": 2, "terms": [{"exponents": [1, 0], "coefficient": "1"}]},
    {"vars": 2, "terms": [
      {"exponents": [1, 0], "coefficient": "1"},
      {"exponents": [2, 1], "coefficient": ["0", "1"]},
      {"exponents": [3, 1], "coefficient": ["0", "-2"]},
      {"exponents": [4, 1], "coefficient": ["0", "1"]}]}],
  "u_samples": ["0", "1/2", "1"],
  "forms": [
    {"ambient": 2, "degree": 2, "terms": [{"indices": [1, 2],
      "coefficient": {"vars": 2, "terms": [{"exponents": [0, 5], "coefficient": "1"}]}}]},
    {"ambient": 2, "degree": 2, "terms": [{"indices": [1, 2],
      "coefficient": {"vars": 2, "terms": [{"exponents": [0, 5], "coefficient": "1"}]}}]}],
  "rho": [[1, 2], [1, 2]]
})";

// The non-holomorphic control: the |z_1|^2 coefficient is not holomorphic,
// and the deformation moves the first coordinate, so the integral genuinely
// changes with u.
const char* kNonHolomorphicControl = R"({
  "id": "homotopy-negative", "kind": "check", "field": "complex",
  "check": "homotopy-invariance",
  "factors": [
    {"vars": 2, "terms": [
      {"exponents": [1, 0], "coefficient": "1"},
      {"exponents": [1, 1], "coefficient": ["0", "1"]},
      {"exponents": [2, 1], "coefficient": ["0", "-1"]}]},
    {"vars": 2, "terms": [{"exponents": [1, 0], "coefficient": "1"}]}],
  "u_samples": ["0", "1/2", "1"],
  "forms": [
    {"ambient": 2, "degree": 2, "terms": [{"indices": [1, 2],
      "coefficient": {"builtin": "abs_sq", "coordinate": 1}}]},
    {"ambient": 2, "degree": 2, "terms": [{"indices": [1, 2],
      "coefficient": {"builtin": "abs_sq", "coordinate": 1}}]}],
  "rho": [[1, 2], [1, 2]]
})";

// 4. Deformation invariance of the holomorphic family at u in {0, 1/2, 1}:
//    relative agreement to 1e-8 at q=8, deviation non-increasing from q=4 to
//    q=8 (also on a high-degree family where the error is far from rounding),
//    and the non-holomorphic control deviating by more than 1e-3.  Under 60 s.
Outcome criterion_homotopy() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto deviation_at = [&](const Scenario& s, int order) {
    const CheckReport r = run_check_scenario(s, quad_cfg(order));
    return r;
  };

  const Scenario family = corpus_scenario("check-homotopy-invariance.json");
  const CheckReport f4 = deviation_at(family, 4);
  const CheckReport f8 = deviation_at(family, 8);
  o.require(f8.verdict == Verdict::Pass && f8.rel_deviation <= 1e-8,
            "family at q=8: relative deviation " + fmt(f8.rel_deviation) + " > 1e-8");
  o.require(f8.rel_deviation <= f4.rel_deviation,
            "family deviation grew from q=4 (" + fmt(f4.rel_deviation) + ") to q=8 (" +
                fmt(f8.rel_deviation) + ")");

  const Scenario high = parse_scenario(Json::parse(kHighDegreeFamily));
  const CheckReport h4 = deviation_at(high, 4);
  const CheckReport h8 = deviation_at(high, 8);
  o.require(h8.rel_deviation <= h4.rel_deviation,
            "high-degree family deviation grew from q=4 (" + fmt(h4.rel_deviation) +
                ") to q=8 (" + fmt(h8.rel_deviation) + ")");
  o.require(h4.rel_deviation > 1e-8 && h8.rel_deviation > 0.0,
            "high-degree family no longer exercises quadrature error");

  const Scenario control = parse_scenario(Json::parse(kNonHolomorphicControl));
  const CheckReport c8 = deviation_at(control, 8);
  o.require(c8.verdict == Verdict::Fail && c8.compared_deviation() > 1e-3,
            "non-holomorphic control deviation " + fmt(c8.compared_deviation()) +
                " not above 1e-3");

  const double dt = seconds_since(t0);
  o.require(dt < 60.0, "runtime " + fmt(dt) + "s exceeds 60s");
  if (o.ok)
    o.detail = "family dev " + fmt(f4.rel_deviation) + " -> " + fmt(f8.rel_deviation) +
               ", high-degree " + fmt(h4.rel_deviation) + " -> " + fmt(h8.rel_deviation) +
               ", control dev " + fmt(c8.compared_deviation()) + " [" + fmt(dt) + "s]";
  return o;
}

// 5. The shuffle enumeration agrees with brute-force filtering of all order
//    tuples for s+s' <= 4, n <= 2, with cardinality C(s+s',s)^n.
Outcome criterion_shuffles() {
  Outcome o;
  long long pairs = 0;
  for (int n = 1; n <= 2; ++n)
    for (int s = 0; s <= 4; ++s)
      for (int sp = 0; s + sp <= 4; ++sp) {
        const unsigned long long want_count = [&] {
          unsigned long long c = binomial(s + sp, s), r = 1;
          for (int k = 0; k < n; ++k) r *= c;
          return r;
        }();
        for (const ObserverPermutations& rho : all_observer_tuples(n, s))
          for (const ObserverPermutations& rhop : all_observer_tuples(n, sp)) {
            std::vector<ObserverPermutations> fast = rho_shuffles(rho, rhop);
            std::vector<ObserverPermutations> brute = rho_shuffles_bruteforce(rho, rhop);
            std::sort(fast.begin(), fast.end());
            std::sort(brute.begin(), brute.end());
            const std::string where =
                "n=" + std::to_string(n) + " s=" + std::to_string(s) +
                " s'=" + std::to_string(sp);
            o.require(fast == brute, where + ": enumeration differs from brute force");
            o.require(fast.size() == want_count,
                      where + ": " + std::to_string(fast.size()) + " shuffles, expected " +
                          std::to_string(want_count));
            ++pairs;
          }
      }
  if (o.ok)
    o.detail = std::to_string(pairs) +
               " order-tuple pairs match brute force with cardinality C(s+s',s)^n";
  return o;
}

// 6. Every negative control (one injected sign flip per check) is detected,
//    and the verify command exits with code 1.
Outcome criterion_negative_controls() {
  Outcome o;
  const std::vector<CheckReport> reports = run_builtin_suite("negative-controls", exact_cfg());
  o.require(!reports.empty(), "control suite is empty");
  for (const CheckReport& r : reports)
    o.require(r.verdict == Verdict::Fail,
              r.scenario_id + ": " + verdict_name(r.verdict) + ", expected fail");
  std::ostringstream out, err;
  const int code = cmd_verify("negative-controls", CliOptions{}, out, err);
  o.require(code == kExitCheckFailure,
            "verify exited " + std::to_string(code) + ", expected " +
                std::to_string(kExitCheckFailure));
  if (o.ok)
    o.detail = "all " + std::to_string(reports.size()) +
               " injected sign flips detected, exit code 1";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact-identity suite, all deviations zero", criterion_identities},
      {"derived-value spot checks", criterion_spot_values},
      {"cross-engine agreement on the polynomial corpus", criterion_cross_engine},
      {"holomorphic deformation invariance and control", criterion_homotopy},
      {"shuffle enumeration vs brute force", criterion_shuffles},
      {"negative controls detected", criterion_negative_controls},
  };
  int failures = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.ok) ++failures;
    std::printf("%s criterion %zu: %s%s%s\n", o.ok ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), o.detail.empty() ? "" : " -- ", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
