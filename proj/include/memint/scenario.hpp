// Scenario documents: the JSON format the command-line front end reads, the
// typed model it parses into, and the runners that execute a scenario under
// an engine configuration.  Parsing is strict (unknown keys are rejected,
// errors name the offending field, e.g. "rho[0]") and lossless: serializing
// a parsed scenario reproduces the canonical document.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "memint/integrate.hpp"
#include "memint/membranes.hpp"
#include "memint/verify.hpp"

namespace memint {

using Json = nlohmann::ordered_json;

// ---- document pieces -------------------------------------------------------
//
// Scalars are written losslessly: a rational as the string "p/q" (or "p"),
// a complex value as [re, im] with rational entries.  Integers are accepted
// on input; the canonical form is always the string.
//
// A polynomial is {"vars": k, "terms": [{"exponents": [e_1..e_k],
// "coefficient": scalar}, ...]} with terms in ascending lexicographic
// exponent order (the order the serializer emits).

// One membrane from the catalog.  `catalog` selects the shape and decides
// which of the remaining fields are meaningful (and allowed in the JSON):
//   identity      n
//   constant      n, point
//   bump          n, x0, amplitude, exponents
//   path          components (single-variable polynomials, n = 1)
//   path-product  factors (single-variable polynomials, one per axis)
//   torus         big_radius, small_radius (doubles; non-polynomial)
//   piecewise     n, d, breaks, cells, optional base
//   composite     factors (two or more membrane specs, composed left to right)
struct MembraneSpec {
  std::string catalog;
  int n = 0;
  int d = 0;
  std::vector<ExactScalar> point;
  std::vector<ExactScalar> x0;
  std::vector<ExactScalar> amplitude;
  std::vector<std::vector<int>> exponents;
  std::vector<Poly> components;
  std::vector<Poly> factors;
  double big_radius = 0.0;
  double small_radius = 0.0;
  std::vector<std::vector<Rational>> breaks;
  std::vector<std::vector<Poly>> cells;
  std::optional<std::vector<ExactScalar>> base;
  std::vector<MembraneSpec> composite;
};

// One term of a differential form: either a polynomial coefficient
// {"indices": [...], "coefficient": {"vars":..., "terms":...}} or a named
// black-box coefficient {"indices": [...], "coefficient": {"builtin":
// "abs_sq", "coordinate": k}} (the squared modulus of ambient coordinate k).
struct FormTermSpec {
  std::vector<int> indices;  // strictly increasing, 1-based
  std::optional<Poly> poly;
  std::string builtin;  // set when poly is absent
  int coordinate = 0;   // 1-based builtin argument
};

struct FormSpec {
  int ambient = 0;
  int degree = 0;
  std::vector<FormTermSpec> terms;
};

// Optional per-scenario engine defaults; command-line flags override them.
struct EngineSpec {
  std::optional<std::string> engine;
  std::optional<int> quad_order;
  std::optional<int> subdivision_depth;
  std::optional<long long> mc_samples;
  std::optional<std::uint64_t> seed;
};

// A parsed scenario document.  `kind` is "compute" (evaluate one iterated
// integral) or "check" (test one identity); `check` then names the identity:
// reparametrization, naturality, shuffle, composition, vanishing,
// classical-reduction, or homotopy-invariance.  Which payload fields are
// required (and allowed) follows from kind and check.
struct Scenario {
  std::string id;
  std::string kind;
  Field field = Field::Real;
  std::string check;
  std::optional<EngineSpec> engine;
  std::optional<double> tolerance;
  std::optional<bool> inject_sign_flip;

  std::optional<MembraneSpec> membrane;    // compute and single-membrane checks
  std::optional<MembraneSpec> membrane_a;  // composition
  std::optional<MembraneSpec> membrane_b;
  std::vector<MembraneSpec> membranes;  // vanishing factors
  // Reparametrization map of I^n: same JSON shape as a piecewise membrane
  // body ({"n":, "d":, "breaks":, "cells":}) with d = n.
  std::optional<PolynomialMembrane> phi;
  std::vector<Poly> map_components;  // naturality (written in the target coordinates)
  std::vector<Poly> factors;         // homotopy factors, two variables (t, u)
  std::vector<Rational> u_samples;   // homotopy sample parameters
  std::vector<FormSpec> forms;
  std::vector<FormSpec> forms_a;  // shuffle
  std::vector<FormSpec> forms_b;
  std::vector<std::vector<int>> rho;  // one row per observer, each a permutation of 1..s
  std::vector<std::vector<int>> rho_prime;
};

// A verification suite document: {"suite": name, "scenarios": [check
// scenarios...]} with unique ids.
struct SuiteSpec {
  std::string name;
  std::vector<Scenario> scenarios;
};

// ---- parse / serialize -----------------------------------------------------

// Throw std::invalid_argument naming the offending field on any structural
// or semantic problem.
Scenario parse_scenario(const Json& j);
SuiteSpec parse_suite(const Json& j);

// Canonical document for a scenario; parse followed by serialize reproduces
// a canonical file byte-for-byte (after identical JSON formatting).
Json serialize_scenario(const Scenario& s);
Json serialize_suite(const SuiteSpec& s);

// serialize_scenario(parse_scenario(j)) — the round-trip normal form.
Json normalize_scenario(const Json& j);

// Reads a JSON document (std::runtime_error when unreadable, parse errors
// propagate from the JSON library).
Json read_json_file(const std::string& path);

// Read and parse a file (std::runtime_error when unreadable; JSON and
// validation errors propagate).
Scenario load_scenario_file(const std::string& path);
SuiteSpec load_suite_file(const std::string& path);

// Accepts either document shape: a {"suite": ...} file, or a single check
// scenario, which is wrapped as a one-scenario suite named by its id.
SuiteSpec load_suite_or_scenario_file(const std::string& path);

// ---- building and running ---------------------------------------------------

Membrane build_membrane(const MembraneSpec& spec, Field field);
DifferentialForm build_form(const FormSpec& spec, Field field);
std::vector<DifferentialForm> build_forms(const std::vector<FormSpec>& specs, Field field);
// `what` prefixes error messages ("rho" or "rho_prime").
ObserverPermutations build_observer_orders(const std::vector<std::vector<int>>& rows,
                                           const std::string& what);

// Engine configuration for a scenario: library defaults overlaid with the
// scenario's engine block; the field tag always comes from the scenario.
EngineConfig resolve_engine_config(const Scenario& s);

// Evaluate a "compute" scenario.
IntegralResult run_compute_scenario(const Scenario& s, const EngineConfig& cfg);

// Run a "check" scenario.  The tolerance override (command-line flag) wins
// over the scenario's own tolerance.  Throws on engine capability
// mismatches; wrap in guarded_check to turn those into error verdicts.
CheckReport run_check_scenario(const Scenario& s, const EngineConfig& cfg,
                               std::optional<double> tolerance_override = {});

}  // namespace memint
