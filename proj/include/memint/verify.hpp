// Machine checks for the identities the engine is supposed to satisfy:
// reparametrization invariance, naturality under polynomial maps, shuffle
// relations, composition of closed membranes, vanishing of augmentation
// products, classical reduction for paths, and homotopy invariance of
// holomorphic integrands along admissible deformations.  Each check computes
// both sides of one identity and reports the deviation against an
// engine-matched tolerance.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memint/forms.hpp"
#include "memint/integrate.hpp"
#include "memint/membranes.hpp"

namespace memint {

enum class Verdict { Pass, Fail, Error };

std::string verdict_name(Verdict v);

struct CheckReport {
  std::string check;        // which identity was tested
  std::string scenario_id;  // stable scenario identifier
  std::string lhs;          // printed left value
  std::string rhs;          // printed right value
  double abs_deviation = 0.0;
  double rel_deviation = 0.0;  // abs / max(1, |lhs|, |rhs|)
  double tolerance = 0.0;      // the tolerance actually used
  Verdict verdict = Verdict::Pass;
  Engine engine_kind = Engine::Exact;  // which engine produced the values
  std::string engine;  // e.g. "exact", "quadrature(q=8)", "montecarlo(seed=42,N=100000)"
  std::string note;    // extra context; error message for error verdicts

  // The deviation the verdict compared against `tolerance`: relative under
  // the quadrature engine, absolute otherwise.
  double compared_deviation() const {
    return engine_kind == Engine::Quadrature ? rel_deviation : abs_deviation;
  }
};

struct CheckOptions {
  // Tolerance override.  When unset the engine decides: exact demands a
  // deviation of exactly zero, quadrature compares the relative deviation
  // against 1e-8, and montecarlo compares the absolute deviation against
  // three combined standard errors.
  std::optional<double> tolerance;
  // Negates one term of the identity so the check must fail: the right-hand
  // side (its last summand where it is a sum), except for the vanishing check
  // (first chain term's coefficient, since the right side may be zero) and
  // the homotopy check (the value at the last deformation sample).
  bool inject_sign_flip = false;
};

// Stable engine descriptor used in reports.
std::string engine_metadata(const EngineConfig& cfg);

// ---- individual checks -----------------------------------------------------

// Integrals agree before and after a certified monotone reparametrization:
// integral over g equals integral over g o phi.
CheckReport check_reparametrization(const std::string& id, const Membrane& g,
                                    const Reparametrization& phi,
                                    const std::vector<DifferentialForm>& forms,
                                    const ObserverPermutations& rho, const EngineConfig& cfg,
                                    const CheckOptions& opt = {});

// Integrating forms over the image membrane F o g equals integrating the
// pulled-back forms F*omega over g.  `map_components` are the polynomial
// components of F, written in g's target coordinates.
CheckReport check_naturality(const std::string& id, const std::vector<Poly>& map_components,
                             const Membrane& g, const std::vector<DifferentialForm>& forms,
                             const ObserverPermutations& rho, const EngineConfig& cfg,
                             const CheckOptions& opt = {});

// Product rule: the product of the two ordered integrals equals the sum of
// the integrals of the concatenated forms over every interleaving order the
// merged events can realize (one per element of merge_orders).  All values
// enter unsigned, i.e. as plain integrals over their ordered domains.
CheckReport check_shuffle(const std::string& id, const Membrane& g,
                          const std::vector<DifferentialForm>& forms_a,
                          const std::vector<DifferentialForm>& forms_b,
                          const ObserverPermutations& rho, const ObserverPermutations& rho_prime,
                          const EngineConfig& cfg, const CheckOptions& opt = {});

// Composition rule for closed membranes with a common base point, identity
// observer orders: integral over g1 g2 of omega_1..omega_s equals
// sum_{j=0..s} (integral over g1 of omega_1..omega_j) * (integral over g2 of
// omega_{j+1}..omega_s).
CheckReport check_composition(const std::string& id, const Membrane& g1, const Membrane& g2,
                              const std::vector<DifferentialForm>& forms, const EngineConfig& cfg,
                              const CheckOptions& opt = {});

// Augmentation products: integrating s forms over the expansion of
// (alpha_1 - 1)...(alpha_r - 1) yields the product of the single integrals
// when s = r and exactly zero when s < r.
CheckReport check_vanishing(const std::string& id, const std::vector<Membrane>& alphas,
                            const std::vector<DifferentialForm>& forms, const EngineConfig& cfg,
                            const CheckOptions& opt = {});

// Paths (n = 1): the integral with observer order rho equals parity(rho)
// times the identity-order integral of the correspondingly reordered forms.
CheckReport check_classical_reduction(const std::string& id, const Membrane& g,
                                      const std::vector<DifferentialForm>& forms,
                                      const Permutation& rho, const EngineConfig& cfg,
                                      const CheckOptions& opt = {});

// ---- homotopy invariance ---------------------------------------------------

// A product-membrane deformation family over C^n: factor nu is a polynomial
// gamma_nu(t, u) in exactly two variables (t first, deformation parameter u
// second) with endpoints gamma_nu(0, u), gamma_nu(1, u) independent of u.
// The member at parameter u is the product membrane
// g_u(t) = (gamma_1(t_1, u), ..., gamma_n(t_n, u)); by construction it maps
// each coordinate fiber {t_nu = c} into the coordinate leaf
// {z_nu = gamma_nu(c, u)}.
struct HomotopyFamily {
  std::vector<Poly> factors;
  Field field = Field::Complex;

  int dimension() const { return static_cast<int>(factors.size()); }
  // Throws std::invalid_argument when a factor is not a two-variable
  // polynomial or an endpoint moves with u.
  void validate() const;
  // Exact substitution of the deformation parameter.
  Membrane membrane_at(const Rational& u) const;
};

// Integrals along the family agree at every sampled deformation parameter:
// the reported deviation is the maximum over sample pairs.
CheckReport check_homotopy_invariance(const std::string& id, const HomotopyFamily& family,
                                      const std::vector<DifferentialForm>& forms,
                                      const ObserverPermutations& rho,
                                      const std::vector<Rational>& u_samples,
                                      const EngineConfig& cfg, const CheckOptions& opt = {});

// ---- suites ------------------------------------------------------------------

// Runs `fn`, converting exceptions (validation failures, engine capability
// mismatches) into an error-verdict report instead of propagating.
CheckReport guarded_check(const std::string& check, const std::string& id,
                          const EngineConfig& cfg, const std::function<CheckReport()>& fn);

// Canonical built-in suite names ("identities", "negative-controls").
std::vector<std::string> builtin_suite_names();
bool is_builtin_suite(std::string_view name);

// Runs a built-in suite under the given engine configuration.  "identities"
// checks every identity on fixed polynomial scenarios; "negative-controls"
// re-runs one scenario per check with an injected sign flip, so every report
// must come back failing.  Throws std::invalid_argument for unknown names.
std::vector<CheckReport> run_builtin_suite(std::string_view name, const EngineConfig& cfg);

}  // namespace memint
