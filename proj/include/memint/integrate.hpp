// The three evaluation engines for iterated integrals over membranes:
// exact rational integration of polynomial data, Gauss-Legendre/Duffy
// quadrature, and a seeded Monte-Carlo oracle.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memint/combinatorics.hpp"
#include "memint/forms.hpp"
#include "memint/membranes.hpp"

namespace memint {

enum class Engine { Exact, Quadrature, MonteCarlo };

std::string engine_name(Engine e);
// Parses "exact" | "quadrature" | "montecarlo"; empty on anything else.
std::optional<Engine> parse_engine(std::string_view name);

struct EngineConfig {
  Engine engine = Engine::Exact;
  int quad_order = 8;        // Gauss-Legendre points per dimension
  int subdivision_depth = 1; // equal parts each smooth-grid cell is split into
  long long mc_samples = 100000;
  std::optional<std::uint64_t> seed;  // mandatory for the Monte-Carlo engine
  Field field = Field::Real;

  void validate() const;  // throws std::invalid_argument naming the field
};

// Canonical text form of a value: the exact scalar when present, otherwise
// the decimal rendered with "%.17g" (complex as "re + im i" / "re - im i").
std::string value_string(const std::complex<double>& value,
                         const std::optional<ExactScalar>& exact);

struct IntegralResult {
  std::complex<double> value{0.0, 0.0};
  std::optional<ExactScalar> exact;  // populated by the exact engine only
  double error_estimate = 0.0;       // 0 exact; |res(q)-res(q-1)| quadrature; SE Monte-Carlo
  long long points_used = 0;         // density evaluations / samples drawn
  std::optional<std::uint64_t> seed; // Monte-Carlo only
  Engine engine = Engine::Exact;

  bool is_exact() const { return exact.has_value(); }
  // "2/3" when exact, decimal otherwise; complex values print "re + im i".
  std::string value_str() const;
};

// Exact integral of an sn-variable polynomial over the chain domain D_rho =
// { 0 < t_nu^{rho_nu(1)} < ... < t_nu^{rho_nu(s)} < 1 for every observer }.
// Variables use the event-major order of variable_index().  No wedge sign is
// applied: this is a plain domain integral.
ExactScalar exact_engine_integrate(const Poly& integrand, const ObserverPermutations& rho);

using DensityFn = std::function<std::complex<double>(std::span<const double>)>;

// Numeric integral of a density over D_rho: per observer, a Gauss-Legendre
// grid is mapped onto each order simplex by the Duffy substitution; the
// tensor product over observers is summed in fixed lexicographic order with
// compensated accumulation.  variable_breaks (optional, one list per sn
// variable) mark interior kinks; each resulting cell is further split into
// cfg.subdivision_depth equal parts.  error_estimate compares orders q and
// q-1.  Rejects s*n > 8.
IntegralResult quadrature_engine_integrate(const DensityFn& density,
                                           const ObserverPermutations& rho,
                                           const EngineConfig& cfg,
                                           const std::vector<std::vector<double>>& variable_breaks = {});

// Seeded Monte-Carlo estimate of the full iterated integral (wedge sign
// included): draws cfg.mc_samples points uniformly on I^{sn} in event-major
// variable order and averages density * indicator(D_rho) * wedge_sign.
// error_estimate is the sample standard error.  The seed is mandatory and
// replaying it is bit-identical.
IntegralResult montecarlo_oracle(const Membrane& g, const std::vector<DifferentialForm>& forms,
                                 const ObserverPermutations& rho, const EngineConfig& cfg);

// The iterated integral of s n-forms along a membrane with observer
// permutations rho, dispatched to the engine in cfg.  s = 0 returns exactly
// 1 on every engine.  The exact engine requires polynomial data throughout.
IntegralResult iterated_integral(const Membrane& g, const std::vector<DifferentialForm>& forms,
                                 const ObserverPermutations& rho, const EngineConfig& cfg);

// The same integral extended linearly over a formal membrane chain.
IntegralResult chain_iterated_integral(const MembraneChain& chain,
                                       const std::vector<DifferentialForm>& forms,
                                       const ObserverPermutations& rho, const EngineConfig& cfg);

}  // namespace memint
