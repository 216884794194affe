// The command entry points behind the binary: compute one scenario, or run a
// verification suite (built-in name or suite file), with text/JSON report
// rendering and the exit-code contract 0 all-pass / 1 check failure /
// 2 usage or validation error.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "memint/scenario.hpp"
#include "memint/verify.hpp"

namespace memint {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;

// Command-line overrides.  Unset fields keep the scenario's engine block (or
// the library defaults); set fields win over both.
struct CliOptions {
  std::optional<std::string> engine;  // "exact" | "quadrature" | "montecarlo"
  std::optional<std::uint64_t> seed;
  std::optional<long long> mc_samples;
  std::optional<int> quad_order;
  std::optional<double> tolerance;  // check tolerance override (suite files)
  std::string report = "text";      // "text" | "json"
  std::optional<std::string> out;   // also write the rendered report here
};

// Report renderers.  Both are deterministic functions of the reports; the
// JSON document matches {suite, scenarios: [{id, check, lhs, rhs, deviation,
// tolerance, verdict, engine}]} and serializes byte-identically across
// identical invocations.
std::string render_report_text(const std::string& suite, const std::vector<CheckReport>& reports);
Json render_report_json(const std::string& suite, const std::vector<CheckReport>& reports);

// Evaluates a compute scenario file and prints the value (exact rational and
// decimal when available), error estimate, and engine metadata.
int cmd_compute(const std::string& scenario_path, const CliOptions& opt, std::ostream& out,
                std::ostream& err);

// Runs all checks of a suite and prints the report plus a summary line
// (stderr in JSON mode, so stdout stays machine-readable).  Returns 0 only
// when every check passes.
int cmd_verify(const std::string& suite_name_or_path, const CliOptions& opt, std::ostream& out,
               std::ostream& err);

}  // namespace memint
