#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "memint/cli.hpp"

namespace {

void add_shared_flags(CLI::App* cmd, memint::CliOptions& opt) {
  cmd->add_option("--engine", opt.engine, "Evaluation engine")
      ->check(CLI::IsMember({"exact", "quadrature", "montecarlo"}));
  cmd->add_option("--seed", opt.seed, "Monte-Carlo seed (required by that engine)");
  cmd->add_option("--mc-samples", opt.mc_samples, "Monte-Carlo sample count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--quad-order", opt.quad_order, "Gauss-Legendre points per dimension")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", opt.tolerance,
                  "Check tolerance override (suite files; default is engine-matched)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--report", opt.report, "Report format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--out", opt.out, "Also write the rendered report to this file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterated integrals over membranes: evaluate scenarios, verify identities"};
  app.require_subcommand(1);

  memint::CliOptions opt;
  std::string compute_file;
  std::string verify_suite;

  CLI::App* compute = app.add_subcommand("compute", "Evaluate one scenario file");
  compute->add_option("file", compute_file, "Scenario file (JSON)")->required();
  add_shared_flags(compute, opt);

  CLI::App* verify =
      app.add_subcommand("verify", "Run a verification suite and report pass/fail");
  verify->add_option("suite", verify_suite,
                     "Suite file, or a built-in name (identities, negative-controls)")
      ->required();
  add_shared_flags(verify, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? memint::kExitOk : memint::kExitUsage;
  }

  if (compute->parsed()) return memint::cmd_compute(compute_file, opt, std::cout, std::cerr);
  return memint::cmd_verify(verify_suite, opt, std::cout, std::cerr);
}
