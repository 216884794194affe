#include "memint/cli.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "memint/integrate.hpp"

namespace memint {
namespace {

std::string short_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string padded(const std::string& s, size_t width) {
  std::string out = s;
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

void apply_cli_overrides(EngineConfig& cfg, const CliOptions& opt) {
  if (opt.engine) {
    const auto e = parse_engine(*opt.engine);
    if (!e) throw std::invalid_argument("engine: unknown engine name '" + *opt.engine + "'");
    cfg.engine = *e;
  }
  if (opt.quad_order) cfg.quad_order = *opt.quad_order;
  if (opt.mc_samples) cfg.mc_samples = *opt.mc_samples;
  if (opt.seed) cfg.seed = *opt.seed;
}

void write_out_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot write file");
  f << content;
  if (!f.good()) throw std::runtime_error(path + ": cannot write file");
}

std::string summary_line(const std::vector<CheckReport>& reports) {
  int passed = 0, failed = 0, errors = 0;
  for (const CheckReport& r : reports) {
    if (r.verdict == Verdict::Pass)
      ++passed;
    else if (r.verdict == Verdict::Fail)
      ++failed;
    else
      ++errors;
  }
  std::ostringstream os;
  os << "summary: " << reports.size() << " checks, " << passed << " passed, " << failed
     << " failed, " << errors << " errors";
  return os.str();
}

}  // namespace

std::string render_report_text(const std::string& suite, const std::vector<CheckReport>& reports) {
  size_t id_width = 2, check_width = 5;
  for (const CheckReport& r : reports) {
    id_width = std::max(id_width, r.scenario_id.size());
    check_width = std::max(check_width, r.check.size());
  }
  std::ostringstream os;
  os << "suite: " << suite << "\n";
  for (const CheckReport& r : reports) {
    const char* tag = r.verdict == Verdict::Pass   ? "PASS "
                      : r.verdict == Verdict::Fail ? "FAIL "
                                                   : "ERROR";
    os << tag << ' ' << padded(r.scenario_id, id_width) << ' ' << padded(r.check, check_width)
       << " deviation " << padded(short_double(r.compared_deviation()), 12) << " tolerance "
       << padded(short_double(r.tolerance), 12) << " engine " << r.engine << "\n";
    if (r.verdict != Verdict::Pass) {
      os << "      lhs " << r.lhs << "  rhs " << r.rhs;
      if (!r.note.empty()) os << "  (" << r.note << ")";
      os << "\n";
    }
  }
  os << summary_line(reports) << "\n";
  return os.str();
}

Json render_report_json(const std::string& suite, const std::vector<CheckReport>& reports) {
  Json out;
  out["suite"] = suite;
  Json arr = Json::array();
  for (const CheckReport& r : reports) {
    Json e;
    e["id"] = r.scenario_id;
    e["check"] = r.check;
    e["lhs"] = r.lhs;
    e["rhs"] = r.rhs;
    e["deviation"] = r.compared_deviation();
    e["tolerance"] = r.tolerance;
    e["verdict"] = verdict_name(r.verdict);
    e["engine"] = r.engine;
    arr.push_back(std::move(e));
  }
  out["scenarios"] = std::move(arr);
  return out;
}

int cmd_compute(const std::string& scenario_path, const CliOptions& opt, std::ostream& out,
                std::ostream& err) {
  try {
    const Scenario s = load_scenario_file(scenario_path);
    if (s.kind != "compute") {
      err << "error: kind: expected a compute scenario\n";
      return kExitUsage;
    }
    EngineConfig cfg = resolve_engine_config(s);
    apply_cli_overrides(cfg, opt);
    cfg.validate();
    const IntegralResult r = run_compute_scenario(s, cfg);

    std::string value = r.value_str();
    if (r.is_exact()) value += " (" + value_string(r.value, std::nullopt) + ")";

    std::string rendered;
    if (opt.report == "json") {
      Json doc;
      doc["scenario"] = s.id;
      doc["engine"] = engine_metadata(cfg);
      doc["value"] = r.value_str();
      doc["decimal"] = Json::array({r.value.real(), r.value.imag()});
      doc["error_estimate"] = r.error_estimate;
      doc["evaluations"] = r.points_used;
      if (r.seed) doc["seed"] = *r.seed;
      rendered = doc.dump(2) + "\n";
    } else {
      std::ostringstream os;
      os << "scenario: " << s.id << "\n"
         << "engine: " << engine_metadata(cfg) << "\n"
         << "value: " << value << "\n"
         << "error estimate: " << value_string({r.error_estimate, 0.0}, std::nullopt) << "\n"
         << "evaluations: " << r.points_used << "\n";
      if (r.seed) os << "seed: " << *r.seed << "\n";
      rendered = os.str();
    }
    out << rendered;
    if (opt.out) write_out_file(*opt.out, rendered);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_verify(const std::string& suite_name_or_path, const CliOptions& opt, std::ostream& out,
               std::ostream& err) {
  std::vector<CheckReport> reports;
  std::string suite_name;
  try {
    if (is_builtin_suite(suite_name_or_path)) {
      EngineConfig cfg;
      apply_cli_overrides(cfg, opt);
      cfg.validate();
      suite_name = suite_name_or_path;
      reports = run_builtin_suite(suite_name_or_path, cfg);
    } else {
      const SuiteSpec suite = load_suite_or_scenario_file(suite_name_or_path);
      suite_name = suite.name;
      reports.reserve(suite.scenarios.size());
      for (const Scenario& sc : suite.scenarios) {
        EngineConfig cfg = resolve_engine_config(sc);
        apply_cli_overrides(cfg, opt);
        reports.push_back(guarded_check(sc.check, sc.id, cfg, [&] {
          cfg.validate();
          return run_check_scenario(sc, cfg, opt.tolerance);
        }));
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    std::string rendered;
    if (opt.report == "json") {
      rendered = render_report_json(suite_name, reports).dump(2) + "\n";
      err << summary_line(reports) << "\n";
    } else {
      rendered = render_report_text(suite_name, reports);
    }
    out << rendered;
    if (opt.out) write_out_file(*opt.out, rendered);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  for (const CheckReport& r : reports)
    if (r.verdict != Verdict::Pass) return kExitCheckFailure;
  return kExitOk;
}

}  // namespace memint
