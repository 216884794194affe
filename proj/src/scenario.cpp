#include "memint/scenario.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace memint {
namespace {

using std::string;

[[noreturn]] void fail(const string& path, const string& msg) {
  throw std::invalid_argument(path + ": " + msg);
}

string sub(const string& path, const string& key) {
  return path.empty() ? key : path + "." + key;
}

string at(const string& path, size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const Json& j, const string& path) {
  if (!j.is_object()) fail(path.empty() ? "document" : path, "expected an object");
}

const Json& need(const Json& j, const char* key, const string& path) {
  require_object(j, path);
  auto it = j.find(key);
  if (it == j.end()) fail(sub(path, key), "missing");
  return *it;
}

void reject_unknown(const Json& j, const std::vector<string>& allowed, const string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const string& k : allowed) known |= it.key() == k;
    if (!known) fail(sub(path, it.key()), "unknown key");
  }
}

string req_string(const Json& j, const string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<string>();
}

long long req_integer(const Json& j, const string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

int req_int(const Json& j, const string& path, int lo = std::numeric_limits<int>::min()) {
  const long long v = req_integer(j, path);
  if (v < lo) fail(path, "must be >= " + std::to_string(lo));
  if (v > 1000000) fail(path, "implausibly large");
  return static_cast<int>(v);
}

double req_double(const Json& j, const string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

bool req_bool(const Json& j, const string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

const Json& req_array(const Json& j, const string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

Rational req_rational(const Json& j, const string& path) {
  if (j.is_string()) return parse_rational(j.get<string>(), path);
  if (j.is_number_integer()) return parse_rational(std::to_string(j.get<long long>()), path);
  fail(path, "expected a rational like \"p/q\"");
}

ExactScalar req_scalar(const Json& j, const string& path) {
  if (j.is_string() || j.is_number_integer()) return ExactScalar(req_rational(j, path));
  if (j.is_array()) {
    if (j.size() != 2) fail(path, "a complex scalar is exactly [re, im]");
    return ExactScalar(req_rational(j[0], at(path, 0)), req_rational(j[1], at(path, 1)));
  }
  fail(path, "expected \"p/q\", an integer, or [re, im]");
}

Json rational_json(const Rational& r) { return rational_to_string(r); }

Json scalar_json(const ExactScalar& c) {
  if (c.is_real()) return rational_json(c.real());
  return Json::array({rational_json(c.real()), rational_json(c.imag())});
}

std::vector<ExactScalar> parse_scalars(const Json& j, const string& path, size_t min_count) {
  req_array(j, path);
  if (j.size() < min_count)
    fail(path, "needs at least " + std::to_string(min_count) + " entries");
  std::vector<ExactScalar> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) out.push_back(req_scalar(j[i], at(path, i)));
  return out;
}

Json scalars_json(const std::vector<ExactScalar>& v) {
  Json out = Json::array();
  for (const ExactScalar& c : v) out.push_back(scalar_json(c));
  return out;
}

std::vector<Rational> parse_rationals(const Json& j, const string& path, size_t min_count) {
  req_array(j, path);
  if (j.size() < min_count)
    fail(path, "needs at least " + std::to_string(min_count) + " entries");
  std::vector<Rational> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) out.push_back(req_rational(j[i], at(path, i)));
  return out;
}

Json rationals_json(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const Rational& r : v) out.push_back(rational_json(r));
  return out;
}

Poly parse_poly(const Json& j, const string& path) {
  require_object(j, path);
  reject_unknown(j, {"vars", "terms"}, path);
  const int vars = req_int(need(j, "vars", path), sub(path, "vars"), 1);
  const Json& terms = req_array(need(j, "terms", path), sub(path, "terms"));
  Poly p(vars);
  for (size_t i = 0; i < terms.size(); ++i) {
    const string tp = at(sub(path, "terms"), i);
    const Json& t = terms[i];
    require_object(t, tp);
    reject_unknown(t, {"exponents", "coefficient"}, tp);
    const Json& ej = req_array(need(t, "exponents", tp), sub(tp, "exponents"));
    if (static_cast<int>(ej.size()) != vars)
      fail(sub(tp, "exponents"), "expected one exponent per variable");
    Poly::Exps e(vars);
    for (size_t k = 0; k < ej.size(); ++k)
      e[k] = req_int(ej[k], at(sub(tp, "exponents"), k), 0);
    p.add_term(e, req_scalar(need(t, "coefficient", tp), sub(tp, "coefficient")));
  }
  return p;
}

Json poly_json(const Poly& p) {
  Json terms = Json::array();
  for (const auto& [exps, coef] : p.terms()) {
    Json t;
    t["exponents"] = exps;
    t["coefficient"] = scalar_json(coef);
    terms.push_back(std::move(t));
  }
  Json out;
  out["vars"] = p.nvars();
  out["terms"] = std::move(terms);
  return out;
}

std::vector<Poly> parse_polys(const Json& j, const string& path, size_t min_count) {
  req_array(j, path);
  if (j.size() < min_count)
    fail(path, "needs at least " + std::to_string(min_count) + " entries");
  std::vector<Poly> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) out.push_back(parse_poly(j[i], at(path, i)));
  return out;
}

std::vector<Poly> parse_univariate_polys(const Json& j, const string& path, size_t min_count) {
  std::vector<Poly> out = parse_polys(j, path, min_count);
  for (size_t i = 0; i < out.size(); ++i)
    if (out[i].nvars() != 1)
      fail(sub(at(path, i), "vars"), "expected a single-variable polynomial");
  return out;
}

Json polys_json(const std::vector<Poly>& v) {
  Json out = Json::array();
  for (const Poly& p : v) out.push_back(poly_json(p));
  return out;
}

// Shared body of piecewise membranes and reparametrization maps:
// n, d, breaks (one rational list per axis), cells (axis-0-major, d
// polynomials in n variables each).
void parse_grid_fields(const Json& j, const string& path, int& n, int& d,
                       std::vector<std::vector<Rational>>& breaks,
                       std::vector<std::vector<Poly>>& cells) {
  n = req_int(need(j, "n", path), sub(path, "n"), 1);
  d = req_int(need(j, "d", path), sub(path, "d"), 1);
  const string bp = sub(path, "breaks");
  const Json& bj = req_array(need(j, "breaks", path), bp);
  if (static_cast<int>(bj.size()) != n) fail(bp, "expected one breakpoint list per axis");
  breaks.assign(n, {});
  size_t expected_cells = 1;
  for (int axis = 0; axis < n; ++axis) {
    breaks[axis] = parse_rationals(bj[axis], at(bp, axis), 0);
    expected_cells *= breaks[axis].size() + 1;
  }
  const string cp = sub(path, "cells");
  const Json& cj = req_array(need(j, "cells", path), cp);
  if (cj.size() != expected_cells)
    fail(cp, "expected " + std::to_string(expected_cells) + " cells (axis 0 varies slowest)");
  cells.assign(cj.size(), {});
  for (size_t c = 0; c < cj.size(); ++c) {
    const Json& cell = req_array(cj[c], at(cp, c));
    if (static_cast<int>(cell.size()) != d)
      fail(at(cp, c), "expected one polynomial per target component");
    for (int comp = 0; comp < d; ++comp) {
      Poly p = parse_poly(cell[comp], at(at(cp, c), comp));
      if (p.nvars() != n)
        fail(sub(at(at(cp, c), comp), "vars"), "cell polynomials use the membrane's n variables");
      cells[c].push_back(std::move(p));
    }
  }
}

Json grid_breaks_json(const std::vector<std::vector<Rational>>& breaks) {
  Json out = Json::array();
  for (const auto& axis : breaks) out.push_back(rationals_json(axis));
  return out;
}

Json grid_cells_json(const std::vector<std::vector<Poly>>& cells) {
  Json out = Json::array();
  for (const auto& cell : cells) out.push_back(polys_json(cell));
  return out;
}

MembraneSpec parse_membrane(const Json& j, const string& path) {
  require_object(j, path);
  MembraneSpec m;
  m.catalog = req_string(need(j, "catalog", path), sub(path, "catalog"));
  if (m.catalog == "identity") {
    reject_unknown(j, {"catalog", "n"}, path);
    m.n = req_int(need(j, "n", path), sub(path, "n"), 1);
  } else if (m.catalog == "constant") {
    reject_unknown(j, {"catalog", "n", "point"}, path);
    m.n = req_int(need(j, "n", path), sub(path, "n"), 1);
    m.point = parse_scalars(need(j, "point", path), sub(path, "point"), 1);
  } else if (m.catalog == "bump") {
    reject_unknown(j, {"catalog", "n", "x0", "amplitude", "exponents"}, path);
    m.n = req_int(need(j, "n", path), sub(path, "n"), 1);
    m.x0 = parse_scalars(need(j, "x0", path), sub(path, "x0"), 1);
    m.amplitude = parse_scalars(need(j, "amplitude", path), sub(path, "amplitude"), 1);
    if (m.amplitude.size() != m.x0.size())
      fail(sub(path, "amplitude"), "expected one entry per component of x0");
    const string ep = sub(path, "exponents");
    const Json& ej = req_array(need(j, "exponents", path), ep);
    if (ej.size() != m.x0.size()) fail(ep, "expected one exponent row per component");
    for (size_t i = 0; i < ej.size(); ++i) {
      const Json& row = req_array(ej[i], at(ep, i));
      if (static_cast<int>(row.size()) != m.n)
        fail(at(ep, i), "expected one exponent per axis");
      std::vector<int> r(m.n);
      for (int k = 0; k < m.n; ++k) r[k] = req_int(row[k], at(at(ep, i), k), 1);
      m.exponents.push_back(std::move(r));
    }
  } else if (m.catalog == "path") {
    reject_unknown(j, {"catalog", "components"}, path);
    m.components = parse_univariate_polys(need(j, "components", path), sub(path, "components"), 1);
  } else if (m.catalog == "path-product") {
    reject_unknown(j, {"catalog", "factors"}, path);
    m.factors = parse_univariate_polys(need(j, "factors", path), sub(path, "factors"), 1);
  } else if (m.catalog == "torus") {
    reject_unknown(j, {"catalog", "big_radius", "small_radius"}, path);
    m.big_radius = req_double(need(j, "big_radius", path), sub(path, "big_radius"));
    m.small_radius = req_double(need(j, "small_radius", path), sub(path, "small_radius"));
  } else if (m.catalog == "piecewise") {
    reject_unknown(j, {"catalog", "n", "d", "breaks", "cells", "base"}, path);
    parse_grid_fields(j, path, m.n, m.d, m.breaks, m.cells);
    if (j.contains("base")) {
      auto base = parse_scalars(j["base"], sub(path, "base"), 1);
      if (static_cast<int>(base.size()) != m.d)
        fail(sub(path, "base"), "expected one coordinate per target component");
      m.base = std::move(base);
    }
  } else if (m.catalog == "composite") {
    reject_unknown(j, {"catalog", "factors"}, path);
    const string fp = sub(path, "factors");
    const Json& fj = req_array(need(j, "factors", path), fp);
    if (fj.size() < 2) fail(fp, "composition needs at least two factors");
    for (size_t i = 0; i < fj.size(); ++i)
      m.composite.push_back(parse_membrane(fj[i], at(fp, i)));
  } else {
    fail(sub(path, "catalog"), "unknown catalog name '" + m.catalog + "'");
  }
  return m;
}

Json membrane_json(const MembraneSpec& m) {
  Json out;
  out["catalog"] = m.catalog;
  if (m.catalog == "identity") {
    out["n"] = m.n;
  } else if (m.catalog == "constant") {
    out["n"] = m.n;
    out["point"] = scalars_json(m.point);
  } else if (m.catalog == "bump") {
    out["n"] = m.n;
    out["x0"] = scalars_json(m.x0);
    out["amplitude"] = scalars_json(m.amplitude);
    out["exponents"] = m.exponents;
  } else if (m.catalog == "path") {
    out["components"] = polys_json(m.components);
  } else if (m.catalog == "path-product") {
    out["factors"] = polys_json(m.factors);
  } else if (m.catalog == "torus") {
    out["big_radius"] = m.big_radius;
    out["small_radius"] = m.small_radius;
  } else if (m.catalog == "piecewise") {
    out["n"] = m.n;
    out["d"] = m.d;
    out["breaks"] = grid_breaks_json(m.breaks);
    out["cells"] = grid_cells_json(m.cells);
    if (m.base) out["base"] = scalars_json(*m.base);
  } else {  // composite
    Json factors = Json::array();
    for (const MembraneSpec& f : m.composite) factors.push_back(membrane_json(f));
    out["factors"] = std::move(factors);
  }
  return out;
}

PolynomialMembrane parse_reparametrization_map(const Json& j, const string& path) {
  require_object(j, path);
  reject_unknown(j, {"n", "d", "breaks", "cells"}, path);
  PolynomialMembrane map;
  parse_grid_fields(j, path, map.n, map.d, map.breaks, map.cells);
  if (map.d != map.n)
    fail(sub(path, "d"), "a reparametrization maps the cube to itself (d = n)");
  return map;
}

Json grid_map_json(const PolynomialMembrane& m) {
  Json out;
  out["n"] = m.n;
  out["d"] = m.d;
  out["breaks"] = grid_breaks_json(m.breaks);
  out["cells"] = grid_cells_json(m.cells);
  return out;
}

FormSpec parse_form(const Json& j, const string& path) {
  require_object(j, path);
  reject_unknown(j, {"ambient", "degree", "terms"}, path);
  FormSpec f;
  f.ambient = req_int(need(j, "ambient", path), sub(path, "ambient"), 1);
  f.degree = req_int(need(j, "degree", path), sub(path, "degree"), 1);
  if (f.degree > f.ambient) fail(sub(path, "degree"), "degree exceeds the ambient dimension");
  const string tp = sub(path, "terms");
  const Json& terms = req_array(need(j, "terms", path), tp);
  for (size_t i = 0; i < terms.size(); ++i) {
    const string ip = at(tp, i);
    const Json& t = terms[i];
    require_object(t, ip);
    reject_unknown(t, {"indices", "coefficient"}, ip);
    FormTermSpec term;
    const string xp = sub(ip, "indices");
    const Json& xj = req_array(need(t, "indices", ip), xp);
    if (static_cast<int>(xj.size()) != f.degree)
      fail(xp, "expected degree-many indices");
    for (size_t k = 0; k < xj.size(); ++k) {
      const int idx = req_int(xj[k], at(xp, k), 1);
      if (idx > f.ambient) fail(at(xp, k), "exceeds the ambient dimension");
      if (k > 0 && idx <= term.indices.back())
        fail(xp, "indices must be strictly increasing");
      term.indices.push_back(idx);
    }
    const string cp = sub(ip, "coefficient");
    const Json& cj = need(t, "coefficient", ip);
    require_object(cj, cp);
    if (cj.contains("builtin")) {
      reject_unknown(cj, {"builtin", "coordinate"}, cp);
      term.builtin = req_string(cj["builtin"], sub(cp, "builtin"));
      if (term.builtin != "abs_sq")
        fail(sub(cp, "builtin"), "unknown builtin '" + term.builtin + "' (known: abs_sq)");
      term.coordinate = req_int(need(cj, "coordinate", cp), sub(cp, "coordinate"), 1);
      if (term.coordinate > f.ambient)
        fail(sub(cp, "coordinate"), "exceeds the ambient dimension");
    } else {
      term.poly = parse_poly(cj, cp);
      if (term.poly->nvars() != f.ambient)
        fail(sub(cp, "vars"), "coefficient polynomials use one variable per ambient coordinate");
    }
    f.terms.push_back(std::move(term));
  }
  return f;
}

Json form_json(const FormSpec& f) {
  Json terms = Json::array();
  for (const FormTermSpec& t : f.terms) {
    Json tj;
    tj["indices"] = t.indices;
    if (t.poly) {
      tj["coefficient"] = poly_json(*t.poly);
    } else {
      Json c;
      c["builtin"] = t.builtin;
      c["coordinate"] = t.coordinate;
      tj["coefficient"] = std::move(c);
    }
    terms.push_back(std::move(tj));
  }
  Json out;
  out["ambient"] = f.ambient;
  out["degree"] = f.degree;
  out["terms"] = std::move(terms);
  return out;
}

std::vector<FormSpec> parse_form_list(const Json& j, const string& path) {
  req_array(j, path);
  std::vector<FormSpec> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) out.push_back(parse_form(j[i], at(path, i)));
  return out;
}

Json forms_json(const std::vector<FormSpec>& v) {
  Json out = Json::array();
  for (const FormSpec& f : v) out.push_back(form_json(f));
  return out;
}

std::vector<std::vector<int>> parse_orders(const Json& j, const string& what) {
  req_array(j, what);
  if (j.empty()) fail(what, "needs one row per observer");
  std::vector<std::vector<int>> rows;
  for (size_t i = 0; i < j.size(); ++i) {
    const Json& row = req_array(j[i], at(what, i));
    std::vector<int> r;
    r.reserve(row.size());
    for (size_t k = 0; k < row.size(); ++k)
      r.push_back(req_int(row[k], at(at(what, i), k), 1));
    rows.push_back(std::move(r));
  }
  build_observer_orders(rows, what);  // validation only
  return rows;
}

Json orders_json(const std::vector<std::vector<int>>& rows) { return Json(rows); }

EngineSpec parse_engine_spec(const Json& j, const string& path) {
  require_object(j, path);
  reject_unknown(j, {"engine", "quad_order", "subdivision_depth", "mc_samples", "seed"}, path);
  EngineSpec e;
  if (j.contains("engine")) {
    const string name = req_string(j["engine"], sub(path, "engine"));
    if (!parse_engine(name)) fail(sub(path, "engine"), "unknown engine name '" + name + "'");
    e.engine = name;
  }
  if (j.contains("quad_order"))
    e.quad_order = req_int(j["quad_order"], sub(path, "quad_order"));
  if (j.contains("subdivision_depth"))
    e.subdivision_depth = req_int(j["subdivision_depth"], sub(path, "subdivision_depth"));
  if (j.contains("mc_samples"))
    e.mc_samples = req_integer(j["mc_samples"], sub(path, "mc_samples"));
  if (j.contains("seed")) {
    const Json& sj = j["seed"];
    if (!sj.is_number_integer() || (sj.is_number_integer() && !sj.is_number_unsigned() &&
                                    sj.get<long long>() < 0))
      fail(sub(path, "seed"), "expected an unsigned integer");
    e.seed = sj.get<std::uint64_t>();
  }
  return e;
}

Json engine_spec_json(const EngineSpec& e) {
  Json out;
  if (e.engine) out["engine"] = *e.engine;
  if (e.quad_order) out["quad_order"] = *e.quad_order;
  if (e.subdivision_depth) out["subdivision_depth"] = *e.subdivision_depth;
  if (e.mc_samples) out["mc_samples"] = *e.mc_samples;
  if (e.seed) out["seed"] = *e.seed;
  return out;
}

// Payload keys, in canonical document order, for one kind/check combination.
std::vector<string> payload_keys(const string& kind, const string& check) {
  if (kind == "compute") return {"membrane", "forms", "rho"};
  if (check == "reparametrization") return {"membrane", "phi", "forms", "rho"};
  if (check == "naturality") return {"map", "membrane", "forms", "rho"};
  if (check == "shuffle") return {"membrane", "forms_a", "forms_b", "rho", "rho_prime"};
  if (check == "composition") return {"membrane_a", "membrane_b", "forms"};
  if (check == "vanishing") return {"membranes", "forms"};
  if (check == "classical-reduction") return {"membrane", "forms", "rho"};
  return {"factors", "u_samples", "forms", "rho"};  // homotopy-invariance
}

const MembraneSpec& req_membrane_spec(const std::optional<MembraneSpec>& m, const char* key) {
  if (!m) throw std::invalid_argument(string(key) + ": missing");
  return *m;
}

}  // namespace

Scenario parse_scenario(const Json& j) {
  require_object(j, "");
  Scenario s;
  s.id = req_string(need(j, "id", ""), "id");
  if (s.id.empty()) fail("id", "must not be empty");
  s.kind = req_string(need(j, "kind", ""), "kind");
  const string field = req_string(need(j, "field", ""), "field");
  if (field == "real")
    s.field = Field::Real;
  else if (field == "complex")
    s.field = Field::Complex;
  else
    fail("field", "expected \"real\" or \"complex\"");

  std::vector<string> allowed = {"id", "kind", "field", "engine", "tolerance", "inject_sign_flip"};
  if (s.kind == "check") {
    allowed.push_back("check");
    s.check = req_string(need(j, "check", ""), "check");
    static const char* kChecks[] = {"reparametrization", "naturality",        "shuffle",
                                    "composition",       "vanishing",         "classical-reduction",
                                    "homotopy-invariance"};
    bool known = false;
    for (const char* c : kChecks) known |= s.check == c;
    if (!known) fail("check", "unknown check name '" + s.check + "'");
  } else if (s.kind != "compute") {
    fail("kind", "expected \"compute\" or \"check\"");
  }
  const std::vector<string> payload = payload_keys(s.kind, s.check);
  for (const string& k : payload) allowed.push_back(k);
  reject_unknown(j, allowed, "");

  if (j.contains("engine")) s.engine = parse_engine_spec(j["engine"], "engine");
  if (j.contains("tolerance")) {
    const double v = req_double(j["tolerance"], "tolerance");
    if (!(v >= 0.0)) fail("tolerance", "must be >= 0");
    s.tolerance = v;
  }
  if (j.contains("inject_sign_flip"))
    s.inject_sign_flip = req_bool(j["inject_sign_flip"], "inject_sign_flip");

  for (const string& key : payload) {
    const Json& pj = need(j, key.c_str(), "");
    if (key == "membrane") {
      s.membrane = parse_membrane(pj, key);
    } else if (key == "membrane_a") {
      s.membrane_a = parse_membrane(pj, key);
    } else if (key == "membrane_b") {
      s.membrane_b = parse_membrane(pj, key);
    } else if (key == "membranes") {
      req_array(pj, key);
      if (pj.empty()) fail(key, "needs at least one factor");
      for (size_t i = 0; i < pj.size(); ++i)
        s.membranes.push_back(parse_membrane(pj[i], at(key, i)));
    } else if (key == "phi") {
      s.phi = parse_reparametrization_map(pj, key);
    } else if (key == "map") {
      s.map_components = parse_polys(pj, key, 1);
    } else if (key == "factors") {
      s.factors = parse_polys(pj, key, 1);
    } else if (key == "u_samples") {
      s.u_samples = parse_rationals(pj, key, 2);
    } else if (key == "forms") {
      s.forms = parse_form_list(pj, key);
    } else if (key == "forms_a") {
      s.forms_a = parse_form_list(pj, key);
    } else if (key == "forms_b") {
      s.forms_b = parse_form_list(pj, key);
    } else if (key == "rho") {
      s.rho = parse_orders(pj, key);
    } else {  // rho_prime
      s.rho_prime = parse_orders(pj, key);
    }
  }
  if (s.check == "classical-reduction" && s.rho.size() != 1)
    fail("rho", "classical reduction takes a single observer row");
  return s;
}

Json serialize_scenario(const Scenario& s) {
  Json out;
  out["id"] = s.id;
  out["kind"] = s.kind;
  out["field"] = s.field == Field::Real ? "real" : "complex";
  if (s.kind == "check") out["check"] = s.check;
  if (s.engine) out["engine"] = engine_spec_json(*s.engine);
  if (s.tolerance) out["tolerance"] = *s.tolerance;
  if (s.inject_sign_flip) out["inject_sign_flip"] = *s.inject_sign_flip;
  for (const string& key : payload_keys(s.kind, s.check)) {
    if (key == "membrane") {
      out["membrane"] = membrane_json(req_membrane_spec(s.membrane, "membrane"));
    } else if (key == "membrane_a") {
      out["membrane_a"] = membrane_json(req_membrane_spec(s.membrane_a, "membrane_a"));
    } else if (key == "membrane_b") {
      out["membrane_b"] = membrane_json(req_membrane_spec(s.membrane_b, "membrane_b"));
    } else if (key == "membranes") {
      Json arr = Json::array();
      for (const MembraneSpec& m : s.membranes) arr.push_back(membrane_json(m));
      out["membranes"] = std::move(arr);
    } else if (key == "phi") {
      if (!s.phi) throw std::invalid_argument("phi: missing");
      out["phi"] = grid_map_json(*s.phi);
    } else if (key == "map") {
      out["map"] = polys_json(s.map_components);
    } else if (key == "factors") {
      out["factors"] = polys_json(s.factors);
    } else if (key == "u_samples") {
      out["u_samples"] = rationals_json(s.u_samples);
    } else if (key == "forms") {
      out["forms"] = forms_json(s.forms);
    } else if (key == "forms_a") {
      out["forms_a"] = forms_json(s.forms_a);
    } else if (key == "forms_b") {
      out["forms_b"] = forms_json(s.forms_b);
    } else if (key == "rho") {
      out["rho"] = orders_json(s.rho);
    } else {  // rho_prime
      out["rho_prime"] = orders_json(s.rho_prime);
    }
  }
  return out;
}

SuiteSpec parse_suite(const Json& j) {
  require_object(j, "");
  reject_unknown(j, {"suite", "scenarios"}, "");
  SuiteSpec suite;
  suite.name = req_string(need(j, "suite", ""), "suite");
  if (suite.name.empty()) fail("suite", "must not be empty");
  const Json& arr = req_array(need(j, "scenarios", ""), "scenarios");
  if (arr.empty()) fail("scenarios", "needs at least one scenario");
  std::set<string> ids;
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_object()) fail(at("scenarios", i), "expected an object");
    Scenario sc;
    try {
      sc = parse_scenario(arr[i]);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(at("scenarios", i) + "." + e.what());
    }
    if (sc.kind != "check")
      fail(sub(at("scenarios", i), "kind"), "verification suites run check scenarios only");
    if (!ids.insert(sc.id).second)
      fail(sub(at("scenarios", i), "id"), "duplicate scenario id '" + sc.id + "'");
    suite.scenarios.push_back(std::move(sc));
  }
  return suite;
}

Json serialize_suite(const SuiteSpec& s) {
  Json out;
  out["suite"] = s.name;
  Json arr = Json::array();
  for (const Scenario& sc : s.scenarios) arr.push_back(serialize_scenario(sc));
  out["scenarios"] = std::move(arr);
  return out;
}

Json normalize_scenario(const Json& j) { return serialize_scenario(parse_scenario(j)); }

Json read_json_file(const string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  return Json::parse(in);
}

Scenario load_scenario_file(const string& path) { return parse_scenario(read_json_file(path)); }

SuiteSpec load_suite_file(const string& path) { return parse_suite(read_json_file(path)); }

SuiteSpec load_suite_or_scenario_file(const string& path) {
  const Json j = read_json_file(path);
  if (j.is_object() && j.contains("suite")) return parse_suite(j);
  Scenario sc = parse_scenario(j);
  if (sc.kind != "check")
    fail("kind", "verification runs check scenarios only (use the compute command instead)");
  SuiteSpec suite;
  suite.name = sc.id;
  suite.scenarios.push_back(std::move(sc));
  return suite;
}

Membrane build_membrane(const MembraneSpec& m, Field field) {
  if (m.catalog == "identity") {
    if (field == Field::Real) return identity_membrane(m.n);
    std::vector<Poly> axes(m.n, Poly::variable(1, 0));
    return path_product_membrane(std::move(axes), field);
  }
  if (m.catalog == "constant") return constant_membrane(m.n, m.point, field);
  if (m.catalog == "bump") return bump_membrane(m.n, m.x0, m.amplitude, m.exponents, field);
  if (m.catalog == "path") return polynomial_path_membrane(m.components, field);
  if (m.catalog == "path-product") return path_product_membrane(m.factors, field);
  if (m.catalog == "torus") return torus_loop_membrane(m.big_radius, m.small_radius);
  if (m.catalog == "piecewise") {
    PolynomialMembrane rep;
    rep.n = m.n;
    rep.d = m.d;
    rep.field = field;
    rep.breaks = m.breaks;
    rep.cells = m.cells;
    if (m.base) rep.base = *m.base;
    return Membrane::from_polynomial(std::move(rep));
  }
  // composite: left-fold composition of the factors
  Membrane g = build_membrane(m.composite.front(), field);
  for (size_t i = 1; i < m.composite.size(); ++i)
    g = compose(g, build_membrane(m.composite[i], field));
  return g;
}

DifferentialForm build_form(const FormSpec& spec, Field field) {
  DifferentialForm w(spec.ambient, spec.degree, field);
  for (const FormTermSpec& t : spec.terms) {
    if (t.poly) {
      w.add_term(t.indices, CoefficientFunction::from_poly(*t.poly));
    } else {
      const int k = t.coordinate;
      w.add_term(t.indices, CoefficientFunction::from_callback(
                                [k](std::span<const std::complex<double>> z) {
                                  return std::complex<double>(std::norm(z[k - 1]), 0.0);
                                }));
    }
  }
  return w;
}

std::vector<DifferentialForm> build_forms(const std::vector<FormSpec>& specs, Field field) {
  std::vector<DifferentialForm> out;
  out.reserve(specs.size());
  for (const FormSpec& f : specs) out.push_back(build_form(f, field));
  return out;
}

ObserverPermutations build_observer_orders(const std::vector<std::vector<int>>& rows,
                                           const std::string& what) {
  if (rows.empty()) throw std::invalid_argument(what + ": needs one row per observer");
  std::vector<Permutation> perms;
  perms.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::invalid_argument(at(what, i) + ": all observers order the same events");
    try {
      perms.emplace_back(rows[i]);
    } catch (const std::exception&) {
      throw std::invalid_argument(at(what, i) + ": not a permutation of 1.." +
                                  std::to_string(rows[0].size()));
    }
  }
  return ObserverPermutations(std::move(perms));
}

EngineConfig resolve_engine_config(const Scenario& s) {
  EngineConfig cfg;
  cfg.field = s.field;
  if (s.engine) {
    const EngineSpec& e = *s.engine;
    if (e.engine) cfg.engine = *parse_engine(*e.engine);
    if (e.quad_order) cfg.quad_order = *e.quad_order;
    if (e.subdivision_depth) cfg.subdivision_depth = *e.subdivision_depth;
    if (e.mc_samples) cfg.mc_samples = *e.mc_samples;
    if (e.seed) cfg.seed = *e.seed;
  }
  return cfg;
}

IntegralResult run_compute_scenario(const Scenario& s, const EngineConfig& cfg) {
  if (s.kind != "compute") throw std::invalid_argument("kind: expected a compute scenario");
  const Membrane g = build_membrane(req_membrane_spec(s.membrane, "membrane"), s.field);
  const std::vector<DifferentialForm> forms = build_forms(s.forms, s.field);
  const ObserverPermutations rho = build_observer_orders(s.rho, "rho");
  return iterated_integral(g, forms, rho, cfg);
}

CheckReport run_check_scenario(const Scenario& s, const EngineConfig& cfg,
                               std::optional<double> tolerance_override) {
  if (s.kind != "check") throw std::invalid_argument("kind: expected a check scenario");
  CheckOptions opt;
  opt.tolerance = tolerance_override ? tolerance_override : s.tolerance;
  opt.inject_sign_flip = s.inject_sign_flip.value_or(false);

  if (s.check == "reparametrization") {
    const Membrane g = build_membrane(req_membrane_spec(s.membrane, "membrane"), s.field);
    if (!s.phi) throw std::invalid_argument("phi: missing");
    return check_reparametrization(s.id, g, make_reparametrization(*s.phi),
                                   build_forms(s.forms, s.field),
                                   build_observer_orders(s.rho, "rho"), cfg, opt);
  }
  if (s.check == "naturality") {
    const Membrane g = build_membrane(req_membrane_spec(s.membrane, "membrane"), s.field);
    return check_naturality(s.id, s.map_components, g, build_forms(s.forms, s.field),
                            build_observer_orders(s.rho, "rho"), cfg, opt);
  }
  if (s.check == "shuffle") {
    const Membrane g = build_membrane(req_membrane_spec(s.membrane, "membrane"), s.field);
    return check_shuffle(s.id, g, build_forms(s.forms_a, s.field),
                         build_forms(s.forms_b, s.field), build_observer_orders(s.rho, "rho"),
                         build_observer_orders(s.rho_prime, "rho_prime"), cfg, opt);
  }
  if (s.check == "composition") {
    return check_composition(s.id,
                             build_membrane(req_membrane_spec(s.membrane_a, "membrane_a"), s.field),
                             build_membrane(req_membrane_spec(s.membrane_b, "membrane_b"), s.field),
                             build_forms(s.forms, s.field), cfg, opt);
  }
  if (s.check == "vanishing") {
    std::vector<Membrane> alphas;
    alphas.reserve(s.membranes.size());
    for (const MembraneSpec& m : s.membranes) alphas.push_back(build_membrane(m, s.field));
    return check_vanishing(s.id, alphas, build_forms(s.forms, s.field), cfg, opt);
  }
  if (s.check == "classical-reduction") {
    const Membrane g = build_membrane(req_membrane_spec(s.membrane, "membrane"), s.field);
    if (s.rho.size() != 1)
      throw std::invalid_argument("rho: classical reduction takes a single observer row");
    return check_classical_reduction(s.id, g, build_forms(s.forms, s.field),
                                     Permutation(s.rho[0]), cfg, opt);
  }
  if (s.check == "homotopy-invariance") {
    HomotopyFamily family;
    family.factors = s.factors;
    family.field = s.field;
    return check_homotopy_invariance(s.id, family, build_forms(s.forms, s.field),
                                     build_observer_orders(s.rho, "rho"), s.u_samples, cfg, opt);
  }
  throw std::invalid_argument("check: unknown check name '" + s.check + "'");
}

}  // namespace memint
