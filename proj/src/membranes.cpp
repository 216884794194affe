#include "memint/membranes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace memint {

std::string field_name(Field f) { return f == Field::Real ? "real" : "complex"; }

// ---- PolynomialMembrane ----------------------------------------------------

int PolynomialMembrane::cell_count() const {
  int c = 1;
  for (int axis = 0; axis < n; ++axis) c *= cells_per_axis(axis);
  return c;
}

int PolynomialMembrane::flat_index(std::span<const int> cell) const {
  int idx = 0;
  for (int axis = 0; axis < n; ++axis) idx = idx * cells_per_axis(axis) + cell[axis];
  return idx;
}

std::pair<Rational, Rational> PolynomialMembrane::cell_bounds(int axis, int idx) const {
  const auto& br = breaks[axis];
  Rational lo = idx == 0 ? Rational(0) : br[idx - 1];
  Rational hi = idx == static_cast<int>(br.size()) ? Rational(1) : br[idx];
  return {lo, hi};
}

std::vector<int> PolynomialMembrane::locate(std::span<const double> t) const {
  std::vector<int> cell(n);
  for (int axis = 0; axis < n; ++axis) {
    int idx = 0;
    for (const Rational& b : breaks[axis]) {
      if (t[axis] >= to_double(b)) ++idx;
      else break;
    }
    cell[axis] = idx;
  }
  return cell;
}

void PolynomialMembrane::validate() const {
  if (n < 1 || d < 1) throw std::invalid_argument("membrane: needs n >= 1 and d >= 1");
  if (static_cast<int>(breaks.size()) != n)
    throw std::invalid_argument("membrane: one breakpoint list per axis required");
  for (const auto& br : breaks) {
    for (size_t i = 0; i < br.size(); ++i) {
      if (!(br[i] > 0 && br[i] < 1))
        throw std::invalid_argument("membrane: interior breakpoints must lie in (0,1)");
      if (i && !(br[i - 1] < br[i]))
        throw std::invalid_argument("membrane: breakpoints must be strictly increasing");
    }
  }
  if (static_cast<int>(cells.size()) != cell_count())
    throw std::invalid_argument("membrane: cell count does not match the grid");
  for (const auto& comps : cells) {
    if (static_cast<int>(comps.size()) != d)
      throw std::invalid_argument("membrane: every cell needs d component polynomials");
    for (const Poly& p : comps)
      if (p.nvars() != n)
        throw std::invalid_argument("membrane: component polynomials must use n variables");
  }
  if (!base.empty() && static_cast<int>(base.size()) != d)
    throw std::invalid_argument("membrane: base point must have d coordinates");
}

void PolynomialMembrane::validate_continuity() const {
  // Across the face t_axis = b between neighboring cells, the restrictions
  // must agree as polynomials in the remaining variables.
  std::vector<int> cell(n, 0);
  while (true) {
    for (int axis = 0; axis < n; ++axis) {
      if (cell[axis] + 1 >= cells_per_axis(axis)) continue;
      std::vector<int> upper = cell;
      upper[axis] = cell[axis] + 1;
      const Rational b = breaks[axis][cell[axis]];
      const auto& lo = cells[flat_index(cell)];
      const auto& hi = cells[flat_index(upper)];
      for (int i = 0; i < d; ++i) {
        if (lo[i].substitute(axis, ExactScalar(b)) != hi[i].substitute(axis, ExactScalar(b)))
          throw std::invalid_argument("membrane: discontinuous across an interior grid face");
      }
    }
    int axis = n - 1;
    while (axis >= 0 && ++cell[axis] == cells_per_axis(axis)) cell[axis--] = 0;
    if (axis < 0) break;
  }
}

// ---- Membrane --------------------------------------------------------------

Membrane Membrane::from_polynomial(PolynomialMembrane rep) {
  rep.validate();
  rep.validate_continuity();
  Membrane m;
  m.n_ = rep.n;
  m.d_ = rep.d;
  m.field_ = rep.field;
  m.exact_base_ = rep.base;
  m.grid_.resize(rep.n);
  for (int axis = 0; axis < rep.n; ++axis)
    for (const Rational& b : rep.breaks[axis]) m.grid_[axis].push_back(to_double(b));
  m.compiled_cells_.reserve(rep.cells.size());
  m.compiled_jac_.reserve(rep.cells.size());
  for (const auto& comps : rep.cells) {
    std::vector<CompiledPoly> cc, cj;
    cc.reserve(comps.size());
    cj.reserve(comps.size() * rep.n);
    for (const Poly& p : comps) cc.push_back(compile(p));
    for (const Poly& p : comps)
      for (int nu = 0; nu < rep.n; ++nu) cj.push_back(compile(p.derivative(nu)));
    m.compiled_cells_.push_back(std::move(cc));
    m.compiled_jac_.push_back(std::move(cj));
  }
  for (const ExactScalar& c : rep.base) m.numeric_base_.push_back(c.to_complex());
  m.rep_ = std::make_shared<const PolynomialMembrane>(std::move(rep));
  return m;
}

Membrane Membrane::from_callbacks(int n, int d, Field field, EvalFn eval, JacobianFn jac,
                                  std::vector<std::vector<double>> smooth_grid,
                                  std::vector<std::complex<double>> base) {
  if (n < 1 || d < 1) throw std::invalid_argument("membrane: needs n >= 1 and d >= 1");
  if (static_cast<int>(smooth_grid.size()) != n)
    throw std::invalid_argument("membrane: one breakpoint list per axis required");
  Membrane m;
  m.n_ = n;
  m.d_ = d;
  m.field_ = field;
  m.eval_ = std::move(eval);
  m.jac_ = std::move(jac);
  m.grid_ = std::move(smooth_grid);
  m.numeric_base_ = std::move(base);
  return m;
}

const PolynomialMembrane& Membrane::rep() const {
  if (!rep_) throw std::logic_error("membrane: no polynomial representation");
  return *rep_;
}

void Membrane::eval(std::span<const double> t, std::span<std::complex<double>> out) const {
  if (rep_) {
    const std::vector<int> cell = rep_->locate(t);
    const auto& comps = compiled_cells_[rep_->flat_index(cell)];
    for (int i = 0; i < d_; ++i) out[i] = comps[i].eval(t);
    return;
  }
  eval_(t, out);
}

void Membrane::jacobian(std::span<const double> t, std::span<std::complex<double>> out) const {
  if (rep_) {
    const std::vector<int> cell = rep_->locate(t);
    const auto& jac = compiled_jac_[rep_->flat_index(cell)];
    for (int i = 0; i < d_ * n_; ++i) out[i] = jac[i].eval(t);
    return;
  }
  jac_(t, out);
}

bool Membrane::has_base() const { return !exact_base_.empty() || !numeric_base_.empty(); }

std::vector<std::complex<double>> Membrane::base_numeric() const {
  if (!numeric_base_.empty()) return numeric_base_;
  std::vector<std::complex<double>> out;
  out.reserve(exact_base_.size());
  for (const ExactScalar& c : exact_base_) out.push_back(c.to_complex());
  return out;
}

// ---- catalog ----------------------------------------------------------------

Membrane constant_membrane(int n, std::vector<ExactScalar> x0, Field field) {
  PolynomialMembrane rep;
  rep.n = n;
  rep.d = static_cast<int>(x0.size());
  rep.field = field;
  rep.breaks.assign(n, {});
  std::vector<Poly> comps;
  comps.reserve(x0.size());
  for (const ExactScalar& c : x0) comps.push_back(Poly::constant(n, c));
  rep.cells.push_back(std::move(comps));
  rep.base = std::move(x0);
  return Membrane::from_polynomial(std::move(rep));
}

Membrane identity_membrane(int n) {
  PolynomialMembrane rep;
  rep.n = n;
  rep.d = n;
  rep.breaks.assign(n, {});
  std::vector<Poly> comps;
  for (int i = 0; i < n; ++i) comps.push_back(Poly::variable(n, i));
  rep.cells.push_back(std::move(comps));
  return Membrane::from_polynomial(std::move(rep));
}

Membrane bump_membrane(int n, std::vector<ExactScalar> x0, std::vector<ExactScalar> amplitude,
                       std::vector<std::vector<int>> exponents, Field field) {
  const int d = static_cast<int>(x0.size());
  if (static_cast<int>(amplitude.size()) != d || static_cast<int>(exponents.size()) != d)
    throw std::invalid_argument("bump membrane: x0, amplitude, exponents must share length d");
  PolynomialMembrane rep;
  rep.n = n;
  rep.d = d;
  rep.field = field;
  rep.breaks.assign(n, {});
  std::vector<Poly> comps;
  comps.reserve(d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(exponents[i].size()) != n)
      throw std::invalid_argument("bump membrane: exponent rows must have n entries");
    Poly prod = Poly::constant(n, amplitude[i]);
    for (int nu = 0; nu < n; ++nu) {
      const int e = exponents[i][nu];
      if (e < 1) throw std::invalid_argument("bump membrane: exponents must be >= 1");
      Poly x = Poly::variable(n, nu);
      Poly factor = x - x * x;  // t(1-t)
      Poly pw = Poly::constant(n, ExactScalar(1));
      for (int k = 0; k < e; ++k) pw = pw * factor;
      prod = prod * pw;
    }
    comps.push_back(Poly::constant(n, x0[i]) + prod);
  }
  rep.cells.push_back(std::move(comps));
  rep.base = std::move(x0);
  return Membrane::from_polynomial(std::move(rep));
}

Membrane path_product_membrane(std::vector<Poly> factors, Field field) {
  const int n = static_cast<int>(factors.size());
  PolynomialMembrane rep;
  rep.n = n;
  rep.d = n;
  rep.field = field;
  rep.breaks.assign(n, {});
  std::vector<Poly> comps;
  comps.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (factors[i].nvars() != 1)
      throw std::invalid_argument("path product: factors must be single-variable polynomials");
    comps.push_back(factors[i].remap(n, {i}));
  }
  rep.cells.push_back(std::move(comps));
  return Membrane::from_polynomial(std::move(rep));
}

Membrane polynomial_path_membrane(std::vector<Poly> components, Field field) {
  const int d = static_cast<int>(components.size());
  PolynomialMembrane rep;
  rep.n = 1;
  rep.d = d;
  rep.field = field;
  rep.breaks.assign(1, {});
  std::vector<ExactScalar> at0, at1;
  for (const Poly& p : components) {
    if (p.nvars() != 1)
      throw std::invalid_argument("path membrane: components must be single-variable polynomials");
    at0.push_back(p.substitute(0, ExactScalar(0)).constant_value());
    at1.push_back(p.substitute(0, ExactScalar(1)).constant_value());
  }
  if (at0 == at1) rep.base = at0;  // a loop: both endpoints are the base point
  rep.cells.push_back(std::move(components));
  return Membrane::from_polynomial(std::move(rep));
}

Membrane torus_loop_membrane(double big_radius, double small_radius) {
  const double R = big_radius, r = small_radius;
  const double tau = 2.0 * std::numbers::pi;
  auto eval = [R, r, tau](std::span<const double> t, std::span<std::complex<double>> out) {
    const double a = tau * t[0], b = tau * t[1];
    out[0] = (R + r * std::cos(b)) * std::cos(a);
    out[1] = (R + r * std::cos(b)) * std::sin(a);
    out[2] = r * std::sin(b);
  };
  auto jac = [R, r, tau](std::span<const double> t, std::span<std::complex<double>> out) {
    const double a = tau * t[0], b = tau * t[1];
    out[0] = -tau * (R + r * std::cos(b)) * std::sin(a);  // d out0 / d t0
    out[1] = -tau * r * std::sin(b) * std::cos(a);        // d out0 / d t1
    out[2] = tau * (R + r * std::cos(b)) * std::cos(a);
    out[3] = -tau * r * std::sin(b) * std::sin(a);
    out[4] = 0.0;
    out[5] = tau * r * std::cos(b);
  };
  return Membrane::from_callbacks(2, 3, Field::Real, eval, jac, {{}, {}}, {});
}

Membrane apply_polynomial_map(const std::vector<Poly>& map_components, const Membrane& g) {
  const int d_out = static_cast<int>(map_components.size());
  if (d_out < 1) throw std::invalid_argument("map: needs at least one component");
  for (const Poly& p : map_components)
    if (p.nvars() != g.d())
      throw std::invalid_argument("map: components must use the membrane's target coordinates");

  if (g.polynomial()) {
    const PolynomialMembrane& grep = g.rep();
    PolynomialMembrane out;
    out.n = g.n();
    out.d = d_out;
    out.field = g.field();
    out.breaks = grep.breaks;
    out.cells.reserve(grep.cells.size());
    for (const auto& comps : grep.cells) {
      std::vector<Poly> mapped;
      mapped.reserve(d_out);
      for (const Poly& f : map_components) mapped.push_back(f.compose(comps));
      out.cells.push_back(std::move(mapped));
    }
    if (!grep.base.empty()) {
      out.base.reserve(d_out);
      for (const Poly& f : map_components)
        out.base.push_back(f.eval(std::span<const ExactScalar>(grep.base)));
    }
    return Membrane::from_polynomial(std::move(out));
  }

  const int n = g.n(), d_in = g.d();
  std::vector<CompiledPoly> fc, dfc;  // F and its partials, compiled
  for (const Poly& f : map_components) fc.push_back(compile(f));
  for (const Poly& f : map_components)
    for (int j = 0; j < d_in; ++j) dfc.push_back(compile(f.derivative(j)));
  auto eval = [g, fc, d_in](std::span<const double> t, std::span<std::complex<double>> out) {
    std::vector<std::complex<double>> z(d_in);
    g.eval(t, z);
    for (size_t i = 0; i < fc.size(); ++i) out[i] = fc[i].eval(z);
  };
  auto jac = [g, dfc, n, d_in, d_out](std::span<const double> t,
                                      std::span<std::complex<double>> out) {
    std::vector<std::complex<double>> z(d_in), dg(d_in * n);
    g.eval(t, z);
    g.jacobian(t, dg);
    for (int i = 0; i < d_out; ++i)
      for (int nu = 0; nu < n; ++nu) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < d_in; ++j) acc += dfc[i * d_in + j].eval(z) * dg[j * n + nu];
        out[i * n + nu] = acc;
      }
  };
  std::vector<std::complex<double>> base;
  if (g.has_base()) {
    const auto b = g.base_numeric();
    base.resize(d_out);
    for (int i = 0; i < d_out; ++i) base[i] = fc[i].eval(b);
  }
  return Membrane::from_callbacks(n, d_out, g.field(), eval, jac, g.smooth_grid(),
                                  std::move(base));
}

// ---- closedness --------------------------------------------------------------

namespace {

bool is_closed_exact(const PolynomialMembrane& rep, std::span<const ExactScalar> x0) {
  if (static_cast<int>(x0.size()) != rep.d) return false;
  // Every boundary cell's restriction to each face must be the constant x0.
  std::vector<int> cell(rep.n, 0);
  while (true) {
    for (int axis = 0; axis < rep.n; ++axis) {
      for (int side = 0; side <= 1; ++side) {
        const bool on_face = side == 0 ? cell[axis] == 0 : cell[axis] == rep.cells_per_axis(axis) - 1;
        if (!on_face) continue;
        const auto& comps = rep.cells[rep.flat_index(cell)];
        for (int i = 0; i < rep.d; ++i) {
          Poly restr = comps[i].substitute(axis, ExactScalar(side));
          if (restr != Poly::constant(rep.n, x0[i])) return false;
        }
      }
    }
    int axis = rep.n - 1;
    while (axis >= 0 && ++cell[axis] == rep.cells_per_axis(axis)) cell[axis--] = 0;
    if (axis < 0) break;
  }
  return true;
}

bool is_closed_sampled(const Membrane& g, std::span<const std::complex<double>> x0, double tol,
                       int resolution) {
  if (static_cast<int>(x0.size()) != g.d()) return false;
  const int n = g.n();
  std::vector<double> t(n);
  std::vector<std::complex<double>> val(g.d());
  for (int axis = 0; axis < n; ++axis) {
    for (int side = 0; side <= 1; ++side) {
      // March a full grid over the remaining axes.
      std::vector<int> idx(n, 0);
      while (true) {
        for (int k = 0; k < n; ++k)
          t[k] = k == axis ? static_cast<double>(side)
                           : static_cast<double>(idx[k]) / (resolution - 1);
        g.eval(t, val);
        for (int i = 0; i < g.d(); ++i)
          if (std::abs(val[i] - x0[i]) > tol) return false;
        int k = n - 1;
        while (k >= 0) {
          if (k == axis) { --k; continue; }
          if (++idx[k] < resolution) break;
          idx[k--] = 0;
        }
        if (k < 0) break;
      }
    }
  }
  return true;
}

}  // namespace

bool is_closed(const Membrane& g, std::span<const ExactScalar> x0, double tol, int resolution) {
  if (g.polynomial()) return is_closed_exact(g.rep(), x0);
  std::vector<std::complex<double>> num;
  num.reserve(x0.size());
  for (const ExactScalar& c : x0) num.push_back(c.to_complex());
  return is_closed_sampled(g, num, tol, resolution);
}

bool is_closed(const Membrane& g, std::span<const std::complex<double>> x0, double tol,
               int resolution) {
  // A numeric base point may not be exactly representable, so always sample.
  return is_closed_sampled(g, x0, tol, resolution);
}

// ---- composition --------------------------------------------------------------

namespace {

void require_composable(const Membrane& g1, const Membrane& g2, double tol) {
  if (g1.n() != g2.n() || g1.d() != g2.d() || g1.field() != g2.field())
    throw std::invalid_argument("compose: membranes must share n, d, and field");
  if (!g1.has_base() || !g2.has_base())
    throw std::invalid_argument("compose: both membranes must be closed (no base point declared)");
  const bool both_exact = !g1.exact_base().empty() && !g2.exact_base().empty();
  if (both_exact) {
    if (g1.exact_base() != g2.exact_base())
      throw std::invalid_argument("compose: base points differ");
  } else {
    const auto b1 = g1.base_numeric(), b2 = g2.base_numeric();
    for (int i = 0; i < g1.d(); ++i)
      if (std::abs(b1[i] - b2[i]) > tol) throw std::invalid_argument("compose: base points differ");
  }
  auto check_closed = [tol](const Membrane& g) {
    bool ok;
    if (!g.exact_base().empty()) {
      ok = is_closed(g, std::span<const ExactScalar>(g.exact_base()), tol);
    } else {
      const auto base = g.base_numeric();
      ok = is_closed(g, std::span<const std::complex<double>>(base), tol);
    }
    if (!ok) throw std::invalid_argument("compose: membrane is not closed at its base point");
  };
  check_closed(g1);
  check_closed(g2);
}

std::vector<Rational> merged_composition_breaks(const std::vector<Rational>& b1,
                                                const std::vector<Rational>& b2) {
  std::set<Rational> s;
  s.insert(Rational(1, 2));
  for (const Rational& b : b1) s.insert(b / 2);
  for (const Rational& b : b2) s.insert(Rational(1, 2) + b / 2);
  return {s.begin(), s.end()};
}

// Index of the factor-membrane cell whose interval contains `mid`.
int locate_axis_cell(const std::vector<Rational>& breaks, const Rational& mid) {
  int idx = 0;
  for (const Rational& b : breaks) {
    if (mid > b) ++idx;
    else break;
  }
  return idx;
}

}  // namespace

Membrane compose(const Membrane& g1, const Membrane& g2, double tol) {
  require_composable(g1, g2, tol);
  const int n = g1.n(), d = g1.d();

  if (g1.polynomial() && g2.polynomial()) {
    const PolynomialMembrane& r1 = g1.rep();
    const PolynomialMembrane& r2 = g2.rep();
    PolynomialMembrane out;
    out.n = n;
    out.d = d;
    out.field = g1.field();
    out.base = r1.base;
    out.breaks.resize(n);
    for (int axis = 0; axis < n; ++axis)
      out.breaks[axis] = merged_composition_breaks(r1.breaks[axis], r2.breaks[axis]);

    std::vector<Poly> half_lo(n), half_hi(n);  // 2x and 2x-1 per axis
    for (int axis = 0; axis < n; ++axis) {
      half_lo[axis] = Poly::variable(n, axis).scaled(ExactScalar(2));
      half_hi[axis] = half_lo[axis] - Poly::constant(n, ExactScalar(1));
    }

    std::vector<int> cell(n, 0);
    const Rational half(1, 2);
    while (true) {
      bool all_lower = true, all_upper = true;
      std::vector<Rational> mid(n);
      for (int axis = 0; axis < n; ++axis) {
        const auto [lo, hi] = out.cell_bounds(axis, cell[axis]);
        if (hi > half) all_lower = false;
        if (lo < half) all_upper = false;
        mid[axis] = (lo + hi) / 2;
      }
      std::vector<Poly> comps;
      comps.reserve(d);
      if (all_lower) {
        std::vector<int> fcell(n);
        for (int axis = 0; axis < n; ++axis)
          fcell[axis] = locate_axis_cell(r1.breaks[axis], mid[axis] * 2);
        for (int i = 0; i < d; ++i) {
          Poly p = r1.cells[r1.flat_index(fcell)][i];
          for (int axis = 0; axis < n; ++axis) p = p.substitute(axis, half_lo[axis]);
          comps.push_back(std::move(p));
        }
      } else if (all_upper) {
        std::vector<int> fcell(n);
        for (int axis = 0; axis < n; ++axis)
          fcell[axis] = locate_axis_cell(r2.breaks[axis], mid[axis] * 2 - 1);
        for (int i = 0; i < d; ++i) {
          Poly p = r2.cells[r2.flat_index(fcell)][i];
          for (int axis = 0; axis < n; ++axis) p = p.substitute(axis, half_hi[axis]);
          comps.push_back(std::move(p));
        }
      } else {
        for (int i = 0; i < d; ++i) comps.push_back(Poly::constant(n, out.base[i]));
      }
      out.cells.push_back(std::move(comps));
      int axis = n - 1;
      while (axis >= 0 && ++cell[axis] == out.cells_per_axis(axis)) cell[axis--] = 0;
      if (axis < 0) break;
    }
    return Membrane::from_polynomial(std::move(out));
  }

  // Black-box composite.
  const auto base = g1.base_numeric();
  auto eval = [g1, g2, base, n](std::span<const double> t, std::span<std::complex<double>> out) {
    bool all_lower = true, all_upper = true;
    for (int axis = 0; axis < n; ++axis) {
      if (t[axis] > 0.5) all_lower = false;
      if (t[axis] <= 0.5) all_upper = false;
    }
    std::vector<double> u(n);
    if (all_lower) {
      for (int axis = 0; axis < n; ++axis) u[axis] = 2.0 * t[axis];
      g1.eval(u, out);
    } else if (all_upper) {
      for (int axis = 0; axis < n; ++axis) u[axis] = 2.0 * t[axis] - 1.0;
      g2.eval(u, out);
    } else {
      for (size_t i = 0; i < base.size(); ++i) out[i] = base[i];
    }
  };
  const int d_ = d;
  auto jac = [g1, g2, n, d_](std::span<const double> t, std::span<std::complex<double>> out) {
    bool all_lower = true, all_upper = true;
    for (int axis = 0; axis < n; ++axis) {
      if (t[axis] > 0.5) all_lower = false;
      if (t[axis] <= 0.5) all_upper = false;
    }
    std::vector<double> u(n);
    if (all_lower) {
      for (int axis = 0; axis < n; ++axis) u[axis] = 2.0 * t[axis];
      g1.jacobian(u, out);
      for (int i = 0; i < d_ * n; ++i) out[i] *= 2.0;
    } else if (all_upper) {
      for (int axis = 0; axis < n; ++axis) u[axis] = 2.0 * t[axis] - 1.0;
      g2.jacobian(u, out);
      for (int i = 0; i < d_ * n; ++i) out[i] *= 2.0;
    } else {
      for (int i = 0; i < d_ * n; ++i) out[i] = 0.0;
    }
  };
  std::vector<std::vector<double>> grid(n);
  for (int axis = 0; axis < n; ++axis) {
    std::set<double> s{0.5};
    for (double b : g1.smooth_grid()[axis]) s.insert(b / 2);
    for (double b : g2.smooth_grid()[axis]) s.insert(0.5 + b / 2);
    grid[axis].assign(s.begin(), s.end());
  }
  return Membrane::from_callbacks(n, d, g1.field(), eval, jac, std::move(grid), base);
}

// ---- reparametrization ---------------------------------------------------------

namespace {

// phi restricted to axis `axis`, segment `seg`: the axis component of any
// cell whose index along `axis` equals seg (valid for per-axis maps).
const Poly& axis_component(const PolynomialMembrane& map, int axis, int seg) {
  std::vector<int> cell(map.n, 0);
  cell[axis] = seg;
  return map.cells[map.flat_index(cell)][axis];
}

bool per_axis_separable(const PolynomialMembrane& map) {
  for (size_t ci = 0; ci < map.cells.size(); ++ci) {
    for (int i = 0; i < map.d; ++i) {
      const Poly& p = map.cells[ci][i];
      for (int v = 0; v < map.n; ++v)
        if (v != i && p.degree(v) > 0) return false;
    }
  }
  return true;
}

bool per_axis_piecewise_linear(const PolynomialMembrane& map) {
  if (!per_axis_separable(map)) return false;
  for (const auto& comps : map.cells)
    for (int i = 0; i < map.d; ++i)
      if (comps[i].degree(i) > 1) return false;
  return true;
}

}  // namespace

bool certify_monotone(const PolynomialMembrane& map, int grid_points_per_axis) {
  try {
    map.validate();
    map.validate_continuity();
  } catch (const std::invalid_argument&) {
    return false;
  }
  if (map.n != map.d) return false;
  const int n = map.n;

  // Exact boundary-face preservation: component `axis` restricted to the
  // face t_axis = side must be constantly `side`.
  {
    std::vector<int> cell(n, 0);
    while (true) {
      for (int axis = 0; axis < n; ++axis) {
        for (int side = 0; side <= 1; ++side) {
          const bool on_face =
              side == 0 ? cell[axis] == 0 : cell[axis] == map.cells_per_axis(axis) - 1;
          if (!on_face) continue;
          const Poly restr = map.cells[map.flat_index(cell)][axis].substitute(axis, ExactScalar(side));
          if (restr != Poly::constant(n, ExactScalar(side))) return false;
        }
      }
      int axis = n - 1;
      while (axis >= 0 && ++cell[axis] == map.cells_per_axis(axis)) cell[axis--] = 0;
      if (axis < 0) break;
    }
  }

  const Membrane m = Membrane::from_polynomial(map);
  const int G = grid_points_per_axis;
  const double eps = 1e-12;

  // Nonnegative Jacobian entries on a deterministic interior grid.
  {
    std::vector<double> t(n);
    std::vector<std::complex<double>> jac(n * n);
    std::vector<int> idx(n, 0);
    while (true) {
      for (int k = 0; k < n; ++k) t[k] = (idx[k] + 0.5) / G;
      m.jacobian(t, jac);
      for (int i = 0; i < n * n; ++i)
        if (jac[i].real() < -eps || std::abs(jac[i].imag()) > eps) return false;
      int k = n - 1;
      while (k >= 0 && ++idx[k] == G) idx[k--] = 0;
      if (k < 0) break;
    }
  }

  // Two-sided order preservation (x <= y iff phi(x) <= phi(y)) over every
  // grid pair, plus range containment.  Forward preservation alone does not
  // certify: for n >= 2 a forward-monotone map can have a non-monotone
  // inverse, and such maps move the ordered integration domains.  The grid
  // is coarsened until the full pair set stays affordable.
  {
    int Gp = G;
    while (Gp > 4 && std::pow(static_cast<double>(Gp), n) > 1400.0) --Gp;
    const int total = static_cast<int>(std::pow(static_cast<double>(Gp), n) + 0.5);
    std::vector<std::vector<double>> pts(total, std::vector<double>(n));
    std::vector<std::vector<double>> vals(total, std::vector<double>(n));
    std::vector<int> idx(n, 0);
    std::vector<std::complex<double>> v(n);
    for (int p = 0; p < total; ++p) {
      for (int k = 0; k < n; ++k) pts[p][k] = static_cast<double>(idx[k]) / (Gp - 1);
      m.eval(pts[p], v);
      for (int k = 0; k < n; ++k) {
        vals[p][k] = v[k].real();
        if (vals[p][k] < -eps || vals[p][k] > 1.0 + eps) return false;
      }
      int k = n - 1;
      while (k >= 0 && ++idx[k] == Gp) idx[k--] = 0;
    }
    auto leq = [n, eps](const std::vector<double>& a, const std::vector<double>& b) {
      for (int k = 0; k < n; ++k)
        if (a[k] > b[k] + eps) return false;
      return true;
    };
    for (int p = 0; p < total; ++p)
      for (int q = 0; q < total; ++q)
        if (p != q && leq(pts[p], pts[q]) != leq(vals[p], vals[q])) return false;
  }
  return true;
}

Reparametrization make_reparametrization(PolynomialMembrane map) {
  if (!certify_monotone(map))
    throw std::invalid_argument("phi: not certified monotonic (order or boundary violation)");
  return Reparametrization{std::move(map), true};
}

Membrane reparametrize(const Membrane& g, const Reparametrization& phi) {
  if (!phi.certified) throw std::invalid_argument("reparametrize: phi is not certified monotonic");
  const int n = g.n();
  if (phi.map.n != n) throw std::invalid_argument("reparametrize: dimension mismatch");

  bool g_has_breaks = false;
  for (const auto& br : g.smooth_grid()) g_has_breaks |= !br.empty();

  if (g.polynomial()) {
    const PolynomialMembrane& grep = g.rep();
    PolynomialMembrane refined = phi.map;
    if (g_has_breaks) {
      if (!per_axis_piecewise_linear(phi.map))
        throw std::invalid_argument(
            "reparametrize: membranes with interior breakpoints need a per-axis piecewise-linear phi");
      // Refine phi's grid so every g breakpoint has an exact preimage knot.
      for (int axis = 0; axis < n; ++axis) {
        std::set<Rational> knots(refined.breaks[axis].begin(), refined.breaks[axis].end());
        for (const Rational& b : grep.breaks[axis]) {
          // Walk phi's segments along this axis to find the preimage of b.
          const int segs = phi.map.cells_per_axis(axis);
          for (int seg = 0; seg < segs; ++seg) {
            const auto [xlo, xhi] = phi.map.cell_bounds(axis, seg);
            const Poly& comp = axis_component(phi.map, axis, seg);
            std::vector<ExactScalar> ptlo(n, ExactScalar(0)), pthi(n, ExactScalar(0));
            ptlo[axis] = ExactScalar(xlo);
            pthi[axis] = ExactScalar(xhi);
            const Rational ylo = comp.eval(std::span<const ExactScalar>(ptlo)).real();
            const Rational yhi = comp.eval(std::span<const ExactScalar>(pthi)).real();
            if (ylo < b && b < yhi) {
              knots.insert(xlo + (b - ylo) * (xhi - xlo) / (yhi - ylo));
              break;
            }
          }
        }
        // Rebuild the refined grid with unchanged polynomials: splitting a
        // cell does not change the map on it.
        refined.breaks[axis].assign(knots.begin(), knots.end());
      }
      // Re-tile cells for the refined grid.
      PolynomialMembrane tiled = refined;
      tiled.cells.clear();
      std::vector<int> cell(n, 0);
      while (true) {
        std::vector<int> orig(n);
        for (int axis = 0; axis < n; ++axis) {
          const auto [lo, hi] = tiled.cell_bounds(axis, cell[axis]);
          orig[axis] = locate_axis_cell(phi.map.breaks[axis], (lo + hi) / 2);
        }
        tiled.cells.push_back(phi.map.cells[phi.map.flat_index(orig)]);
        int axis = n - 1;
        while (axis >= 0 && ++cell[axis] == tiled.cells_per_axis(axis)) cell[axis--] = 0;
        if (axis < 0) break;
      }
      refined = std::move(tiled);
    }

    PolynomialMembrane out;
    out.n = n;
    out.d = g.d();
    out.field = g.field();
    out.base = grep.base;
    out.breaks = refined.breaks;
    std::vector<int> cell(n, 0);
    while (true) {
      const auto& images = refined.cells[refined.flat_index(cell)];
      // Which g-cell does this phi-cell map into?  Evaluate the (monotone)
      // axis image interval and take its midpoint.
      std::vector<int> gcell(n, 0);
      if (g_has_breaks) {
        for (int axis = 0; axis < n; ++axis) {
          const auto [lo, hi] = refined.cell_bounds(axis, cell[axis]);
          std::vector<ExactScalar> ptlo(n, ExactScalar(0)), pthi(n, ExactScalar(0));
          ptlo[axis] = ExactScalar(lo);
          pthi[axis] = ExactScalar(hi);
          const Rational ylo = images[axis].eval(std::span<const ExactScalar>(ptlo)).real();
          const Rational yhi = images[axis].eval(std::span<const ExactScalar>(pthi)).real();
          gcell[axis] = locate_axis_cell(grep.breaks[axis], (ylo + yhi) / 2);
        }
      }
      const auto& gcomps = grep.cells[grep.flat_index(gcell)];
      std::vector<Poly> comps;
      comps.reserve(g.d());
      for (int i = 0; i < g.d(); ++i) comps.push_back(gcomps[i].compose(images));
      out.cells.push_back(std::move(comps));
      int axis = n - 1;
      while (axis >= 0 && ++cell[axis] == refined.cells_per_axis(axis)) cell[axis--] = 0;
      if (axis < 0) break;
    }
    return Membrane::from_polynomial(std::move(out));
  }

  // Black-box membrane: wrap callbacks with the chain rule.
  if (g_has_breaks && !per_axis_piecewise_linear(phi.map))
    throw std::invalid_argument(
        "reparametrize: membranes with interior breakpoints need a per-axis piecewise-linear phi");
  const Membrane phim = Membrane::from_polynomial(phi.map);
  const int d = g.d();
  auto eval = [g, phim, n](std::span<const double> t, std::span<std::complex<double>> out) {
    std::vector<std::complex<double>> uc(n);
    phim.eval(t, uc);
    std::vector<double> u(n);
    for (int k = 0; k < n; ++k) u[k] = uc[k].real();
    g.eval(u, out);
  };
  auto jac = [g, phim, n, d](std::span<const double> t, std::span<std::complex<double>> out) {
    std::vector<std::complex<double>> uc(n), dphi(n * n), dg(d * n);
    phim.eval(t, uc);
    phim.jacobian(t, dphi);
    std::vector<double> u(n);
    for (int k = 0; k < n; ++k) u[k] = uc[k].real();
    g.jacobian(u, dg);
    for (int i = 0; i < d; ++i)
      for (int nu = 0; nu < n; ++nu) {
        std::complex<double> acc = 0.0;
        for (int k = 0; k < n; ++k) acc += dg[i * n + k] * dphi[k * n + nu];
        out[i * n + nu] = acc;
      }
  };
  std::vector<std::vector<double>> grid(n);
  for (int axis = 0; axis < n; ++axis) {
    std::set<double> s;
    for (const Rational& b : phi.map.breaks[axis]) s.insert(to_double(b));
    // Preimages of g's breakpoints under the (piecewise-linear) axis map.
    for (double b : g.smooth_grid()[axis]) {
      const int segs = phi.map.cells_per_axis(axis);
      for (int seg = 0; seg < segs; ++seg) {
        const auto [xlo, xhi] = phi.map.cell_bounds(axis, seg);
        const Poly& comp = axis_component(phi.map, axis, seg);
        std::vector<ExactScalar> ptlo(n, ExactScalar(0)), pthi(n, ExactScalar(0));
        ptlo[axis] = ExactScalar(xlo);
        pthi[axis] = ExactScalar(xhi);
        const double ylo = to_double(comp.eval(std::span<const ExactScalar>(ptlo)).real());
        const double yhi = to_double(comp.eval(std::span<const ExactScalar>(pthi)).real());
        if (ylo < b && b < yhi) {
          const double xl = to_double(xlo), xh = to_double(xhi);
          s.insert(xl + (b - ylo) * (xh - xl) / (yhi - ylo));
          break;
        }
      }
    }
    grid[axis].assign(s.begin(), s.end());
  }
  return Membrane::from_callbacks(n, d, g.field(), eval, jac, std::move(grid), g.base_numeric());
}

// ---- chains --------------------------------------------------------------------

MembraneChain expand_vanishing_chain(const std::vector<Membrane>& alphas, double tol) {
  const int r = static_cast<int>(alphas.size());
  if (r < 1) throw std::invalid_argument("vanishing chain: needs at least one membrane");
  const int n = alphas[0].n(), d = alphas[0].d();
  const Field field = alphas[0].field();
  for (const Membrane& a : alphas) {
    if (a.n() != n || a.d() != d || a.field() != field)
      throw std::invalid_argument("vanishing chain: membranes must share n, d, and field");
    if (!a.has_base()) throw std::invalid_argument("vanishing chain: membranes must be closed");
  }

  // Common base point (compose() re-validates pairwise agreement).
  const bool exact = !alphas[0].exact_base().empty();
  Membrane unit = [&]() {
    if (exact) return constant_membrane(n, alphas[0].exact_base(), field);
    const auto base = alphas[0].base_numeric();
    auto eval = [base](std::span<const double>, std::span<std::complex<double>> out) {
      for (size_t i = 0; i < base.size(); ++i) out[i] = base[i];
    };
    auto jac = [n, d](std::span<const double>, std::span<std::complex<double>> out) {
      for (int i = 0; i < d * n; ++i) out[i] = 0.0;
    };
    return Membrane::from_callbacks(n, d, field, eval, jac,
                                    std::vector<std::vector<double>>(n), base);
  }();

  MembraneChain chain;
  for (int size = r; size >= 0; --size) {
    // Subsets of {0..r-1} of this size in lexicographic order.
    std::vector<int> pick(size);
    for (int i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      long long coeff = (r - size) % 2 == 0 ? 1 : -1;
      if (size == 0) {
        chain.terms.emplace_back(coeff, unit);
      } else {
        Membrane m = alphas[pick[0]];
        for (int i = 1; i < size; ++i) m = compose(m, alphas[pick[i]], tol);
        chain.terms.emplace_back(coeff, std::move(m));
      }
      if (size == 0) break;
      int i = size - 1;
      while (i >= 0 && pick[i] == r - (size - i)) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return chain;
}

}  // namespace memint
