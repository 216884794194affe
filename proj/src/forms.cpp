#include "memint/forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace memint {

// ---- CoefficientFunction ---------------------------------------------------

CoefficientFunction CoefficientFunction::from_poly(Poly p) {
  CoefficientFunction c;
  c.poly_ = std::move(p);
  return c;
}

CoefficientFunction CoefficientFunction::from_callback(Fn fn) {
  if (!fn) throw std::invalid_argument("coefficient: empty callback");
  CoefficientFunction c;
  c.fn_ = std::move(fn);
  return c;
}

CoefficientFunction CoefficientFunction::constant(int ambient_dim, ExactScalar value) {
  return from_poly(Poly::constant(ambient_dim, std::move(value)));
}

const Poly& CoefficientFunction::poly() const {
  if (!poly_) throw std::logic_error("coefficient: not polynomial");
  return *poly_;
}

std::complex<double> CoefficientFunction::eval(std::span<const std::complex<double>> z) const {
  if (poly_) return poly_->eval(z);
  return fn_(z);
}

// ---- DifferentialForm --------------------------------------------------------

DifferentialForm::DifferentialForm(int ambient_dim, int degree, Field field)
    : ambient_dim_(ambient_dim), degree_(degree), field_(field) {
  if (ambient_dim < 1) throw std::invalid_argument("form: ambient dimension must be >= 1");
  if (degree < 1 || degree > ambient_dim)
    throw std::invalid_argument("form: degree must be between 1 and the ambient dimension");
}

void DifferentialForm::add_term(std::vector<int> indices, CoefficientFunction coef) {
  if (static_cast<int>(indices.size()) != degree_)
    throw std::invalid_argument("form: index tuple length must equal the degree");
  for (size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 1 || indices[i] > ambient_dim_)
      throw std::invalid_argument("form: coordinate index out of range");
    if (i && indices[i - 1] >= indices[i])
      throw std::invalid_argument("form: coordinate indices must be strictly increasing");
  }
  if (coef.is_polynomial() && coef.poly().nvars() != ambient_dim_)
    throw std::invalid_argument("form: coefficient must use the ambient coordinates");

  auto it = terms_.find(indices);
  if (it == terms_.end()) {
    if (!(coef.is_polynomial() && coef.poly().is_zero()))
      terms_.emplace(std::move(indices), std::move(coef));
    return;
  }
  if (it->second.is_polynomial() && coef.is_polynomial()) {
    Poly sum = it->second.poly() + coef.poly();
    if (sum.is_zero()) terms_.erase(it);
    else it->second = CoefficientFunction::from_poly(std::move(sum));
    return;
  }
  CoefficientFunction lhs = it->second, rhs = coef;
  it->second = CoefficientFunction::from_callback(
      [lhs, rhs](std::span<const std::complex<double>> z) { return lhs.eval(z) + rhs.eval(z); });
}

bool DifferentialForm::is_polynomial() const {
  for (const auto& [idx, coef] : terms_)
    if (!coef.is_polynomial()) return false;
  return true;
}

DifferentialForm monomial_form(int ambient_dim, std::vector<int> indices, Poly coefficient,
                               Field field) {
  DifferentialForm w(ambient_dim, static_cast<int>(indices.size()), field);
  w.add_term(std::move(indices), CoefficientFunction::from_poly(std::move(coefficient)));
  return w;
}

DifferentialForm constant_form(int ambient_dim, std::vector<int> indices, ExactScalar value,
                               Field field) {
  DifferentialForm w(ambient_dim, static_cast<int>(indices.size()), field);
  w.add_term(std::move(indices), CoefficientFunction::constant(ambient_dim, std::move(value)));
  return w;
}

// ---- wedge --------------------------------------------------------------------

namespace {

Field merge_fields(Field a, Field b) {
  return a == Field::Complex || b == Field::Complex ? Field::Complex : Field::Real;
}

// Sign of sorting the concatenation of two increasing tuples; zero when they
// share an index.
int interleave_sign(const std::vector<int>& a, const std::vector<int>& b) {
  int inversions = 0;
  for (int x : a)
    for (int y : b) {
      if (x == y) return 0;
      if (x > y) ++inversions;
    }
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw std::invalid_argument("wedge: ambient dimensions differ");
  if (a.degree() + b.degree() > a.ambient_dim()) {
    // Every index tuple would repeat a coordinate: the zero form (returned
    // at top degree, the nearest representable shape).
    return DifferentialForm(a.ambient_dim(), a.ambient_dim(),
                            merge_fields(a.field(), b.field()));
  }
  DifferentialForm out(a.ambient_dim(), a.degree() + b.degree(),
                       merge_fields(a.field(), b.field()));
  for (const auto& [ja, ca] : a.terms()) {
    for (const auto& [jb, cb] : b.terms()) {
      const int sign = interleave_sign(ja, jb);
      if (sign == 0) continue;
      std::vector<int> merged;
      merged.reserve(ja.size() + jb.size());
      std::merge(ja.begin(), ja.end(), jb.begin(), jb.end(), std::back_inserter(merged));
      CoefficientFunction coef = [&]() {
        if (ca.is_polynomial() && cb.is_polynomial()) {
          Poly p = ca.poly() * cb.poly();
          if (sign < 0) p = p.scaled(ExactScalar(-1));
          return CoefficientFunction::from_poly(std::move(p));
        }
        const CoefficientFunction lhs = ca, rhs = cb;
        const double s = sign;
        return CoefficientFunction::from_callback(
            [lhs, rhs, s](std::span<const std::complex<double>> z) {
              return s * lhs.eval(z) * rhs.eval(z);
            });
      }();
      out.add_term(std::move(merged), std::move(coef));
    }
  }
  return out;
}

// ---- pullback along a polynomial map --------------------------------------------

namespace {

// Determinant of a k x k polynomial matrix by Laplace expansion along the
// first column (k stays small: it is the form degree).
Poly poly_det(const std::vector<std::vector<Poly>>& m) {
  const int k = static_cast<int>(m.size());
  if (k == 1) return m[0][0];
  const int nvars = m[0][0].nvars();
  Poly acc(nvars);
  for (int r = 0; r < k; ++r) {
    std::vector<std::vector<Poly>> minor;
    minor.reserve(k - 1);
    for (int i = 0; i < k; ++i) {
      if (i == r) continue;
      std::vector<Poly> row;
      row.reserve(k - 1);
      for (int j = 1; j < k; ++j) row.push_back(m[i][j]);
      minor.push_back(std::move(row));
    }
    Poly term = m[r][0] * poly_det(minor);
    if (r % 2) term = term.scaled(ExactScalar(-1));
    acc += term;
  }
  return acc;
}

// Determinant of a k x k complex matrix (row-major, destructive) by Gaussian
// elimination with partial pivoting.
std::complex<double> complex_det(std::vector<std::complex<double>>& m, int k) {
  std::complex<double> det = 1.0;
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    double best = std::abs(m[col * k + col]);
    for (int r = col + 1; r < k; ++r) {
      const double cand = std::abs(m[r * k + col]);
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (int j = col; j < k; ++j) std::swap(m[pivot * k + j], m[col * k + j]);
      det = -det;
    }
    det *= m[col * k + col];
    for (int r = col + 1; r < k; ++r) {
      const std::complex<double> f = m[r * k + col] / m[col * k + col];
      for (int j = col; j < k; ++j) m[r * k + j] -= f * m[col * k + j];
    }
  }
  return det;
}

// All strictly increasing k-tuples from {1..d} in lexicographic order.
std::vector<std::vector<int>> increasing_tuples(int d, int k) {
  std::vector<std::vector<int>> out;
  if (k > d) return out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i + 1;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == d - (k - 1 - i)) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

}  // namespace

DifferentialForm pullback_form(const std::vector<Poly>& map_components,
                               const DifferentialForm& w) {
  if (static_cast<int>(map_components.size()) != w.ambient_dim())
    throw std::invalid_argument("pullback: map target dimension must match the form's ambient");
  if (!w.is_polynomial())
    throw std::invalid_argument("pullback: form must have polynomial coefficients");
  if (map_components.empty()) throw std::invalid_argument("pullback: empty map");
  const int source_dim = map_components[0].nvars();
  for (const Poly& p : map_components)
    if (p.nvars() != source_dim)
      throw std::invalid_argument("pullback: map components must share one variable set");
  const int k = w.degree();
  if (k > source_dim) {
    // Every k-fold wedge of source differentials vanishes; represent the
    // zero pullback as a degree-capped empty form.
    return DifferentialForm(source_dim, source_dim, w.field());
  }

  // Jacobian of the map: dF[j][i] = d map_j / d x_i.
  std::vector<std::vector<Poly>> dF(map_components.size(),
                                    std::vector<Poly>(source_dim, Poly(source_dim)));
  for (size_t j = 0; j < map_components.size(); ++j)
    for (int i = 0; i < source_dim; ++i) dF[j][i] = map_components[j].derivative(i);

  DifferentialForm out(source_dim, k, w.field());
  for (const auto& I : increasing_tuples(source_dim, k)) {
    Poly coef(source_dim);
    for (const auto& [J, cJ] : w.terms()) {
      std::vector<std::vector<Poly>> minor(k, std::vector<Poly>(k, Poly(source_dim)));
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) minor[r][c] = dF[J[r] - 1][I[c] - 1];
      coef += cJ.poly().compose(map_components) * poly_det(minor);
    }
    if (!coef.is_zero()) out.add_term(I, CoefficientFunction::from_poly(std::move(coef)));
  }
  return out;
}

// ---- pullback along a membrane ---------------------------------------------------

int PullbackDensity::cell_count() const {
  int c = 1;
  for (int axis = 0; axis < n_; ++axis) c *= cells_per_axis(axis);
  return c;
}

int PullbackDensity::flat_index(std::span<const int> cell) const {
  int idx = 0;
  for (int axis = 0; axis < n_; ++axis) idx = idx * cells_per_axis(axis) + cell[axis];
  return idx;
}

std::vector<int> PullbackDensity::locate(std::span<const double> t) const {
  std::vector<int> cell(n_);
  for (int axis = 0; axis < n_; ++axis) {
    int idx = 0;
    for (double b : breaks_[axis]) {
      if (t[axis] >= b) ++idx;
      else break;
    }
    cell[axis] = idx;
  }
  return cell;
}

const Poly& PullbackDensity::cell_poly(int flat_cell) const {
  if (!exact_) throw std::logic_error("density: no exact representation");
  return cells_[flat_cell];
}

std::complex<double> PullbackDensity::eval(std::span<const double> t) const {
  if (!exact_) return fn_(t);
  return compiled_[flat_index(locate(t))].eval(t);
}

std::complex<double> PullbackDensity::eval_in_cell(int flat_cell,
                                                   std::span<const double> t) const {
  if (!exact_) return fn_(t);
  return compiled_[flat_cell].eval(t);
}

PullbackDensity pullback(const Membrane& g, const DifferentialForm& w) {
  if (w.ambient_dim() != g.d())
    throw std::invalid_argument("pullback: form ambient dimension must equal the target dimension");
  if (w.degree() != g.n())
    throw std::invalid_argument("pullback: form degree must equal the membrane dimension");
  const int n = g.n();

  PullbackDensity density;
  density.n_ = n;
  density.field_ = merge_fields(g.field(), w.field());

  if (g.polynomial() && w.is_polynomial()) {
    const PolynomialMembrane& rep = g.rep();
    density.exact_ = true;
    density.exact_breaks_ = rep.breaks;
    density.breaks_ = g.smooth_grid();
    density.cells_.reserve(rep.cells.size());
    for (const auto& comps : rep.cells) {
      std::vector<std::vector<Poly>> jac(g.d(), std::vector<Poly>(n, Poly(n)));
      for (int i = 0; i < g.d(); ++i)
        for (int nu = 0; nu < n; ++nu) jac[i][nu] = comps[i].derivative(nu);
      Poly cell(n);
      for (const auto& [J, cJ] : w.terms()) {
        std::vector<std::vector<Poly>> minor(n, std::vector<Poly>(n, Poly(n)));
        for (int r = 0; r < n; ++r) minor[r] = jac[J[r] - 1];
        cell += cJ.poly().compose(comps) * poly_det(minor);
      }
      density.compiled_.push_back(compile(cell));
      density.cells_.push_back(std::move(cell));
    }
    return density;
  }

  density.breaks_ = g.smooth_grid();
  const int d = g.d();
  const DifferentialForm form = w;
  const Membrane mem = g;
  density.fn_ = [mem, form, n, d](std::span<const double> t) {
    std::vector<std::complex<double>> z(d), jac(d * n);
    mem.eval(t, z);
    mem.jacobian(t, jac);
    std::complex<double> acc = 0.0;
    std::vector<std::complex<double>> minor(n * n);
    for (const auto& [J, cJ] : form.terms()) {
      for (int r = 0; r < n; ++r)
        for (int nu = 0; nu < n; ++nu) minor[r * n + nu] = jac[(J[r] - 1) * n + nu];
      acc += cJ.eval(z) * complex_det(minor, n);
    }
    return acc;
  };
  return density;
}

}  // namespace memint
