// Differential forms with polynomial or black-box coefficients, the wedge
// product, pullback along polynomial maps, and pullback along a membrane to
// a scalar density on the parameter cube.
#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "memint/membranes.hpp"
#include "memint/polynomial.hpp"
#include "memint/rational.hpp"

namespace memint {

// A scalar function of the ambient coordinates: either a polynomial (exact)
// or an arbitrary callback evaluated at complex points.
class CoefficientFunction {
 public:
  using Fn = std::function<std::complex<double>(std::span<const std::complex<double>>)>;

  static CoefficientFunction from_poly(Poly p);
  static CoefficientFunction from_callback(Fn fn);
  static CoefficientFunction constant(int ambient_dim, ExactScalar value);

  bool is_polynomial() const { return poly_.has_value(); }
  const Poly& poly() const;  // throws when not polynomial
  std::complex<double> eval(std::span<const std::complex<double>> z) const;

 private:
  std::optional<Poly> poly_;
  Fn fn_;
};

// A degree-k differential form sum_J a_J(x) dx_{J_1} ^ ... ^ dx_{J_k} on
// R^d or C^d, indexed by strictly increasing 1-based k-tuples J.
class DifferentialForm {
 public:
  DifferentialForm(int ambient_dim, int degree, Field field = Field::Real);

  int ambient_dim() const { return ambient_dim_; }
  int degree() const { return degree_; }
  Field field() const { return field_; }

  // Adds a_J dx_J; merging with an existing term at the same J adds the
  // coefficients.  Indices must be strictly increasing in [1, ambient_dim].
  void add_term(std::vector<int> indices, CoefficientFunction coef);

  const std::map<std::vector<int>, CoefficientFunction>& terms() const { return terms_; }
  bool is_polynomial() const;
  bool is_zero() const { return terms_.empty(); }

 private:
  int ambient_dim_ = 0;
  int degree_ = 0;
  Field field_ = Field::Real;
  std::map<std::vector<int>, CoefficientFunction> terms_;
};

// Convenience builders for common shapes.
DifferentialForm monomial_form(int ambient_dim, std::vector<int> indices, Poly coefficient,
                               Field field = Field::Real);
DifferentialForm constant_form(int ambient_dim, std::vector<int> indices, ExactScalar value,
                               Field field = Field::Real);

// Wedge product; terms with a repeated index vanish, the rest are reordered
// into increasing tuples with the sign of the reordering.
DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);

// Pullback of w along the polynomial map F (components written in source
// coordinates; the ambient dimension of w must equal F's component count).
// Requires polynomial coefficients.
DifferentialForm pullback_form(const std::vector<Poly>& map_components,
                               const DifferentialForm& w);

// The scalar density of w pulled back along a membrane: the function f with
// g^*(w) = f(t) dt_1 ^ ... ^ dt_n, piecewise per membrane cell.  Exact
// (piecewise-polynomial) when both the membrane and the coefficients are
// polynomial; a black-box callable otherwise.
class PullbackDensity {
 public:
  int n() const { return n_; }
  Field field() const { return field_; }
  bool exact() const { return exact_; }

  // Interior grid per axis; exact view is only populated for exact densities.
  const std::vector<std::vector<Rational>>& exact_breaks() const { return exact_breaks_; }
  const std::vector<std::vector<double>>& breaks() const { return breaks_; }

  int cells_per_axis(int axis) const { return static_cast<int>(breaks_[axis].size()) + 1; }
  int cell_count() const;
  int flat_index(std::span<const int> cell) const;
  std::vector<int> locate(std::span<const double> t) const;

  // Exact densities only: the polynomial on a grid cell.
  const Poly& cell_poly(int flat_cell) const;

  std::complex<double> eval(std::span<const double> t) const;
  // Evaluates pinned to a known grid cell (exact densities; callback
  // densities ignore the hint).  Lets integrators resolve the cell once per
  // subdomain instead of per node.
  std::complex<double> eval_in_cell(int flat_cell, std::span<const double> t) const;

 private:
  friend PullbackDensity pullback(const Membrane& g, const DifferentialForm& w);

  int n_ = 0;
  Field field_ = Field::Real;
  bool exact_ = false;
  std::vector<std::vector<Rational>> exact_breaks_;
  std::vector<std::vector<double>> breaks_;
  std::vector<Poly> cells_;            // [flat_cell], exact only
  std::vector<CompiledPoly> compiled_; // [flat_cell], exact only
  std::function<std::complex<double>(std::span<const double>)> fn_;  // callback only
};

// Pulls an n-form on the membrane's target space back to a density on I^n.
// Requires w.ambient_dim() == g.d() and w.degree() == g.n().
PullbackDensity pullback(const Membrane& g, const DifferentialForm& w);

}  // namespace memint
