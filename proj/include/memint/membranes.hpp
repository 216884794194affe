// Membranes: continuous maps I^n -> R^d or C^d, piecewise-smooth off a
// per-axis breakpoint grid.  Includes the piecewise-polynomial exact
// representation, a catalog of builders, closedness tests, composition of
// closed membranes, monotone reparametrization, and formal integer chains.
#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memint/polynomial.hpp"
#include "memint/rational.hpp"

namespace memint {

enum class Field { Real, Complex };

std::string field_name(Field f);

// Piecewise-polynomial map I^n -> target^d on a per-axis grid.  Cell (c_1,
// ..., c_n) covers the box between consecutive breakpoints on each axis;
// component polynomials are written in the global coordinates of I^n.
struct PolynomialMembrane {
  int n = 0;
  int d = 0;
  Field field = Field::Real;
  // Interior breakpoints per axis, strictly increasing, all in (0,1).
  std::vector<std::vector<Rational>> breaks;
  // cells[flat_index] = d component polynomials in n variables.
  // flat_index runs axis-0-major: axis 0 varies slowest.
  std::vector<std::vector<Poly>> cells;
  // Base point; empty when the membrane has none declared.
  std::vector<ExactScalar> base;

  int cells_per_axis(int axis) const { return static_cast<int>(breaks[axis].size()) + 1; }
  int cell_count() const;
  int flat_index(std::span<const int> cell) const;
  std::pair<Rational, Rational> cell_bounds(int axis, int idx) const;
  std::vector<int> locate(std::span<const double> t) const;

  // Structural validation: sizes, sortedness, variable counts.
  void validate() const;
  // Exact continuity across every interior grid face.
  void validate_continuity() const;
};

class Membrane {
 public:
  using EvalFn = std::function<void(std::span<const double>, std::span<std::complex<double>>)>;
  // Jacobian output is row-major d x n: out[i*n + nu] = d comp_i / d t_nu.
  using JacobianFn = EvalFn;

  static Membrane from_polynomial(PolynomialMembrane rep);
  static Membrane from_callbacks(int n, int d, Field field, EvalFn eval, JacobianFn jac,
                                 std::vector<std::vector<double>> smooth_grid,
                                 std::vector<std::complex<double>> base);

  int n() const { return n_; }
  int d() const { return d_; }
  Field field() const { return field_; }
  bool polynomial() const { return rep_ != nullptr; }
  const PolynomialMembrane& rep() const;

  void eval(std::span<const double> t, std::span<std::complex<double>> out) const;
  void jacobian(std::span<const double> t, std::span<std::complex<double>> out) const;

  // Interior breakpoints per axis outside of which the map is smooth on each
  // open cell (floating view; exact view lives on rep() when polynomial).
  const std::vector<std::vector<double>>& smooth_grid() const { return grid_; }

  bool has_base() const;
  // Base point as exact scalars (empty for callback membranes without one).
  const std::vector<ExactScalar>& exact_base() const { return exact_base_; }
  std::vector<std::complex<double>> base_numeric() const;

 private:
  int n_ = 0, d_ = 0;
  Field field_ = Field::Real;
  std::shared_ptr<const PolynomialMembrane> rep_;  // shared: membranes are immutable values
  std::vector<std::vector<CompiledPoly>> compiled_cells_;   // [cell][component]
  std::vector<std::vector<CompiledPoly>> compiled_jac_;     // [cell][i*n+nu]
  EvalFn eval_;
  JacobianFn jac_;
  std::vector<std::vector<double>> grid_;
  std::vector<ExactScalar> exact_base_;
  std::vector<std::complex<double>> numeric_base_;
};

// ---- catalog -------------------------------------------------------------

// The constant map t |-> x0.  Closed with base point x0.
Membrane constant_membrane(int n, std::vector<ExactScalar> x0, Field field = Field::Real);

// The identity I^n -> R^n.
Membrane identity_membrane(int n);

// Closed bump: component i is x0[i] + amplitude[i] * prod_nu t_nu^{e[i][nu]}
// (1-t_nu)^{e[i][nu]} with exponents e[i][nu] >= 1.  Rows with distinct
// exponent patterns give a Jacobian of full rank almost everywhere; with all
// rows equal the image degenerates to a curve (rank one), which is still a
// valid closed membrane but integrates every density to zero.
Membrane bump_membrane(int n, std::vector<ExactScalar> x0, std::vector<ExactScalar> amplitude,
                       std::vector<std::vector<int>> exponents, Field field = Field::Real);

// Product of paths: g(t) = (gamma_1(t_1), ..., gamma_n(t_n)) with each
// gamma_nu a single-variable polynomial; target dimension equals n.
Membrane path_product_membrane(std::vector<Poly> factors, Field field = Field::Real);

// A polynomial path I -> R^d (n = 1) from d single-variable components.
// Declares a base point iff the endpoints coincide exactly.
Membrane polynomial_path_membrane(std::vector<Poly> components, Field field = Field::Real);

// Torus-style loop I^2 -> R^3 (trigonometric callbacks; not closed, not
// polynomial — exercises the engines' black-box paths).
Membrane torus_loop_membrane(double big_radius, double small_radius);

// The image membrane F o g of a polynomial map applied pointwise to g.
// Each component of F is written in g's d target coordinates; the result has
// target dimension map_components.size().  Exact when g is polynomial;
// otherwise wraps callbacks with the chain rule for the Jacobian.
Membrane apply_polynomial_map(const std::vector<Poly>& map_components, const Membrane& g);

// ---- closedness ----------------------------------------------------------

// True iff g maps the whole boundary of I^n to x0.  Exact for polynomial
// membranes (tol ignored); otherwise samples each face on a deterministic
// grid with `resolution` points per axis and tests max|g - x0| <= tol.
bool is_closed(const Membrane& g, std::span<const ExactScalar> x0, double tol,
               int resolution = 9);
bool is_closed(const Membrane& g, std::span<const std::complex<double>> x0, double tol,
               int resolution = 9);

// ---- composition ---------------------------------------------------------

// The composite of two closed membranes with the same base point x0:
// g1(2t) where all t_nu <= 1/2, g2(2t-1) where all t_nu > 1/2, x0 elsewhere.
// Exact (piecewise-polynomial) when both factors are polynomial.
Membrane compose(const Membrane& g1, const Membrane& g2, double tol = 1e-10);

// ---- reparametrization ---------------------------------------------------

// A monotonic piecewise diffeomorphism of I^n, held as a piecewise-
// polynomial map plus a certification flag.
struct Reparametrization {
  PolynomialMembrane map;
  bool certified = false;
};

// Monotonicity certificate: exact boundary-face preservation, nonnegative
// Jacobian entries at deterministic sample points, and two-sided order
// preservation (x <= y iff phi(x) <= phi(y)) over all pairs of a
// deterministic grid.  The two-sided test matters: for n >= 2 a map can
// preserve the order forward while its inverse does not, and such maps move
// the ordered integration domains, breaking reparametrization invariance.
// In practice the certified maps are per-axis products of increasing
// bijections (order automorphisms of the cube are exactly of that shape, up
// to coordinate permutations, which the boundary condition pins down).
bool certify_monotone(const PolynomialMembrane& map, int grid_points_per_axis = 10);

// Builds a certified reparametrization; throws std::invalid_argument when
// the map fails certification.
Reparametrization make_reparametrization(PolynomialMembrane map);

// g o phi with merged smooth grid.  Exact when g is polynomial; membranes
// with interior breakpoints additionally require phi to be piecewise linear
// separately per axis so the grid pulls back exactly.
Membrane reparametrize(const Membrane& g, const Reparametrization& phi);

// ---- chains --------------------------------------------------------------

// Formal integer linear combination of membranes over a common (n, d, field).
struct MembraneChain {
  std::vector<std::pair<long long, Membrane>> terms;
};

// Expands (alpha_1 - 1)(alpha_2 - 1)...(alpha_r - 1) in the membrane ring:
// one term per subset of indices, enumerated largest-size first (lexicographic
// within a size), with coefficient (-1)^(r - |subset|); the membrane of a
// subset is the left-fold composition of its alphas in index order and the
// empty subset contributes the constant membrane at the common base point.
MembraneChain expand_vanishing_chain(const std::vector<Membrane>& alphas, double tol = 1e-10);

}  // namespace memint
