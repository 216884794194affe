// Sparse multivariate polynomials with exact rational-complex coefficients.
// This is the common representation for form coefficients, membrane
// components, pullback densities, and the exact engine's integrands.
#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "memint/rational.hpp"

namespace memint {

class Poly {
 public:
  using Exps = std::vector<int>;  // one exponent per variable, all >= 0

  Poly() = default;
  explicit Poly(int nvars);

  static Poly constant(int nvars, ExactScalar c);
  static Poly variable(int nvars, int var);  // x_var, 0-based
  static Poly monomial(int nvars, Exps exps, ExactScalar c);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  // The value of a constant polynomial (zero polynomial included).
  ExactScalar constant_value() const;
  const std::map<Exps, ExactScalar>& terms() const { return terms_; }

  void add_term(const Exps& exps, const ExactScalar& c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly operator-() const;
  Poly scaled(const ExactScalar& c) const;

  Poly derivative(int var) const;
  Poly antiderivative(int var) const;

  // Substitutes `replacement` (a polynomial in the same variable space) for
  // x_var.  Constants and single variables are the common cases.
  Poly substitute(int var, const Poly& replacement) const;
  Poly substitute(int var, const ExactScalar& value) const;

  // Full composition: this(x_0,...,x_{nvars-1}) with x_j := images[j].
  // All images share a common variable space, which becomes the result's.
  Poly compose(const std::vector<Poly>& images) const;

  // Re-embeds into a space of new_nvars variables, variable i of this
  // becoming variable where[i] of the result.
  Poly remap(int new_nvars, const std::vector<int>& where) const;

  ExactScalar eval(std::span<const ExactScalar> x) const;
  std::complex<double> eval(std::span<const std::complex<double>> x) const;

  int degree(int var) const;
  int total_degree() const;

  friend bool operator==(const Poly& a, const Poly& b) = default;

  // Human-readable rendering, e.g. "1/2 x0^2 x1 - x2".  For diagnostics.
  std::string str() const;

 private:
  int nvars_ = 0;
  std::map<Exps, ExactScalar> terms_;
};

// Floating-point view of a Poly for hot evaluation loops (quadrature and
// Monte Carlo).  Term order matches the exact polynomial's canonical order,
// so summation is deterministic.
struct CompiledPoly {
  struct Term {
    std::complex<double> c;
    std::vector<int> exps;
  };
  int nvars = 0;
  std::vector<Term> terms;

  std::complex<double> eval(std::span<const double> x) const;
  std::complex<double> eval(std::span<const std::complex<double>> x) const;
};

CompiledPoly compile(const Poly& p);

}  // namespace memint
