#include "memint/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace memint {

Poly::Poly(int nvars) : nvars_(nvars) {
  if (nvars < 0) throw std::invalid_argument("Poly: negative variable count");
}

Poly Poly::constant(int nvars, ExactScalar c) {
  Poly p(nvars);
  if (!c.is_zero()) p.terms_.emplace(Exps(nvars, 0), std::move(c));
  return p;
}

Poly Poly::variable(int nvars, int var) {
  if (var < 0 || var >= nvars) throw std::invalid_argument("Poly::variable: index out of range");
  Exps e(nvars, 0);
  e[var] = 1;
  Poly p(nvars);
  p.terms_.emplace(std::move(e), ExactScalar(1));
  return p;
}

Poly Poly::monomial(int nvars, Exps exps, ExactScalar c) {
  if (static_cast<int>(exps.size()) != nvars)
    throw std::invalid_argument("Poly::monomial: exponent vector length mismatch");
  for (int e : exps)
    if (e < 0) throw std::invalid_argument("Poly::monomial: negative exponent");
  Poly p(nvars);
  if (!c.is_zero()) p.terms_.emplace(std::move(exps), std::move(c));
  return p;
}

bool Poly::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  const Exps& e = terms_.begin()->first;
  return std::all_of(e.begin(), e.end(), [](int v) { return v == 0; });
}

ExactScalar Poly::constant_value() const {
  if (!is_constant()) throw std::logic_error("Poly::constant_value: polynomial is not constant");
  return terms_.empty() ? ExactScalar(0) : terms_.begin()->second;
}

void Poly::add_term(const Exps& exps, const ExactScalar& c) {
  if (static_cast<int>(exps.size()) != nvars_)
    throw std::invalid_argument("Poly::add_term: exponent vector length mismatch");
  if (c.is_zero()) return;
  auto it = terms_.find(exps);
  if (it == terms_.end()) {
    terms_.emplace(exps, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  if (nvars_ != o.nvars_) throw std::invalid_argument("Poly: variable-count mismatch in +");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (nvars_ != o.nvars_) throw std::invalid_argument("Poly: variable-count mismatch in -");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.nvars_ != b.nvars_) throw std::invalid_argument("Poly: variable-count mismatch in *");
  Poly out(a.nvars_);
  Poly::Exps e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Poly Poly::operator-() const {
  Poly out(nvars_);
  for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
  return out;
}

Poly Poly::scaled(const ExactScalar& c) const {
  Poly out(nvars_);
  if (c.is_zero()) return out;
  for (const auto& [e, coef] : terms_) out.terms_.emplace(e, coef * c);
  return out;
}

Poly Poly::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw std::invalid_argument("Poly::derivative: index out of range");
  Poly out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exps ne = e;
    ne[var] -= 1;
    out.add_term(ne, c * ExactScalar(e[var]));
  }
  return out;
}

Poly Poly::antiderivative(int var) const {
  if (var < 0 || var >= nvars_)
    throw std::invalid_argument("Poly::antiderivative: index out of range");
  Poly out(nvars_);
  for (const auto& [e, c] : terms_) {
    Exps ne = e;
    ne[var] += 1;
    out.add_term(ne, c.divided_by(Int(ne[var])));
  }
  return out;
}

Poly Poly::substitute(int var, const Poly& replacement) const {
  if (var < 0 || var >= nvars_) throw std::invalid_argument("Poly::substitute: index out of range");
  if (replacement.nvars_ != nvars_)
    throw std::invalid_argument("Poly::substitute: replacement variable-count mismatch");
  Poly out(nvars_);
  std::vector<Poly> powers;  // powers[k] = replacement^k
  powers.push_back(Poly::constant(nvars_, ExactScalar(1)));
  for (const auto& [e, c] : terms_) {
    int k = e[var];
    while (static_cast<int>(powers.size()) <= k) powers.push_back(powers.back() * replacement);
    Exps rest = e;
    rest[var] = 0;
    out += Poly::monomial(nvars_, std::move(rest), c) * powers[k];
  }
  return out;
}

Poly Poly::substitute(int var, const ExactScalar& value) const {
  if (var < 0 || var >= nvars_) throw std::invalid_argument("Poly::substitute: index out of range");
  Poly out(nvars_);
  std::vector<ExactScalar> powers{ExactScalar(1)};
  Exps ne(nvars_);
  for (const auto& [e, c] : terms_) {
    int k = e[var];
    while (static_cast<int>(powers.size()) <= k) powers.push_back(powers.back() * value);
    ne = e;
    ne[var] = 0;
    out.add_term(ne, c * powers[k]);
  }
  return out;
}

Poly Poly::compose(const std::vector<Poly>& images) const {
  if (static_cast<int>(images.size()) != nvars_)
    throw std::invalid_argument("Poly::compose: need one image per variable");
  int m = images.empty() ? 0 : images[0].nvars_;
  for (const Poly& img : images)
    if (img.nvars_ != m) throw std::invalid_argument("Poly::compose: images disagree on variable count");
  Poly out(m);
  // Cache powers of each image.
  std::vector<std::vector<Poly>> powers(images.size());
  for (size_t j = 0; j < images.size(); ++j) powers[j].push_back(Poly::constant(m, ExactScalar(1)));
  for (const auto& [e, c] : terms_) {
    Poly term = Poly::constant(m, c);
    for (int j = 0; j < nvars_; ++j) {
      int k = e[j];
      if (k == 0) continue;
      while (static_cast<int>(powers[j].size()) <= k) powers[j].push_back(powers[j].back() * images[j]);
      term = term * powers[j][k];
    }
    out += term;
  }
  return out;
}

Poly Poly::remap(int new_nvars, const std::vector<int>& where) const {
  if (static_cast<int>(where.size()) != nvars_)
    throw std::invalid_argument("Poly::remap: need one target slot per variable");
  for (int w : where)
    if (w < 0 || w >= new_nvars) throw std::invalid_argument("Poly::remap: target slot out of range");
  Poly out(new_nvars);
  Exps ne(new_nvars);
  for (const auto& [e, c] : terms_) {
    std::fill(ne.begin(), ne.end(), 0);
    for (int i = 0; i < nvars_; ++i) ne[where[i]] += e[i];
    out.add_term(ne, c);
  }
  return out;
}

ExactScalar Poly::eval(std::span<const ExactScalar> x) const {
  if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("Poly::eval: point length mismatch");
  ExactScalar acc(0);
  for (const auto& [e, c] : terms_) {
    ExactScalar term = c;
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) term *= x[i];
    acc += term;
  }
  return acc;
}

std::complex<double> Poly::eval(std::span<const std::complex<double>> x) const {
  if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("Poly::eval: point length mismatch");
  std::complex<double> acc(0.0, 0.0);
  for (const auto& [e, c] : terms_) {
    std::complex<double> term = c.to_complex();
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) term *= x[i];
    acc += term;
  }
  return acc;
}

int Poly::degree(int var) const {
  if (var < 0 || var >= nvars_) throw std::invalid_argument("Poly::degree: index out of range");
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

int Poly::total_degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int t = 0;
    for (int v : e) t += v;
    d = std::max(d, t);
  }
  return d;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += "(" + c.str() + ")";
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      out += " x" + std::to_string(i);
      if (e[i] > 1) out += "^" + std::to_string(e[i]);
    }
  }
  return out;
}

CompiledPoly compile(const Poly& p) {
  CompiledPoly out;
  out.nvars = p.nvars();
  out.terms.reserve(p.terms().size());
  for (const auto& [e, c] : p.terms()) out.terms.push_back({c.to_complex(), e});
  return out;
}

std::complex<double> CompiledPoly::eval(std::span<const double> x) const {
  std::complex<double> acc(0.0, 0.0);
  for (const Term& t : terms) {
    double mono = 1.0;
    for (int i = 0; i < nvars; ++i) {
      double b = x[i];
      for (int k = 0; k < t.exps[i]; ++k) mono *= b;
    }
    acc += t.c * mono;
  }
  return acc;
}

std::complex<double> CompiledPoly::eval(std::span<const std::complex<double>> x) const {
  std::complex<double> acc(0.0, 0.0);
  for (const Term& t : terms) {
    std::complex<double> mono(1.0, 0.0);
    for (int i = 0; i < nvars; ++i) {
      for (int k = 0; k < t.exps[i]; ++k) mono *= x[i];
    }
    acc += t.c * mono;
  }
  return acc;
}

}  // namespace memint
