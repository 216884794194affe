#include "memint/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

namespace memint {

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::Exact: return "exact";
    case Engine::Quadrature: return "quadrature";
    case Engine::MonteCarlo: return "montecarlo";
  }
  return "unknown";
}

std::optional<Engine> parse_engine(std::string_view name) {
  if (name == "exact") return Engine::Exact;
  if (name == "quadrature") return Engine::Quadrature;
  if (name == "montecarlo") return Engine::MonteCarlo;
  return std::nullopt;
}

void EngineConfig::validate() const {
  if (quad_order < 1) throw std::invalid_argument("quad_order: must be >= 1");
  if (subdivision_depth < 1) throw std::invalid_argument("subdivision_depth: must be >= 1");
  if (mc_samples < 1) throw std::invalid_argument("mc_samples: must be >= 1");
  if (engine == Engine::MonteCarlo && !seed)
    throw std::invalid_argument("seed: the montecarlo engine requires an explicit rng seed");
}

std::string value_string(const std::complex<double>& value,
                         const std::optional<ExactScalar>& exact) {
  if (exact) return exact->str();
  char buf[64];
  if (value.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.17g", value.real());
    return buf;
  }
  char ibuf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value.real());
  std::snprintf(ibuf, sizeof ibuf, "%.17g", std::abs(value.imag()));
  return std::string(buf) + (value.imag() < 0 ? " - " : " + ") + ibuf + " i";
}

std::string IntegralResult::value_str() const { return value_string(value, exact); }

// ---- shared helpers ---------------------------------------------------------

namespace {

// Compensated (Neumaier) accumulator with a fixed addition order.
struct Neumaier {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) comp += (sum - t) + x;
    else comp += (x - t) + sum;
    sum = t;
  }
  double total() const { return sum + comp; }
};

void validate_integral_inputs(const Membrane& g, const std::vector<DifferentialForm>& forms,
                              const ObserverPermutations& rho) {
  if (rho.observers() != g.n())
    throw std::invalid_argument("rho: observer count must equal the membrane dimension");
  if (rho.events() != static_cast<int>(forms.size()))
    throw std::invalid_argument("rho: event count must equal the number of forms");
  for (size_t i = 0; i < forms.size(); ++i) {
    const std::string slot = "forms[" + std::to_string(i) + "]";
    if (forms[i].degree() != g.n())
      throw std::invalid_argument(slot + ": degree must equal the membrane dimension");
    if (forms[i].ambient_dim() != g.d())
      throw std::invalid_argument(slot + ": ambient dimension must equal the membrane target dimension");
    if (forms[i].field() != g.field())
      throw std::invalid_argument(slot + ": field must match the membrane field");
  }
}

// All nondecreasing cell assignments for s chain positions over m cells,
// in lexicographic order.
std::vector<std::vector<int>> nondecreasing_assignments(int s, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(s, 0);
  while (true) {
    out.push_back(cur);
    int i = s - 1;
    while (i >= 0 && cur[i] == m - 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < s; ++j) cur[j] = cur[i];
  }
  return out;
}

// ---- exact engine ------------------------------------------------------------

// Integrates P over the per-observer chains alpha_k < t_(k) < ... given, for
// every observer and chain position, the enclosing interval and whether the
// next position shares it (in which case the next chain variable is the
// upper bound).
ExactScalar chain_integrate(Poly P, const ObserverPermutations& rho,
                            const std::vector<std::vector<std::pair<Rational, Rational>>>& bounds,
                            const std::vector<std::vector<bool>>& linked) {
  const int n = rho.observers(), s = rho.events();
  const int sn = n * s;
  for (int nu = 1; nu <= n; ++nu) {
    const Permutation& perm = rho.perm(nu);
    for (int k = 1; k <= s; ++k) {
      const int v = variable_index(n, nu, perm(k));
      P = P.antiderivative(v);
      Poly upper(sn);
      if (k < s && linked[nu - 1][k - 1]) {
        upper = P.substitute(v, Poly::variable(sn, variable_index(n, nu, perm(k + 1))));
      } else {
        upper = P.substitute(v, ExactScalar(bounds[nu - 1][k - 1].second));
      }
      const Poly lower = P.substitute(v, ExactScalar(bounds[nu - 1][k - 1].first));
      P = upper - lower;
    }
  }
  if (!P.is_constant()) throw std::logic_error("chain integration left free variables");
  return P.constant_value();
}

std::pair<Rational, Rational> rational_cell_bounds(const std::vector<Rational>& breaks, int idx) {
  const Rational lo = idx == 0 ? Rational(0) : breaks[idx - 1];
  const Rational hi = idx == static_cast<int>(breaks.size()) ? Rational(1) : breaks[idx];
  return {lo, hi};
}

ExactScalar exact_iterated_integral(const Membrane& g, const std::vector<DifferentialForm>& forms,
                                    const ObserverPermutations& rho) {
  const int n = rho.observers(), s = rho.events();
  const int sn = n * s;

  std::vector<PullbackDensity> densities;
  densities.reserve(forms.size());
  for (const DifferentialForm& w : forms) densities.push_back(pullback(g, w));

  // All events share the membrane's grid.
  const std::vector<std::vector<Rational>>& breaks = densities[0].exact_breaks();

  std::vector<Permutation> inverse_perms;
  inverse_perms.reserve(n);
  for (int nu = 1; nu <= n; ++nu) inverse_perms.push_back(rho.perm(nu).inverse());

  std::vector<std::vector<std::vector<int>>> per_observer_assignments;
  per_observer_assignments.reserve(n);
  for (int nu = 0; nu < n; ++nu) {
    per_observer_assignments.push_back(
        nondecreasing_assignments(s, static_cast<int>(breaks[nu].size()) + 1));
  }

  // Variable remap per event: density variable nu -> event-major slot.
  std::vector<std::vector<int>> where(s, std::vector<int>(n));
  for (int sigma = 1; sigma <= s; ++sigma)
    for (int nu = 1; nu <= n; ++nu) where[sigma - 1][nu - 1] = variable_index(n, nu, sigma);

  ExactScalar total(0);
  std::vector<int> pick(n, 0);  // which assignment each observer uses
  while (true) {
    // Cell of each event, then the product integrand.
    Poly integrand = Poly::constant(sn, ExactScalar(1));
    std::vector<int> cell(n);
    for (int sigma = 1; sigma <= s; ++sigma) {
      for (int nu = 0; nu < n; ++nu) {
        const int position = inverse_perms[nu](sigma);
        cell[nu] = per_observer_assignments[nu][pick[nu]][position - 1];
      }
      const PullbackDensity& f = densities[sigma - 1];
      integrand = integrand * f.cell_poly(f.flat_index(cell)).remap(sn, where[sigma - 1]);
    }
    if (!integrand.is_zero()) {
      std::vector<std::vector<std::pair<Rational, Rational>>> bounds(n);
      std::vector<std::vector<bool>> linked(n);
      for (int nu = 0; nu < n; ++nu) {
        const std::vector<int>& a = per_observer_assignments[nu][pick[nu]];
        bounds[nu].reserve(s);
        linked[nu].assign(s, false);
        for (int k = 0; k < s; ++k) {
          bounds[nu].push_back(rational_cell_bounds(breaks[nu], a[k]));
          if (k + 1 < s) linked[nu][k] = a[k + 1] == a[k];
        }
      }
      total += chain_integrate(std::move(integrand), rho, bounds, linked);
    }
    int nu = n - 1;
    while (nu >= 0 && ++pick[nu] == static_cast<int>(per_observer_assignments[nu].size()))
      pick[nu--] = 0;
    if (nu < 0) break;
  }
  if (wedge_sign(rho) < 0) total = -total;
  return total;
}

// ---- quadrature engine ---------------------------------------------------------

struct GaussRule {
  std::vector<double> nodes, weights;  // on (0,1)
};

// Gauss-Legendre nodes by Newton iteration on the Legendre recurrence.
GaussRule gauss_rule(int q) {
  GaussRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p = x;
      for (int k = 2; k <= q; ++k) {
        const double pk = ((2 * k - 1) * x * p - (k - 1) * p0) / k;
        p0 = p;
        p = pk;
      }
      dp = q * (x * p - p0) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // One more recurrence pass at the converged root for the weight.
    {
      double p0 = 1.0, p = x;
      for (int k = 2; k <= q; ++k) {
        const double pk = ((2 * k - 1) * x * p - (k - 1) * p0) / k;
        p0 = p;
        p = pk;
      }
      dp = q * (x * p - p0) / (x * x - 1.0);
    }
    rule.nodes[q - 1 - i] = 0.5 * (1.0 + x);  // descending x -> ascending node
    rule.weights[q - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// One quadrature node of an observer's chain: the s position values (already
// in ascending chain order) and the node weight.
struct ChainNode {
  std::vector<double> position_value;
  double weight = 1.0;
};

// Cell boundaries for one axis: {0} + breaks + {1}, each cell split into
// `depth` equal parts.
std::vector<double> subdivide_axis(const std::vector<double>& breaks, int depth) {
  std::vector<double> raw{0.0};
  for (double b : breaks)
    if (b > 0.0 && b < 1.0) raw.push_back(b);
  raw.push_back(1.0);
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  if (depth == 1) return raw;
  std::vector<double> out{0.0};
  for (size_t i = 0; i + 1 < raw.size(); ++i)
    for (int j = 1; j <= depth; ++j)
      out.push_back(raw[i] + (raw[i + 1] - raw[i]) * j / depth);
  return out;
}

// All chain nodes for a single observer: every nondecreasing cell assignment
// of the s positions, each carrying a tensor Duffy grid per run of equal
// cells, in fixed lexicographic order.
std::vector<ChainNode> observer_chain_nodes(int s, const std::vector<double>& boundaries,
                                            const GaussRule& rule) {
  const int m = static_cast<int>(boundaries.size()) - 1;
  const int q = static_cast<int>(rule.nodes.size());
  std::vector<ChainNode> out;
  for (const std::vector<int>& a : nondecreasing_assignments(s, m)) {
    // Split positions into runs of equal cells.
    struct Run {
      int begin, length, cell;
    };
    std::vector<Run> runs;
    for (int k = 0; k < s;) {
      int j = k;
      while (j < s && a[j] == a[k]) ++j;
      runs.push_back({k, j - k, a[k]});
      k = j;
    }
    // Odometer over the q^s node tuple, last position fastest.
    std::vector<int> idx(s, 0);
    while (true) {
      ChainNode node;
      node.position_value.resize(s);
      node.weight = 1.0;
      for (const Run& run : runs) {
        const double alpha = boundaries[run.cell], beta = boundaries[run.cell + 1];
        const int p = run.length;
        // Duffy: ascending chain values from the unit-cube tuple.
        double carry = 1.0;
        for (int l = p - 1; l >= 0; --l) {
          const double u = rule.nodes[idx[run.begin + l]];
          carry *= u;
          node.position_value[run.begin + l] = alpha + (beta - alpha) * carry;
          node.weight *= rule.weights[idx[run.begin + l]];
        }
        // Jacobian prod_{l=1}^{p-1} u_l^l (0-based within the run) and the
        // cell volume factor.
        for (int l = 1; l < p; ++l)
          node.weight *= std::pow(rule.nodes[idx[run.begin + l]], static_cast<double>(l));
        node.weight *= std::pow(beta - alpha, static_cast<double>(p));
      }
      out.push_back(std::move(node));
      int k = s - 1;
      while (k >= 0 && ++idx[k] == q) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  return out;
}

std::complex<double> quadrature_pass(const DensityFn& density, const ObserverPermutations& rho,
                                     int q, int depth,
                                     const std::vector<std::vector<double>>& axis_breaks,
                                     long long* evals) {
  const int n = rho.observers(), s = rho.events();
  const GaussRule rule = gauss_rule(q);

  std::vector<std::vector<ChainNode>> per_observer(n);
  for (int nu = 0; nu < n; ++nu)
    per_observer[nu] = observer_chain_nodes(s, subdivide_axis(axis_breaks[nu], depth), rule);

  // variable slot of observer nu's chain position k.
  std::vector<std::vector<int>> varmap(n, std::vector<int>(s));
  for (int nu = 1; nu <= n; ++nu)
    for (int k = 1; k <= s; ++k) varmap[nu - 1][k - 1] = variable_index(n, nu, rho.perm(nu)(k));

  std::vector<double> t(static_cast<size_t>(n) * s);
  Neumaier acc_re, acc_im;
  std::vector<size_t> pick(n, 0);
  while (true) {
    double w = 1.0;
    for (int nu = 0; nu < n; ++nu) {
      const ChainNode& node = per_observer[nu][pick[nu]];
      w *= node.weight;
      for (int k = 0; k < s; ++k) t[varmap[nu][k]] = node.position_value[k];
    }
    const std::complex<double> f = density(t);
    if (evals) ++*evals;
    acc_re.add(w * f.real());
    acc_im.add(w * f.imag());
    int nu = n - 1;
    while (nu >= 0 && ++pick[nu] == per_observer[nu].size()) pick[nu--] = 0;
    if (nu < 0) break;
  }
  return {acc_re.total(), acc_im.total()};
}

}  // namespace

ExactScalar exact_engine_integrate(const Poly& integrand, const ObserverPermutations& rho) {
  const int n = rho.observers(), s = rho.events();
  if (integrand.nvars() != n * s)
    throw std::invalid_argument("integrand: must use s*n variables in event-major order");
  if (s == 0) return integrand.constant_value();
  std::vector<std::vector<std::pair<Rational, Rational>>> bounds(
      n, std::vector<std::pair<Rational, Rational>>(s, {Rational(0), Rational(1)}));
  std::vector<std::vector<bool>> linked(n, std::vector<bool>(s, true));
  return chain_integrate(integrand, rho, bounds, linked);
}

IntegralResult quadrature_engine_integrate(const DensityFn& density,
                                           const ObserverPermutations& rho,
                                           const EngineConfig& cfg,
                                           const std::vector<std::vector<double>>& variable_breaks) {
  cfg.validate();
  const int n = rho.observers(), s = rho.events();
  if (n * s > 8)
    throw std::invalid_argument("quadrature supports at most 8 combined dimensions (s*n)");
  IntegralResult res;
  res.engine = Engine::Quadrature;
  if (s == 0) {
    const std::vector<double> empty;
    res.value = density(empty);
    res.points_used = 1;
    return res;
  }
  if (!variable_breaks.empty() && static_cast<int>(variable_breaks.size()) != n * s)
    throw std::invalid_argument("variable_breaks: needs one list per s*n variable");

  // Merge the per-variable kink lists into one list per observer axis.
  std::vector<std::vector<double>> axis_breaks(n);
  for (int nu = 1; nu <= n; ++nu) {
    std::vector<double> merged;
    if (!variable_breaks.empty()) {
      for (int sigma = 1; sigma <= s; ++sigma) {
        const auto& b = variable_breaks[variable_index(n, nu, sigma)];
        merged.insert(merged.end(), b.begin(), b.end());
      }
      std::sort(merged.begin(), merged.end());
      merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    }
    axis_breaks[nu - 1] = std::move(merged);
  }

  long long evals = 0;
  res.value = quadrature_pass(density, rho, cfg.quad_order, cfg.subdivision_depth, axis_breaks,
                              &evals);
  if (cfg.quad_order > 1) {
    const std::complex<double> coarse =
        quadrature_pass(density, rho, cfg.quad_order - 1, cfg.subdivision_depth, axis_breaks,
                        &evals);
    res.error_estimate = std::abs(res.value - coarse);
  }
  res.points_used = evals;
  return res;
}

IntegralResult montecarlo_oracle(const Membrane& g, const std::vector<DifferentialForm>& forms,
                                 const ObserverPermutations& rho, const EngineConfig& cfg) {
  validate_integral_inputs(g, forms, rho);
  if (!cfg.seed)
    throw std::invalid_argument("seed: the montecarlo engine requires an explicit rng seed");
  if (cfg.mc_samples < 1) throw std::invalid_argument("mc_samples: must be >= 1");
  const int n = rho.observers(), s = rho.events();

  IntegralResult res;
  res.engine = Engine::MonteCarlo;
  res.seed = cfg.seed;
  if (s == 0) {
    res.value = 1.0;
    res.exact = ExactScalar(1);
    return res;
  }

  std::vector<PullbackDensity> densities;
  densities.reserve(forms.size());
  for (const DifferentialForm& w : forms) densities.push_back(pullback(g, w));

  const DomainDescriptor domain(rho);
  const double sign = wedge_sign(rho);
  const long long N = cfg.mc_samples;
  std::mt19937_64 rng(*cfg.seed);

  std::vector<double> t(static_cast<size_t>(n) * s);
  Neumaier sum_re, sum_im, sq_re, sq_im;
  std::span<const double> tt(t);
  for (long long i = 0; i < N; ++i) {
    for (double& x : t) x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    std::complex<double> v = 0.0;
    if (indicator(domain, tt)) {
      v = sign;
      for (int sigma = 0; sigma < s; ++sigma)
        v *= densities[sigma].eval(tt.subspan(static_cast<size_t>(sigma) * n, n));
    }
    sum_re.add(v.real());
    sum_im.add(v.imag());
    sq_re.add(v.real() * v.real());
    sq_im.add(v.imag() * v.imag());
  }
  const double mean_re = sum_re.total() / static_cast<double>(N);
  const double mean_im = sum_im.total() / static_cast<double>(N);
  res.value = {mean_re, mean_im};
  res.points_used = N;
  if (N > 1) {
    const double var_re =
        std::max(0.0, (sq_re.total() - N * mean_re * mean_re) / static_cast<double>(N - 1));
    const double var_im =
        std::max(0.0, (sq_im.total() - N * mean_im * mean_im) / static_cast<double>(N - 1));
    res.error_estimate = std::sqrt((var_re + var_im) / static_cast<double>(N));
  }
  return res;
}

IntegralResult iterated_integral(const Membrane& g, const std::vector<DifferentialForm>& forms,
                                 const ObserverPermutations& rho, const EngineConfig& cfg) {
  validate_integral_inputs(g, forms, rho);
  cfg.validate();
  const int n = rho.observers(), s = rho.events();

  if (s == 0) {
    IntegralResult res;
    res.engine = cfg.engine;
    res.value = 1.0;
    res.exact = ExactScalar(1);
    return res;
  }

  switch (cfg.engine) {
    case Engine::Exact: {
      if (!g.polynomial())
        throw std::invalid_argument("exact engine requires a piecewise-polynomial membrane");
      for (size_t i = 0; i < forms.size(); ++i)
        if (!forms[i].is_polynomial())
          throw std::invalid_argument("exact engine requires polynomial coefficients in forms[" +
                                      std::to_string(i) + "]");
      IntegralResult res;
      res.engine = Engine::Exact;
      res.exact = exact_iterated_integral(g, forms, rho);
      res.value = res.exact->to_complex();
      return res;
    }
    case Engine::Quadrature: {
      std::vector<PullbackDensity> densities;
      densities.reserve(forms.size());
      for (const DifferentialForm& w : forms) densities.push_back(pullback(g, w));
      std::vector<std::vector<double>> variable_breaks(static_cast<size_t>(n) * s);
      for (int sigma = 1; sigma <= s; ++sigma)
        for (int nu = 1; nu <= n; ++nu)
          variable_breaks[variable_index(n, nu, sigma)] = densities[sigma - 1].breaks()[nu - 1];
      DensityFn density = [n, s, densities](std::span<const double> t) {
        std::complex<double> v = 1.0;
        for (int sigma = 0; sigma < s; ++sigma)
          v *= densities[sigma].eval(t.subspan(static_cast<size_t>(sigma) * n, n));
        return v;
      };
      IntegralResult res = quadrature_engine_integrate(density, rho, cfg, variable_breaks);
      const double sign = wedge_sign(rho);
      res.value *= sign;
      return res;
    }
    case Engine::MonteCarlo:
      return montecarlo_oracle(g, forms, rho, cfg);
  }
  throw std::logic_error("unreachable engine tag");
}

IntegralResult chain_iterated_integral(const MembraneChain& chain,
                                       const std::vector<DifferentialForm>& forms,
                                       const ObserverPermutations& rho, const EngineConfig& cfg) {
  IntegralResult total;
  total.engine = cfg.engine;
  if (cfg.engine == Engine::Exact) total.exact = ExactScalar(0);
  for (const auto& [coeff, membrane] : chain.terms) {
    const IntegralResult part = iterated_integral(membrane, forms, rho, cfg);
    total.value += static_cast<double>(coeff) * part.value;
    if (total.exact && part.exact) {
      ExactScalar scaled = *part.exact;
      scaled *= ExactScalar(Rational(coeff));
      *total.exact += scaled;
    } else {
      total.exact.reset();
    }
    total.error_estimate += std::abs(static_cast<double>(coeff)) * part.error_estimate;
    total.points_used += part.points_used;
    if (part.seed) total.seed = part.seed;
  }
  if (total.exact) total.value = total.exact->to_complex();
  return total;
}

}  // namespace memint
