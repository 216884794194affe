#include "memint/combinatorics.hpp"

#include <algorithm>
#include <stdexcept>

namespace memint {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  const int s = static_cast<int>(images_.size());
  std::vector<char> seen(s + 1, 0);
  for (int v : images_) {
    if (v < 1 || v > s || seen[v]) throw std::invalid_argument("Permutation: not a bijection of 1..s");
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int s) {
  std::vector<int> img(s);
  for (int i = 0; i < s; ++i) img[i] = i + 1;
  return Permutation(std::move(img));
}

Permutation Permutation::inverse() const {
  std::vector<int> img(images_.size());
  for (int i = 1; i <= size(); ++i) img[images_[i - 1] - 1] = i;
  return Permutation(std::move(img));
}

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) throw std::invalid_argument("compose: size mismatch");
  std::vector<int> img(p.size());
  for (int i = 1; i <= p.size(); ++i) img[i - 1] = p(q(i));
  return Permutation(std::move(img));
}

int parity(const Permutation& p) {
  int inversions = 0;
  const auto& img = p.images();
  for (size_t i = 0; i < img.size(); ++i)
    for (size_t j = i + 1; j < img.size(); ++j)
      if (img[i] > img[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

std::vector<Permutation> all_permutations(int s) {
  std::vector<int> img(s);
  for (int i = 0; i < s; ++i) img[i] = i + 1;
  std::vector<Permutation> out;
  do {
    out.push_back(Permutation(img));
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

std::vector<Permutation> shuffles(int s, int s_prime) {
  if (s < 0 || s_prime < 0) throw std::invalid_argument("shuffles: negative block size");
  const int total = s + s_prime;
  if (total == 0) return {Permutation({})};
  // Choose the positions (in value order) taken by the first block: a
  // combination of {1..total} of size s; the permutation sends 1..s to those
  // values in order and s+1..total to the complement in order.
  std::vector<int> choose(s);
  for (int i = 0; i < s; ++i) choose[i] = i + 1;
  std::vector<Permutation> out;
  while (true) {
    std::vector<int> img(total);
    std::vector<char> used(total + 1, 0);
    for (int i = 0; i < s; ++i) {
      img[i] = choose[i];
      used[choose[i]] = 1;
    }
    int next = 0;
    for (int v = 1; v <= total; ++v)
      if (!used[v]) img[s + next++] = v;
    out.push_back(Permutation(std::move(img)));
    // Advance the combination (lexicographic).
    if (s == 0) break;
    int i = s - 1;
    while (i >= 0 && choose[i] == total - (s - 1 - i)) --i;
    if (i < 0) break;
    ++choose[i];
    for (int j = i + 1; j < s; ++j) choose[j] = choose[j - 1] + 1;
  }
  return out;
}

Permutation block_permutation(const Permutation& a, const Permutation& b) {
  std::vector<int> img(a.size() + b.size());
  for (int i = 1; i <= a.size(); ++i) img[i - 1] = a(i);
  for (int i = 1; i <= b.size(); ++i) img[a.size() + i - 1] = a.size() + b(i);
  return Permutation(std::move(img));
}

ObserverPermutations::ObserverPermutations(std::vector<Permutation> perms) : perms_(std::move(perms)) {
  if (perms_.empty()) throw std::invalid_argument("ObserverPermutations: needs at least one observer");
  for (const Permutation& p : perms_)
    if (p.size() != perms_[0].size())
      throw std::invalid_argument("ObserverPermutations: observers disagree on event count");
}

ObserverPermutations ObserverPermutations::identity(int n, int s) {
  std::vector<Permutation> perms(n, Permutation::identity(s));
  return ObserverPermutations(std::move(perms));
}

ObserverPermutations ObserverPermutations::inverse() const {
  std::vector<Permutation> perms;
  perms.reserve(perms_.size());
  for (const Permutation& p : perms_) perms.push_back(p.inverse());
  return ObserverPermutations(std::move(perms));
}

std::string ObserverPermutations::str() const {
  std::string out = "(";
  for (size_t nu = 0; nu < perms_.size(); ++nu) {
    if (nu) out += ",";
    out += "(";
    for (int i = 1; i <= perms_[nu].size(); ++i) {
      if (i > 1) out += ",";
      out += std::to_string(perms_[nu](i));
    }
    out += ")";
  }
  return out + ")";
}

int variable_index(int n, int nu, int sigma) { return (sigma - 1) * n + (nu - 1); }

std::vector<int> phi_index(int sigma, const ObserverPermutations& rho) {
  if (sigma < 1 || sigma > rho.events()) throw std::invalid_argument("phi_index: event out of range");
  std::vector<int> out(rho.observers());
  for (int nu = 1; nu <= rho.observers(); ++nu) out[nu - 1] = rho.perm(nu)(sigma);
  return out;
}

Permutation event_relabeling(const ObserverPermutations& rho) {
  const int n = rho.observers(), s = rho.events();
  std::vector<int> img(n * s);
  for (int sigma = 1; sigma <= s; ++sigma)
    for (int nu = 1; nu <= n; ++nu)
      img[variable_index(n, nu, sigma)] = variable_index(n, nu, rho.perm(nu)(sigma)) + 1;
  return Permutation(std::move(img));
}

int wedge_sign(const ObserverPermutations& rho) { return parity(event_relabeling(rho)); }

bool indicator(const DomainDescriptor& d, std::span<const double> point) {
  if (static_cast<int>(point.size()) != d.n * d.s)
    throw std::invalid_argument("indicator: point length must be s*n");
  for (int nu = 1; nu <= d.n; ++nu) {
    double prev = 0.0;
    for (int k = 1; k <= d.s; ++k) {
      double t = point[variable_index(d.n, nu, d.rho.perm(nu)(k))];
      if (!(prev < t)) return false;
      prev = t;
    }
    if (!(prev < 1.0)) return false;
  }
  return true;
}

bool shuffle_criterion(const ObserverPermutations& sigma, const ObserverPermutations& rho,
                       const ObserverPermutations& rho_prime) {
  if (sigma.observers() != rho.observers() || sigma.observers() != rho_prime.observers())
    throw std::invalid_argument("shuffle_criterion: observer count mismatch");
  const int s = rho.events(), sp = rho_prime.events();
  if (sigma.events() != s + sp) throw std::invalid_argument("shuffle_criterion: event count mismatch");
  for (int nu = 1; nu <= rho.observers(); ++nu) {
    const Permutation& sg = sigma.perm(nu);
    const Permutation& r = rho.perm(nu);
    const Permutation& rp = rho_prime.perm(nu);
    for (int k = 1; k < s; ++k)
      if (!(sg(r(k)) < sg(r(k + 1)))) return false;
    for (int k = 1; k < sp; ++k)
      if (!(sg(s + rp(k)) < sg(s + rp(k + 1)))) return false;
  }
  return true;
}

namespace {

// Cartesian product over observers of per-observer permutation lists.
std::vector<ObserverPermutations> observer_product(
    const std::vector<std::vector<Permutation>>& per_observer) {
  std::vector<ObserverPermutations> out;
  const int n = static_cast<int>(per_observer.size());
  std::vector<size_t> idx(n, 0);
  while (true) {
    std::vector<Permutation> pick;
    pick.reserve(n);
    for (int nu = 0; nu < n; ++nu) pick.push_back(per_observer[nu][idx[nu]]);
    out.push_back(ObserverPermutations(std::move(pick)));
    int nu = n - 1;
    while (nu >= 0 && ++idx[nu] == per_observer[nu].size()) idx[nu--] = 0;
    if (nu < 0) break;
  }
  return out;
}

}  // namespace

std::vector<ObserverPermutations> rho_shuffles(const ObserverPermutations& rho,
                                               const ObserverPermutations& rho_prime) {
  if (rho.observers() != rho_prime.observers())
    throw std::invalid_argument("rho_shuffles: observer count mismatch");
  const int s = rho.events(), sp = rho_prime.events();
  const std::vector<Permutation> taus = shuffles(s, sp);
  std::vector<std::vector<Permutation>> per_observer(rho.observers());
  for (int nu = 1; nu <= rho.observers(); ++nu) {
    const Permutation twist = block_permutation(rho.perm(nu).inverse(), rho_prime.perm(nu).inverse());
    per_observer[nu - 1].reserve(taus.size());
    for (const Permutation& tau : taus) per_observer[nu - 1].push_back(compose(tau, twist));
  }
  return observer_product(per_observer);
}

std::vector<ObserverPermutations> rho_shuffles_bruteforce(const ObserverPermutations& rho,
                                                          const ObserverPermutations& rho_prime) {
  if (rho.observers() != rho_prime.observers())
    throw std::invalid_argument("rho_shuffles_bruteforce: observer count mismatch");
  const int total = rho.events() + rho_prime.events();
  const std::vector<Permutation> all = all_permutations(total);
  std::vector<std::vector<Permutation>> per_observer(rho.observers());
  for (int nu = 1; nu <= rho.observers(); ++nu) {
    ObserverPermutations r1(std::vector<Permutation>{rho.perm(nu)});
    ObserverPermutations r2(std::vector<Permutation>{rho_prime.perm(nu)});
    for (const Permutation& cand : all) {
      ObserverPermutations c(std::vector<Permutation>{cand});
      if (shuffle_criterion(c, r1, r2)) per_observer[nu - 1].push_back(cand);
    }
  }
  return observer_product(per_observer);
}

std::vector<ObserverPermutations> merge_orders(const ObserverPermutations& rho,
                                               const ObserverPermutations& rho_prime) {
  if (rho.observers() != rho_prime.observers())
    throw std::invalid_argument("merge_orders: observer count mismatch");
  const int s = rho.events(), sp = rho_prime.events();
  const std::vector<Permutation> taus = shuffles(s, sp);
  std::vector<std::vector<Permutation>> per_observer(rho.observers());
  for (int nu = 1; nu <= rho.observers(); ++nu) {
    const Permutation blk = block_permutation(rho.perm(nu), rho_prime.perm(nu));
    per_observer[nu - 1].reserve(taus.size());
    for (const Permutation& tau : taus) per_observer[nu - 1].push_back(compose(blk, tau.inverse()));
  }
  return observer_product(per_observer);
}

}  // namespace memint
