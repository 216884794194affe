// Permutations, per-observer permutation tuples, shuffle families, and the
// ordered integration domains they index.
//
// Conventions used throughout the engine:
//   * Permutations are 1-indexed in one-line notation.
//   * A tuple rho = (rho_1, ..., rho_n) holds one permutation of the s events
//     per observer nu.
//   * Points of the cube I^{sn} are laid out event-major: the coordinate
//     t_nu^sigma sits at index (sigma-1)*n + (nu-1).  With identity rho the
//     integrand is already in canonical order, so wedge_sign(identity) = +1.
#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

namespace memint {

class Permutation {
 public:
  // One-line notation: images[i-1] = p(i).  Validates bijectivity.  An empty
  // vector is the (unique) permutation of zero letters, used for s = 0.
  explicit Permutation(std::vector<int> images);
  static Permutation identity(int s);

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[i - 1]; }  // 1-based
  const std::vector<int>& images() const { return images_; }

  Permutation inverse() const;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> images_;
};

// (p o q)(i) = p(q(i)).
Permutation compose(const Permutation& p, const Permutation& q);

// (-1)^(number of inversions).
int parity(const Permutation& p);

// All permutations of {1..s} in lexicographic order.
std::vector<Permutation> all_permutations(int s);

// The (s, s')-shuffles: permutations tau of s+s' letters with
// tau(1)<...<tau(s) and tau(s+1)<...<tau(s+s'), in lexicographic order.
std::vector<Permutation> shuffles(int s, int s_prime);

// Block-diagonal permutation acting as a on {1..s} and as b shifted onto
// {s+1..s+s'}.
Permutation block_permutation(const Permutation& a, const Permutation& b);

class ObserverPermutations {
 public:
  explicit ObserverPermutations(std::vector<Permutation> perms);
  static ObserverPermutations identity(int n, int s);

  int observers() const { return static_cast<int>(perms_.size()); }  // n
  int events() const { return perms_.empty() ? 0 : perms_[0].size(); }  // s
  const Permutation& perm(int nu) const { return perms_[nu - 1]; }  // 1-based
  const std::vector<Permutation>& perms() const { return perms_; }

  ObserverPermutations inverse() const;
  friend auto operator<=>(const ObserverPermutations&, const ObserverPermutations&) = default;
  std::string str() const;  // e.g. "((2,1),(1,2))"

 private:
  std::vector<Permutation> perms_;
};

// Index of the coordinate t_nu^sigma in the event-major layout (0-based).
int variable_index(int n, int nu, int sigma);

// For event sigma, the per-observer superscripts (rho_1(sigma), ...,
// rho_n(sigma)): the index bookkeeping that routes each observer's clock to
// its sigma-th event time.
std::vector<int> phi_index(int sigma, const ObserverPermutations& rho);

// Parity of the relabeling that carries the differential sequence
// (dt_1^{rho_1(1)}, ..., dt_n^{rho_n(1)}, dt_1^{rho_1(2)}, ...) to canonical
// event-major order.  Equals the product of the per-observer parities.
int wedge_sign(const ObserverPermutations& rho);

// The relabeling permutation itself (on sn letters, 1-based).
Permutation event_relabeling(const ObserverPermutations& rho);

// The ordered domain D_rho inside I^{sn}: for every observer nu the chain
// 0 < t_nu^{rho_nu(1)} < ... < t_nu^{rho_nu(s)} < 1 holds.
struct DomainDescriptor {
  int n = 0;
  int s = 0;
  ObserverPermutations rho;

  explicit DomainDescriptor(ObserverPermutations r)
      : n(r.observers()), s(r.events()), rho(std::move(r)) {}
};

// Strict membership test for D_rho; `point` is event-major of length s*n.
// Boundary ties return false (measure zero, keeps sampling unbiased).
bool indicator(const DomainDescriptor& d, std::span<const double> point);

// Membership criterion for the twisted shuffle family: sigma satisfies, for
// every observer, sigma(rho(1)) < ... < sigma(rho(s)) and
// sigma(s + rho'(1)) < ... < sigma(s + rho'(s')).
bool shuffle_criterion(const ObserverPermutations& sigma, const ObserverPermutations& rho,
                       const ObserverPermutations& rho_prime);

// The twisted shuffle family Sh(rho, rho'): all sigma in Per(s+s')^n passing
// shuffle_criterion, built constructively as the per-observer products
// { tau o block(rho^-1, rho'^-1) : tau an (s,s')-shuffle }.  Cardinality
// C(s+s', s)^n.  Deterministic order.
std::vector<ObserverPermutations> rho_shuffles(const ObserverPermutations& rho,
                                               const ObserverPermutations& rho_prime);

// Reference implementation by exhaustive filtering (test oracle for
// rho_shuffles; exponential, fine for small s+s').
std::vector<ObserverPermutations> rho_shuffles_bruteforce(const ObserverPermutations& rho,
                                                          const ObserverPermutations& rho_prime);

// Merge orders: all mu in Per(s+s')^n whose per-observer word, restricted to
// values <= s, spells rho, and restricted to values > s spells s + rho'.
// These are the orders a merged event set can exhibit when the first block
// arrives in order rho and the second in order rho'; the ordered domain
// D_{block} decomposes into exactly these pieces, which is what the shuffle
// identity sums over.  Elementwise, merge_orders(rho,rho') are the inverses
// of rho_shuffles(rho,rho').
std::vector<ObserverPermutations> merge_orders(const ObserverPermutations& rho,
                                               const ObserverPermutations& rho_prime);

}  // namespace memint
