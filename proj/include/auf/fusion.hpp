#pragma once

// Fusion rules, finitely supported measures on words, and the classical
// transition matrix p_mu(s,t) restricted to a finite tree domain.

#include <atomic>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "auf/word.hpp"

namespace auf {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Irreducible components of x (tensor) y: all x0*y0 with x = x0 z, y = bar(z) y0,
/// ordered by increasing |z|.
std::vector<Word> fuse(const Word& x, const Word& y);

/// 1 if t occurs in r (tensor) s, else 0. The decomposition is multiplicity-free.
int multiplicity(const Word& t, const Word& r, const Word& s);

/// Finitely supported probability measure on words.
class Measure {
 public:
  struct Atom {
    Word word;
    double weight;
  };

  /// Throws Error(Config, "measure not normalized") unless the weights sum to 1.
  explicit Measure(std::vector<Atom> atoms);
  Measure(const Measure& other);
  Measure& operator=(const Measure& other);

  static Measure delta(const Word& w) { return Measure({{w, 1.0}}); }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  double weight(const Word& w) const noexcept;
  /// Largest word length in the support (the range bound S).
  int range() const noexcept;
  /// mu-check: r -> mu(bar r).
  Measure dual() const;
  bool is_symmetric() const;

  /// Cached result of the last is_generating() call: -1 unknown, 0 no, 1 yes.
  int generating_state() const noexcept { return generating_.load(); }
  void cache_generating(bool value) const noexcept { generating_.store(value ? 1 : 0); }

 private:
  std::vector<Atom> atoms_;
  mutable std::atomic<int> generating_{-1};
};

/// p_mu(s,t) = sum_r mu(r) m^t_{rs} dim_q(t) / (dim_q(r) dim_q(s)).
double transition_prob(const Measure& mu, const Word& s, const Word& t, QParams q);

/// A real matrix on a tree domain with finite range; used for P, P_{Delta_x} and Q.
struct TransitionMatrix {
  Domain domain;
  SparseRowMatrix entries;
  int range = 0;
  QParams q;
  /// dim_q of each domain word, in domain order.
  std::vector<double> qdims;

  std::size_t size() const noexcept { return domain.size(); }
  double at(const Word& s, const Word& t) const;
  std::vector<double> row_sums() const;
  /// Haar weights m(x) = dim_q(x)^2.
  std::vector<double> haar_weights() const;
};

/// P_mu restricted to `domain`; mass that leaves the domain is killed.
TransitionMatrix build_transition_matrix(const Measure& mu, const Domain& domain, QParams q);

/// Restriction of a matrix to a subdomain (entries leaving the subdomain are dropped).
TransitionMatrix restrict_to(const TransitionMatrix& m, const Domain& sub);

/// Largest |p_{mu-check}(s,t) - dim_q(t)^2/dim_q(s)^2 p_mu(t,s)| over pairs in the domain.
double dual_audit(const Measure& mu, const Domain& domain, QParams q);

/// Breadth-first reachability inside ball(radius): every word reachable from e and back.
bool is_generating(const Measure& mu, int radius);

/// sum_r mu(r) classical_dim(r) / dim_q(r); an upper bound for the l^2(m) norm of P.
double norm_upper_bound(const Measure& mu, QParams q);

/// Constants of uniform irreducibility: every positive step has probability >= delta0
/// and every tree edge is crossed by a positive path of at most k_steps steps.
struct IrreducibilityWitness {
  double delta0 = 0.0;
  int k_steps = 0;
};

/// Computes the witness from interior rows of the matrix.
IrreducibilityWitness irreducibility_witness(const TransitionMatrix& p);
/// True if every interior tree edge of the domain is crossed within k_steps steps of
/// probability >= delta0.
bool verify_witness(const TransitionMatrix& p, const IrreducibilityWitness& w);

}  // namespace auf
