#include "auf/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

namespace auf {

std::vector<Word> fuse(const Word& x, const Word& y) {
  std::vector<Word> out;
  const int kmax = std::min(x.length(), y.length());
  for (int k = 0; k <= kmax; ++k) {
    const Word z = x.suffix(k);
    if (!y.starts_with(z.bar())) continue;
    out.push_back(x.drop_back(k).concat(y.drop_front(k)));
  }
  return out;
}

int multiplicity(const Word& t, const Word& r, const Word& s) {
  // Only |z| = (|r| + |s| - |t|) / 2 can produce t.
  const int twice = r.length() + s.length() - t.length();
  if (twice < 0 || twice % 2 != 0) return 0;
  const int k = twice / 2;
  if (k > r.length() || k > s.length()) return 0;
  if (!s.starts_with(r.suffix(k).bar())) return 0;
  return r.drop_back(k).concat(s.drop_front(k)) == t ? 1 : 0;
}

Measure::Measure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) fail(ErrorKind::Config, "measure has empty support");
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.word < b.word; });
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!(atoms_[i].weight > 0.0) || atoms_[i].weight > 1.0) {
      fail(ErrorKind::Config, "measure weight for " + atoms_[i].word.str() + " must lie in (0,1]");
    }
    if (i > 0 && atoms_[i].word == atoms_[i - 1].word) {
      fail(ErrorKind::Config, "measure lists " + atoms_[i].word.str() + " twice");
    }
    total += atoms_[i].weight;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorKind::Config, "measure not normalized");
}

Measure::Measure(const Measure& other) : atoms_(other.atoms_), generating_(other.generating_.load()) {}

Measure& Measure::operator=(const Measure& other) {
  atoms_ = other.atoms_;
  generating_.store(other.generating_.load());
  return *this;
}

double Measure::weight(const Word& w) const noexcept {
  for (const Atom& a : atoms_) {
    if (a.word == w) return a.weight;
  }
  return 0.0;
}

int Measure::range() const noexcept {
  int s = 0;
  for (const Atom& a : atoms_) s = std::max(s, a.word.length());
  return s;
}

Measure Measure::dual() const {
  std::vector<Atom> out;
  out.reserve(atoms_.size());
  for (const Atom& a : atoms_) out.push_back({a.word.bar(), a.weight});
  return Measure(std::move(out));
}

bool Measure::is_symmetric() const {
  for (const Atom& a : atoms_) {
    if (weight(a.word.bar()) != a.weight) return false;
  }
  return true;
}

double transition_prob(const Measure& mu, const Word& s, const Word& t, QParams q) {
  double p = 0.0;
  for (const auto& [r, w] : mu.atoms()) {
    if (multiplicity(t, r, s) == 0) continue;
    p += w * qdim(t, q) / (qdim(r, q) * qdim(s, q));
  }
  return p;
}

double TransitionMatrix::at(const Word& s, const Word& t) const {
  const auto i = domain.index_of(s);
  const auto j = domain.index_of(t);
  if (!i || !j) return 0.0;
  return entries.coeff(static_cast<int>(*i), static_cast<int>(*j));
}

std::vector<double> TransitionMatrix::row_sums() const {
  std::vector<double> sums(size(), 0.0);
  for (int i = 0; i < entries.outerSize(); ++i) {
    for (SparseRowMatrix::InnerIterator it(entries, i); it; ++it) sums[static_cast<std::size_t>(i)] += it.value();
  }
  return sums;
}

std::vector<double> TransitionMatrix::haar_weights() const {
  std::vector<double> m(qdims.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = qdims[i] * qdims[i];
  return m;
}

TransitionMatrix build_transition_matrix(const Measure& mu, const Domain& domain, QParams q) {
  const std::size_t n = domain.size();
  std::vector<double> qd(n);
  const std::vector<Word> words = domain.words();
  for (std::size_t i = 0; i < n; ++i) qd[i] = qdim(words[i], q);

  std::vector<double> rdim;
  for (const auto& a : mu.atoms()) rdim.push_back(qdim(a.word, q));

  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(n * mu.atoms().size() * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Word& s = words[i];
    for (std::size_t a = 0; a < mu.atoms().size(); ++a) {
      const auto& [r, w] = mu.atoms()[a];
      for (const Word& t : fuse(r, s)) {
        const auto j = domain.index_of(t);
        if (!j) continue;
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(*j), w * qd[*j] / (rdim[a] * qd[i]));
      }
    }
  }
  SparseRowMatrix m(static_cast<int>(n), static_cast<int>(n));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return TransitionMatrix{domain, std::move(m), mu.range(), q, std::move(qd)};
}

TransitionMatrix restrict_to(const TransitionMatrix& m, const Domain& sub) {
  const std::vector<Word> words = sub.words();
  std::vector<Eigen::Triplet<double, int>> triplets;
  std::vector<double> qd(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto src = m.domain.index_of(words[i]);
    if (!src) fail(ErrorKind::InvalidArgument, "restrict_to: " + words[i].str() + " outside the source domain");
    qd[i] = m.qdims[*src];
    for (SparseRowMatrix::InnerIterator it(m.entries, static_cast<int>(*src)); it; ++it) {
      const auto j = sub.index_of(m.domain.word_at(static_cast<std::size_t>(it.col())));
      if (j) triplets.emplace_back(static_cast<int>(i), static_cast<int>(*j), it.value());
    }
  }
  const int n = static_cast<int>(words.size());
  SparseRowMatrix e(n, n);
  e.setFromTriplets(triplets.begin(), triplets.end());
  e.makeCompressed();
  return TransitionMatrix{sub, std::move(e), m.range, m.q, std::move(qd)};
}

double dual_audit(const Measure& mu, const Domain& domain, QParams q) {
  const Measure check = mu.dual();
  const int range = mu.range();
  double worst = 0.0;
  for (const Word& s : domain.words()) {
    const double ds = qdim(s, q);
    // Every t within tree distance `range` of s, kept if it lies in the domain.
    for (int up = 0; up <= std::min(range, s.length()); ++up) {
      const Word base = s.drop_front(up);
      for (int down = 0; down + up <= range; ++down) {
        for (std::uint64_t u = 0; u < (1ULL << down); ++u) {
          const Word t = Word::from_bits(u, down).concat(base);
          if (down > 0 && up > 0 && t.at(down - 1) == s.at(up - 1)) continue;  // not a geodesic extension
          if (!domain.contains(t)) continue;
          const double dt = qdim(t, q);
          const double lhs = transition_prob(check, s, t, q);
          const double rhs = dt * dt / (ds * ds) * transition_prob(mu, t, s, q);
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      }
    }
  }
  return worst;
}

namespace {

// Reachability in the positive-step graph restricted to `domain`.
std::vector<char> reach(const Measure& mu, const Domain& domain, const Word& start, bool reverse) {
  std::vector<char> seen(domain.size(), 0);
  std::deque<Word> queue{start};
  seen[*domain.index_of(start)] = 1;
  const Measure walk = reverse ? mu.dual() : mu;
  while (!queue.empty()) {
    const Word s = queue.front();
    queue.pop_front();
    for (const auto& a : walk.atoms()) {
      // Reverse edges: t -> s with s in fuse(r, t) iff t in fuse(bar r, s).
      for (const Word& t : fuse(a.word, s)) {
        const auto j = domain.index_of(t);
        if (!j || seen[*j]) continue;
        seen[*j] = 1;
        queue.push_back(t);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_generating(const Measure& mu, int radius) {
  if (radius < mu.range()) fail(ErrorKind::InvalidArgument, "is_generating needs radius >= range of mu");
  const Domain domain = Domain::ball(radius);
  const auto fwd = reach(mu, domain, Word{}, false);
  const auto back = reach(mu, domain, Word{}, true);
  const bool ok = std::all_of(fwd.begin(), fwd.end(), [](char c) { return c != 0; }) &&
                  std::all_of(back.begin(), back.end(), [](char c) { return c != 0; });
  mu.cache_generating(ok);
  return ok;
}

double norm_upper_bound(const Measure& mu, QParams q) {
  double bound = 0.0;
  for (const auto& [r, w] : mu.atoms()) bound += w * static_cast<double>(classical_dim(r)) / qdim(r, q);
  return bound;
}

namespace {

std::vector<Word> tree_neighbors(const Word& s) {
  std::vector<Word> out;
  if (!s.empty()) out.push_back(s.drop_front(1));
  if (s.length() < Word::kMaxLength) {
    out.push_back(s.prepend(Letter::A));
    out.push_back(s.prepend(Letter::B));
  }
  return out;
}

// Fewest steps from s to t using entries >= threshold; -1 if not within max_steps.
int step_count(const TransitionMatrix& p, std::size_t s, std::size_t t, double threshold, int max_steps) {
  if (s == t) return 0;
  std::vector<int> depth(p.size(), -1);
  std::deque<std::size_t> queue{s};
  depth[s] = 0;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    if (depth[i] >= max_steps) continue;
    for (SparseRowMatrix::InnerIterator it(p.entries, static_cast<int>(i)); it; ++it) {
      if (!(it.value() >= threshold)) continue;
      const auto j = static_cast<std::size_t>(it.col());
      if (depth[j] >= 0) continue;
      depth[j] = depth[i] + 1;
      if (j == t) return depth[j];
      queue.push_back(j);
    }
  }
  return -1;
}

}  // namespace

IrreducibilityWitness irreducibility_witness(const TransitionMatrix& p) {
  IrreducibilityWitness w{1.0, 0};
  bool any = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Word s = p.domain.word_at(i);
    if (!p.domain.is_interior(s, p.range)) continue;
    for (SparseRowMatrix::InnerIterator it(p.entries, static_cast<int>(i)); it; ++it) {
      if (it.value() > 0.0) {
        w.delta0 = std::min(w.delta0, it.value());
        any = true;
      }
    }
    for (const Word& t : tree_neighbors(s)) {
      if (!p.domain.contains(t) || !p.domain.is_interior(t, p.range)) continue;
      const int k = step_count(p, i, *p.domain.index_of(t), 0.0, static_cast<int>(p.size()));
      if (k < 0) fail(ErrorKind::Numerical, "walk cannot cross edge " + s.str() + " -> " + t.str());
      w.k_steps = std::max(w.k_steps, k);
    }
  }
  if (!any) fail(ErrorKind::Numerical, "no positive interior transitions");
  return w;
}

bool verify_witness(const TransitionMatrix& p, const IrreducibilityWitness& w) {
  const double threshold = w.delta0 * (1.0 - 1e-12);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Word s = p.domain.word_at(i);
    if (!p.domain.is_interior(s, p.range)) continue;
    for (const Word& t : tree_neighbors(s)) {
      if (!p.domain.contains(t) || !p.domain.is_interior(t, p.range)) continue;
      if (step_count(p, i, *p.domain.index_of(t), threshold, w.k_steps) < 0) return false;
    }
  }
  return true;
}

}  // namespace auf
