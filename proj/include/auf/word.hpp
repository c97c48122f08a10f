#pragma once

// Words in the free monoid on {A, B}, the left-extension tree they form,
// and the q-arithmetic used by quantum dimensions.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "auf/error.hpp"

namespace auf {

enum class Letter : std::uint8_t { A = 0, B = 1 };

constexpr Letter conjugate(Letter l) noexcept { return l == Letter::A ? Letter::B : Letter::A; }

/// A word over {A, B} packed into a 64-bit mask.
///
/// The leftmost letter is the most significant bit, so comparing
/// (length, bits) gives length-lexicographic order with A < B. That order
/// fixes every matrix index layout in the library.
class Word {
 public:
  static constexpr int kMaxLength = 62;

  constexpr Word() = default;

  static Word from_bits(std::uint64_t bits, int length);
  static Word letter(Letter l) { return from_bits(static_cast<std::uint64_t>(l), 1); }
  /// Parses "e" (empty) or a string over {a, b} (either case).
  static Word parse(std::string_view text);

  /// Lowercase serialization; "e" for the empty word.
  std::string str() const;

  int length() const noexcept { return len_; }
  bool empty() const noexcept { return len_ == 0; }
  std::uint64_t bits() const noexcept { return bits_; }

  /// i-th letter from the left.
  Letter at(int i) const noexcept {
    return static_cast<Letter>((bits_ >> (len_ - 1 - i)) & 1U);
  }
  Letter first() const noexcept { return at(0); }
  Letter last() const noexcept { return at(len_ - 1); }

  Word prepend(Letter l) const;
  Word append(Letter l) const;
  Word concat(const Word& right) const;
  /// First k letters.
  Word prefix(int k) const;
  /// Last k letters.
  Word suffix(int k) const;
  /// Removes the first k letters.
  Word drop_front(int k) const { return suffix(len_ - k); }
  /// Removes the last k letters.
  Word drop_back(int k) const { return prefix(len_ - k); }

  bool starts_with(const Word& w) const noexcept;
  bool ends_with(const Word& w) const noexcept;

  /// Reverses the letter order and swaps A and B.
  Word bar() const;

  friend constexpr bool operator==(const Word&, const Word&) = default;
  friend constexpr std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (auto c = a.len_ <=> b.len_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

 private:
  std::uint64_t bits_ = 0;
  int len_ = 0;
};

inline Word involution(const Word& w) { return w.bar(); }

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    return std::hash<std::uint64_t>{}(w.bits() * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(w.length()));
  }
};

/// Deformation parameter, strictly inside (0, 1).
class QParams {
 public:
  explicit QParams(double q);
  double q() const noexcept { return q_; }

 private:
  double q_;
};

/// [n]_q = (q^n - q^-n) / (q - q^-1), evaluated without forming q^-n directly.
double qnumber(int n, QParams q);
/// Gaussian binomial coefficient via the product formula.
double qbinom(int n, int k, QParams q);

/// Splits w into maximal alternating factors (cuts between equal adjacent letters).
std::vector<Word> indecomposable_factors(const Word& w);

/// Quantum dimension: product of [|x_i|+1]_q over indecomposable factors.
double qdim(const Word& w, QParams q);
/// Dimension at q = 1, i.e. the product of (|x_i|+1).
std::uint64_t classical_dim(const Word& w);
/// Dimension of H_w when the fundamental representation is n-dimensional.
std::uint64_t fusion_dim(const Word& w, int n);

// Tree geometry: edges join words that differ by one letter on the left.

int common_suffix_length(const Word& s, const Word& t) noexcept;
int tree_distance(const Word& s, const Word& t) noexcept;
std::vector<Word> geodesic(const Word& s, const Word& t);

constexpr int kMaxBallRadius = 20;

/// Words ux with |ux| <= radius, for a fixed suffix x (x = e gives a ball).
///
/// Indexing is O(1): the position of ux is the length-lexicographic rank of u.
class Domain {
 public:
  Domain(Word suffix, int radius);

  static Domain ball(int radius) { return Domain(Word{}, radius); }
  static Domain branch(const Word& x, int radius) { return Domain(x, radius); }

  const Word& suffix() const noexcept { return suffix_; }
  int radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return size_; }

  bool contains(const Word& w) const noexcept;
  std::optional<std::size_t> index_of(const Word& w) const noexcept;
  Word word_at(std::size_t i) const;
  std::vector<Word> words() const;

  /// Distance from w to the nearest vertex outside the domain.
  int distance_to_exterior(const Word& w) const noexcept;
  /// Interior vertices sit strictly more than `range` steps from the exterior.
  bool is_interior(const Word& w, int range) const noexcept {
    return distance_to_exterior(w) > range;
  }

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  Word suffix_;
  int radius_;
  std::size_t size_;
};

std::vector<Word> ball(int radius);
std::vector<Word> branch(const Word& x, int radius);

}  // namespace auf
