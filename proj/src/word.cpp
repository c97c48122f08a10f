#include "auf/word.hpp"

#include <bit>
#include <cmath>

namespace auf {

namespace {

std::uint64_t low_mask(int k) { return k >= 64 ? ~0ULL : ((1ULL << k) - 1ULL); }

}  // namespace

Word Word::from_bits(std::uint64_t bits, int length) {
  if (length < 0 || length > kMaxLength) {
    fail(ErrorKind::InvalidArgument, "word length " + std::to_string(length) + " out of range");
  }
  Word w;
  w.bits_ = bits & low_mask(length);
  w.len_ = length;
  return w;
}

Word Word::parse(std::string_view text) {
  if (text == "e" || text == "E" || text.empty()) return Word{};
  Word w;
  for (char c : text) {
    switch (c) {
      case 'a':
      case 'A':
        w = w.append(Letter::A);
        break;
      case 'b':
      case 'B':
        w = w.append(Letter::B);
        break;
      default:
        fail(ErrorKind::InvalidArgument, "invalid letter '" + std::string(1, c) + "' in word");
    }
  }
  return w;
}

std::string Word::str() const {
  if (len_ == 0) return "e";
  std::string out(static_cast<std::size_t>(len_), 'a');
  for (int i = 0; i < len_; ++i) {
    if (at(i) == Letter::B) out[static_cast<std::size_t>(i)] = 'b';
  }
  return out;
}

Word Word::prepend(Letter l) const {
  return from_bits(bits_ | (static_cast<std::uint64_t>(l) << len_), len_ + 1);
}

Word Word::append(Letter l) const {
  if (len_ + 1 > kMaxLength) fail(ErrorKind::InvalidArgument, "word too long");
  return from_bits((bits_ << 1) | static_cast<std::uint64_t>(l), len_ + 1);
}

Word Word::concat(const Word& right) const {
  if (len_ + right.len_ > kMaxLength) fail(ErrorKind::InvalidArgument, "word too long");
  return from_bits((bits_ << right.len_) | right.bits_, len_ + right.len_);
}

Word Word::prefix(int k) const {
  if (k < 0 || k > len_) fail(ErrorKind::InvalidArgument, "prefix length out of range");
  return from_bits(bits_ >> (len_ - k), k);
}

Word Word::suffix(int k) const {
  if (k < 0 || k > len_) fail(ErrorKind::InvalidArgument, "suffix length out of range");
  return from_bits(bits_, k);
}

bool Word::starts_with(const Word& w) const noexcept {
  return w.len_ <= len_ && (bits_ >> (len_ - w.len_)) == w.bits_;
}

bool Word::ends_with(const Word& w) const noexcept {
  return w.len_ <= len_ && (bits_ & low_mask(w.len_)) == w.bits_;
}

Word Word::bar() const {
  // Reversal followed by complementing every letter.
  std::uint64_t out = 0;
  for (int i = 0; i < len_; ++i) out |= (((bits_ >> i) & 1ULL) ^ 1ULL) << (len_ - 1 - i);
  return from_bits(out, len_);
}

QParams::QParams(double q) : q_(q) {
  if (!(q > 0.0 && q < 1.0)) {
    fail(ErrorKind::InvalidArgument, "q must lie strictly between 0 and 1");
  }
}

double qnumber(int n, QParams qp) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "qnumber requires n >= 1");
  const double q = qp.q();
  const double lq = std::log(q);
  // q^{1-n} (1 - q^{2n}) / (1 - q^2)
  return std::exp((1 - n) * lq) * (std::expm1(2.0 * n * lq) / std::expm1(2.0 * lq));
}

double qbinom(int n, int k, QParams qp) {
  if (n < 0 || k < 0 || k > n) fail(ErrorKind::InvalidArgument, "qbinom requires 0 <= k <= n");
  const double lq = std::log(qp.q());
  double log_value = -static_cast<double>(k) * (n - k) * lq;
  for (int i = 0; i < k; ++i) {
    log_value += std::log(std::expm1(2.0 * (n - i) * lq) / std::expm1(2.0 * (k - i) * lq));
  }
  return std::exp(log_value);
}

std::vector<Word> indecomposable_factors(const Word& w) {
  std::vector<Word> out;
  int start = 0;
  for (int i = 1; i <= w.length(); ++i) {
    if (i == w.length() || w.at(i) == w.at(i - 1)) {
      out.push_back(w.drop_front(start).prefix(i - start));
      start = i;
    }
  }
  return out;
}

double qdim(const Word& w, QParams q) {
  double d = 1.0;
  for (const Word& f : indecomposable_factors(w)) d *= qnumber(f.length() + 1, q);
  return d;
}

std::uint64_t classical_dim(const Word& w) { return fusion_dim(w, 2); }

std::uint64_t fusion_dim(const Word& w, int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "fusion_dim requires n >= 1");
  std::uint64_t d = 1;
  for (const Word& f : indecomposable_factors(w)) {
    // d_{k+1} = n d_k - d_{k-1}: alternating word tensored with the next letter.
    std::int64_t prev = 1;
    std::int64_t cur = n;
    for (int k = 1; k < f.length(); ++k) {
      const std::int64_t next = n * cur - prev;
      prev = cur;
      cur = next;
    }
    d *= static_cast<std::uint64_t>(cur);
  }
  return d;
}

int common_suffix_length(const Word& s, const Word& t) noexcept {
  const int m = std::min(s.length(), t.length());
  const std::uint64_t diff = (s.bits() ^ t.bits()) & low_mask(m);
  if (diff == 0) return m;
  return std::countr_zero(diff);
}

int tree_distance(const Word& s, const Word& t) noexcept {
  return s.length() + t.length() - 2 * common_suffix_length(s, t);
}

std::vector<Word> geodesic(const Word& s, const Word& t) {
  const int c = common_suffix_length(s, t);
  std::vector<Word> path;
  path.reserve(static_cast<std::size_t>(s.length() + t.length() - 2 * c + 1));
  for (int k = s.length(); k >= c; --k) path.push_back(s.suffix(k));
  for (int k = c + 1; k <= t.length(); ++k) path.push_back(t.suffix(k));
  return path;
}

Domain::Domain(Word suffix, int radius) : suffix_(suffix), radius_(radius), size_(0) {
  if (radius < 0) fail(ErrorKind::InvalidArgument, "radius must be nonnegative");
  if (radius > kMaxBallRadius) {
    fail(ErrorKind::ResourceCap,
         "ball radius " + std::to_string(radius) + " exceeds the hard cap " + std::to_string(kMaxBallRadius));
  }
  const int depth = radius - suffix.length();
  size_ = depth < 0 ? 0 : static_cast<std::size_t>((1ULL << (depth + 1)) - 1ULL);
}

bool Domain::contains(const Word& w) const noexcept {
  return w.length() <= radius_ && w.ends_with(suffix_);
}

std::optional<std::size_t> Domain::index_of(const Word& w) const noexcept {
  if (!contains(w)) return std::nullopt;
  const int ulen = w.length() - suffix_.length();
  const std::uint64_t u = w.bits() >> suffix_.length();
  return static_cast<std::size_t>(((1ULL << ulen) - 1ULL) + u);
}

Word Domain::word_at(std::size_t i) const {
  if (i >= size_) fail(ErrorKind::InvalidArgument, "domain index out of range");
  int ulen = 0;
  while (i >= ((1ULL << (ulen + 1)) - 1ULL)) ++ulen;
  const std::uint64_t u = i - ((1ULL << ulen) - 1ULL);
  return Word::from_bits(u, ulen).concat(suffix_);
}

std::vector<Word> Domain::words() const {
  std::vector<Word> out;
  out.reserve(size_);
  const int depth = radius_ - suffix_.length();
  for (int len = 0; len <= depth; ++len) {
    for (std::uint64_t u = 0; u < (1ULL << len); ++u) out.push_back(Word::from_bits(u, len).concat(suffix_));
  }
  return out;
}

int Domain::distance_to_exterior(const Word& w) const noexcept {
  int d = radius_ + 1 - w.length();
  if (!suffix_.empty()) d = std::min(d, w.length() - suffix_.length() + 1);
  return d;
}

std::vector<Word> ball(int radius) { return Domain::ball(radius).words(); }

std::vector<Word> branch(const Word& x, int radius) { return Domain::branch(x, radius).words(); }

}  // namespace auf
