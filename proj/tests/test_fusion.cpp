#include <doctest.h>

#include <cmath>

#include "auf/fusion.hpp"
#include "gen.hpp"

using auf::Measure;
using auf::QParams;
using auf::Word;

namespace {

Word w(const char* s) { return Word::parse(s); }

// Components of x (x) y by brute force over every split x = x0 c, y = c' y0 with c' = bar(c).
std::vector<Word> fuse_oracle(const Word& x, const Word& y) {
  std::vector<Word> out;
  for (int k = 0; k <= std::min(x.length(), y.length()); ++k) {
    const Word c = x.suffix(k);
    bool ok = true;
    for (int i = 0; i < k; ++i) ok = ok && c.at(k - 1 - i) != y.at(i);
    if (!ok) break;
    out.push_back(x.prefix(x.length() - k).concat(y.suffix(y.length() - k)));
  }
  return out;
}

double p_oracle(const Measure& mu, const Word& s, const Word& t, QParams q) {
  double p = 0.0;
  for (const auto& a : mu.atoms()) {
    for (const Word& c : fuse_oracle(a.word, s)) {
      if (c == t) p += a.weight * auf::qdim(t, q) / (auf::qdim(a.word, q) * auf::qdim(s, q));
    }
  }
  return p;
}

}  // namespace

TEST_CASE("fuse examples") {
  CHECK(auf::fuse(w("e"), w("ab")) == std::vector<Word>{w("ab")});
  CHECK(auf::fuse(w("a"), w("a")) == std::vector<Word>{w("aa")});
  CHECK(auf::fuse(w("a"), w("b")) == std::vector<Word>{w("ab"), w("e")});
}

TEST_CASE("fuse agrees with the brute-force oracle (property)") {
  for (int i = 0; i < 1000; ++i) {
    const Word x = gen::word(7);
    const Word y = gen::word(7);
    CHECK(auf::fuse(x, y) == fuse_oracle(x, y));
  }
}

TEST_CASE("multiplicity") {
  CHECK(auf::multiplicity(w("ab"), w("e"), w("ab")) == 1);
  CHECK(auf::multiplicity(w("aa"), w("a"), w("a")) == 1);
  CHECK(auf::multiplicity(w("e"), w("a"), w("a")) == 0);
  CHECK(auf::multiplicity(w("e"), w("a"), w("b")) == 1);
}

TEST_CASE("measure validation") {
  CHECK_THROWS_WITH_AS(Measure({{w("a"), 0.5}, {w("b"), 0.4}}), "measure not normalized", auf::Error);
  CHECK_THROWS_AS(Measure({{w("a"), 0.5}, {w("a"), 0.5}}), auf::Error);
  CHECK_THROWS_AS(Measure(std::vector<Measure::Atom>{}), auf::Error);
  const Measure mu({{w("ab"), 0.25}, {w("a"), 0.75}});
  CHECK(mu.range() == 2);
  CHECK(mu.weight(w("ab")) == 0.25);
  CHECK(mu.weight(w("b")) == 0.0);
  CHECK(mu.dual().weight(w("ab")) == 0.25);  // bar(ab) = ab
  CHECK(mu.dual().weight(w("b")) == 0.75);
  CHECK(gen::half_ab().is_symmetric());
  CHECK_FALSE(Measure::delta(w("a")).is_symmetric());
}

TEST_CASE("transition probability examples") {
  const QParams q(0.5);
  const double d2 = auf::qnumber(2, q);
  CHECK(auf::transition_prob(Measure::delta(w("a")), w("e"), w("a"), q) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(auf::transition_prob(gen::half_ab(), w("a"), w("e"), q) == doctest::Approx(1.0 / (2.0 * d2 * d2)).epsilon(1e-15));
}

TEST_CASE("transition probabilities match the direct formula (property)") {
  for (int i = 0; i < 40; ++i) {
    const Measure mu = gen::measure(gen::uniform(1, 3), 3);
    const QParams q(0.3 + 0.2 * gen::uniform(0, 2));
    for (int k = 0; k < 20; ++k) {
      const Word s = gen::word(5);
      const Word t = gen::word(8);
      CHECK(auf::transition_prob(mu, s, t, q) == doctest::Approx(p_oracle(mu, s, t, q)).epsilon(1e-13));
    }
  }
}

TEST_CASE("stochasticity on interior rows (property)") {
  for (int i = 0; i < 20; ++i) {
    const Measure mu = gen::measure(gen::uniform(1, 3), 3);
    const QParams q(0.3 + 0.2 * gen::uniform(0, 2));
    const auto p = auf::build_transition_matrix(mu, auf::Domain::ball(7), q);
    const auto sums = p.row_sums();
    for (std::size_t k = 0; k < sums.size(); ++k) {
      if (p.domain.is_interior(p.domain.word_at(k), p.range)) CHECK(std::abs(sums[k] - 1.0) < 1e-12);
      CHECK(sums[k] <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("matrix entries agree with transition_prob") {
  const QParams q(0.7);
  const Measure mu = gen::range_two();
  const auto p = auf::build_transition_matrix(mu, auf::Domain::ball(5), q);
  for (const Word& s : p.domain.words()) {
    for (const Word& t : p.domain.words()) {
      CHECK(p.at(s, t) == doctest::Approx(auf::transition_prob(mu, s, t, q)).epsilon(1e-14));
    }
  }
  const auto h = p.haar_weights();
  CHECK(h[*p.domain.index_of(w("ab"))] == doctest::Approx(std::pow(auf::qdim(w("ab"), q), 2)));
}

TEST_CASE("restrict_to keeps entries inside the subdomain") {
  const QParams q(0.5);
  const auto p = auf::build_transition_matrix(gen::half_ab(), auf::Domain::ball(6), q);
  const auto sub = auf::Domain::branch(w("a"), 6);
  const auto r = auf::restrict_to(p, sub);
  CHECK(r.size() == sub.size());
  for (const Word& s : sub.words()) {
    for (const Word& t : sub.words()) CHECK(r.at(s, t) == p.at(s, t));
  }
}

TEST_CASE("dual measure identity") {
  const QParams q(0.5);
  CHECK(auf::dual_audit(gen::half_ab(), auf::Domain::ball(6), q) < 1e-15);
  CHECK(auf::dual_audit(Measure::delta(w("a")), auf::Domain::ball(1), q) < 1e-15);
  for (int i = 0; i < 10; ++i) {
    const Measure mu = gen::measure(3, 2);
    CHECK(auf::dual_audit(mu, auf::Domain::ball(6), QParams(0.3 + 0.2 * gen::uniform(0, 2))) < 1e-12);
  }
}

TEST_CASE("is_generating") {
  CHECK(auf::is_generating(gen::half_ab(), 4));
  CHECK_FALSE(auf::is_generating(Measure::delta(w("aa")), 4));
  CHECK_FALSE(auf::is_generating(Measure::delta(w("e")), 4));
  CHECK(auf::is_generating(gen::range_two(), 4));
}

TEST_CASE("norm upper bound") {
  for (double qv : {0.3, 0.5, 0.7}) {
    const QParams q(qv);
    CHECK(auf::norm_upper_bound(Measure::delta(w("a")), q) == doctest::Approx(2.0 / (qv + 1.0 / qv)).epsilon(1e-15));
  }
  CHECK(auf::norm_upper_bound(Measure::delta(w("e")), QParams(0.5)) == 1.0);
  CHECK(auf::norm_upper_bound(gen::half_ab(), QParams(0.5)) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("irreducibility witness") {
  const QParams q(0.5);
  const auto p = auf::build_transition_matrix(gen::half_ab(), auf::Domain::ball(6), q);
  const auto wit = auf::irreducibility_witness(p);
  CHECK(wit.k_steps == 1);
  CHECK(wit.delta0 > 0.0);
  CHECK(auf::verify_witness(p, wit));
  auto stricter = wit;
  stricter.delta0 *= 1.5;
  CHECK_FALSE(auf::verify_witness(p, stricter));
  const auto p2 = auf::build_transition_matrix(gen::range_two(), auf::Domain::ball(8), q);
  const auto w2 = auf::irreducibility_witness(p2);
  CHECK(auf::verify_witness(p2, w2));
}
