#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "auf/perturbed.hpp"
#include "gen.hpp"

using auf::BranchContext;
using auf::IntertwinerEngine;
using auf::ModelConfig;
using auf::Word;

namespace {

Word w(const char* s) { return Word::parse(s); }

std::filesystem::path temp_file(const char* name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST_CASE("branch context") {
  const auto c = BranchContext::make(w("a"), 6);
  CHECK(c.y == w("ba"));
  CHECK(c.in_omega(w("aba")));
  CHECK_FALSE(c.in_omega(w("ab")));
  CHECK_THROWS_AS(BranchContext::make(Word{}, 4), auf::Error);
  CHECK_THROWS_AS(BranchContext::make(w("aa"), 1), auf::Error);
  CHECK(auf::max_q_radius(w("a"), 1, 10) == 7);
}

TEST_CASE("q-check with u = e is the identity") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.5));
  const auto c = BranchContext::make(w("a"), 6);
  CHECK(auf::qhat_entry(Word{}, w("ba"), w("ba"), c, eng) == 1.0);
  CHECK(auf::qhat_entry(Word{}, w("ba"), w("aa"), c, eng) == 0.0);
  // t not in u (x) s.
  CHECK(auf::qhat_entry(w("a"), w("a"), w("aba"), c, eng) == 0.0);
  CHECK_THROWS_AS(auf::qhat_entry(w("a"), w("b"), w("ab"), c, eng), auf::Error);
}

TEST_CASE("q-check agrees with the partial-trace oracle (property)") {
  for (double qv : {0.3, 0.5, 0.7}) {
    const IntertwinerEngine eng(ModelConfig::from_q(qv, 12));
    const auto c = BranchContext::make(w("a"), 6);
    const auto o = auf::qhat_partial_trace(w("a"), w("a"), w("aa"), c, eng);
    CHECK(o.residual < 1e-9);
    CHECK(auf::qhat_entry(w("a"), w("a"), w("aa"), c, eng) == doctest::Approx(o.value).epsilon(1e-9));
    int checked = 0;
    while (checked < 25) {
      const Word u = gen::word(2);
      const Word s = gen::word(3).concat(w("a"));
      if (u.empty()) continue;
      for (const Word& t : auf::fuse(u, s)) {
        if (!t.ends_with(c.z) || 2 * u.length() + s.length() + 2 > 12) continue;
        const auto r = auf::qhat_partial_trace(u, s, t, c, eng);
        CHECK(r.residual < 1e-9);
        CHECK(std::abs(auf::qhat_entry(u, s, t, c, eng) - r.value) < 1e-9);
        ++checked;
      }
    }
  }
}

TEST_CASE("Q for mu = delta_e is the identity") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.5));
  const auto c = BranchContext::make(w("ab"), 5);
  const auto m = auf::q_matrix(auf::Measure::delta(Word{}), c, eng);
  const Eigen::MatrixXd q = Eigen::MatrixXd(m.q.entries);
  CHECK(q.isApprox(Eigen::MatrixXd::Identity(q.rows(), q.cols())));
}

TEST_CASE("Q is dominated by P") {
  for (double qv : {0.3, 0.5, 0.7}) {
    const IntertwinerEngine eng(ModelConfig::from_q(qv));
    for (const auto& mu : {gen::half_ab(), gen::range_two()}) {
      const auto c = BranchContext::make(w("a"), auf::max_q_radius(w("a"), mu.range(), 10));
      const auto m = auf::q_matrix(mu, c, eng);
      const auto d = auf::domination_check(m);
      CHECK(d.excess <= 1e-12);
      CHECK(d.pattern_violations == 0);
      // Serial assembly gives the same entries.
      const auto s = auf::q_matrix(mu, c, eng, nullptr, false);
      CHECK((Eigen::MatrixXd(m.q.entries) - Eigen::MatrixXd(s.q.entries)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("q_matrix lists entries beyond the tensor cap") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.5, 5));
  const auto c = BranchContext::make(w("a"), 6);
  try {
    auf::q_matrix(gen::half_ab(), c, eng);
    FAIL("expected ResourceCap");
  } catch (const auf::Error& e) {
    CHECK(e.kind() == auf::ErrorKind::ResourceCap);
    CHECK(std::string(e.what()).find("exceed tensorCap 5") != std::string::npos);
  }
}

TEST_CASE("decay and gdif audits") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.5));
  const auto c = BranchContext::make(w("a"), 7);
  auto m = auf::q_matrix(gen::half_ab(), c, eng);
  const auto d = auf::decay_audit(m, 1, 5);
  CHECK(d.lengths.size() == 5);
  CHECK(d.fit.rate < 0.0);
  CHECK(auf::envelope_ratio({1, 2, 3, 4, 5}, d.max_gap, 0.5) <= 1.0 + 1e-9);

  const std::vector<Word> xs = {w("a"), w("aa"), w("ba"), w("aba")};
  const auto g = auf::gdif_audit(m, xs);
  CHECK(g.gaps.size() == 4);
  for (double x : g.gaps) CHECK(x > 0.0);
  CHECK(g.max_gap[1] < g.max_gap[0]);

  m.q = m.p;
  const auto g0 = auf::gdif_audit(m, xs);
  for (double x : g0.gaps) CHECK(x == 0.0);
  CHECK(g0.fit.points == 0);
  CHECK_THROWS_AS(auf::gdif_audit(m, {w("b"), w("ab")}), auf::Error);
}

TEST_CASE("K_Q is positive along a ray") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.5));
  const auto c = BranchContext::make(w("a"), 7);
  const auto m = auf::q_matrix(gen::half_ab(), c, eng);
  const auto gq = auf::green_q(m);
  const auto gp = auf::green_table(auf::build_transition_matrix(gen::half_ab(), auf::Domain::ball(10), m.q.q), Word{});
  const auto ray = auf::ray_points(auf::Ray{Word{}, w("a")}, 7);
  const std::vector<Word> ray_in(ray.begin() + 1, ray.end());
  const auto sums = auf::boundary_positivity_and_ratio(gq, gp, ray_in, {w("a"), w("aa"), w("aaa")});
  CHECK(sums.size() == 3);
  for (const auto& s : sums) {
    CHECK(s.kq_deep > 0.0);
    CHECK(s.cauchy_p);
    CHECK(s.cauchy_q);
    CHECK(s.ratio_near > 0.0);
    CHECK(s.ratio_near <= 1.0 + 1e-12);
  }
  CHECK(std::abs(1.0 - sums.back().ratio_near) < std::abs(1.0 - sums.front().ratio_near));
}

TEST_CASE("q-check store") {
  const auto path = temp_file("aufwalk_test_qhat.txt");
  {
    auf::QhatStore s(path);
    CHECK(s.size() == 0);
    CHECK_FALSE(s.lookup(7, w("a"), w("a"), w("aa"), w("a")));
    s.insert(7, w("a"), w("a"), w("aa"), w("a"), 0.1 + 0.2);
    s.insert(7, w("a"), w("a"), w("aa"), w("a"), 0.5);  // first value wins
    CHECK(s.misses() == 1);
  }
  {
    std::ofstream out(path, std::ios::app);
    out << "qhat v1 zz a a aa a 1\n";
    out << "garbage\n";
    out << auf::QhatStore::format_record(7, w("b"), w("ba"), w("a"), w("a"), -1.5) << " trailing\n";
  }
  auf::QhatStore s(path);
  CHECK(s.skipped_lines() == 3);
  CHECK(s.size() == 1);
  const auto v = s.lookup(7, w("a"), w("a"), w("aa"), w("a"));
  REQUIRE(v);
  CHECK(*v == 0.1 + 0.2);  // %.17g round-trips exactly
  CHECK_FALSE(s.lookup(8, w("a"), w("a"), w("aa"), w("a")));
  CHECK(s.hits() == 1);
  CHECK(s.misses() == 1);

  // Cached values are reused by q_matrix.
  const IntertwinerEngine eng(ModelConfig::from_q(0.5));
  const auto c = BranchContext::make(w("a"), 5);
  const auto mpath = temp_file("aufwalk_test_qhat2.txt");
  auf::QhatStore first(mpath);
  const auto m1 = auf::q_matrix(gen::half_ab(), c, eng, &first);
  auf::QhatStore second(mpath);
  const auto m2 = auf::q_matrix(gen::half_ab(), c, eng, &second);
  CHECK(second.misses() == 0);
  CHECK(second.hits() == m1.requests.size());
  CHECK((Eigen::MatrixXd(m1.q.entries) - Eigen::MatrixXd(m2.q.entries)).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
  std::filesystem::remove(mpath);
}
