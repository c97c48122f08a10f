#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "auf/fusion.hpp"
#include "auf/intertwiner.hpp"
#include "gen.hpp"

using auf::IntertwinerEngine;
using auf::ModelConfig;
using auf::QParams;
using auf::Word;

namespace {

Word w(const char* s) { return Word::parse(s); }

double top_singular(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// [n choose k]_q from the symmetric q-numbers, written out here rather than via qbinom.
double qbinom_direct(int n, int k, double q) {
  auto qn = [q](int m) { return (std::pow(q, -m) - std::pow(q, m)) / (1.0 / q - q); };
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v *= qn(n - k + i) / qn(i);
  return v;
}

bool alternating(const Word& x) {
  for (int i = 0; i + 1 < x.length(); ++i) {
    if (x.at(i) == x.at(i + 1)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("model configuration") {
  const auto m = ModelConfig::from_q(0.5);
  CHECK(m.n == 2);
  CHECK(m.q == 0.5);
  CHECK_THROWS_AS(ModelConfig::from_q(1.0), auf::Error);
  CHECK_THROWS_AS(ModelConfig::from_q(0.5, auf::kHardTensorCap + 1), auf::Error);
  // Tr(F*F) = Tr((F*F)^-1) fails for diag(1, 2).
  CHECK_THROWS_AS(ModelConfig::from_f_diag({1.0, 2.0}), auf::Error);
  const double s = std::sqrt(0.5);
  const auto f = ModelConfig::from_f_diag({s, 1.0 / s});
  CHECK(f.q == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.hash() != ModelConfig::from_q(0.3).hash());
  CHECK(m.hash() == ModelConfig::from_q(0.5).hash());
}

TEST_CASE("duality maps") {
  for (double qv : {0.3, 0.5, 0.7}) {
    const IntertwinerEngine eng(ModelConfig::from_q(qv));
    const auto d = auf::build_duality_maps(eng);
    CHECK(d.r_a.values.squaredNorm() == doctest::Approx(qv + 1.0 / qv).epsilon(1e-14));
    CHECK(d.rbar_a.values.squaredNorm() == doctest::Approx(qv + 1.0 / qv).epsilon(1e-14));
    CHECK(std::sqrt(d.r_a.values.squaredNorm()) == doctest::Approx(std::sqrt(eng.letter_qdim())));
    CHECK(auf::conjugate_equation_residual(eng) < 1e-12);
    CHECK(d.r_b.values == d.rbar_a.values);
  }
}

TEST_CASE("word projections") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.5));
  CHECK(auf::word_projection(w("a"), eng).values.isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(auf::word_projection(w("aa"), eng).values.isApprox(Eigen::MatrixXd::Identity(4, 4)));
  const auto ab = auf::word_projection(w("ab"), eng);
  CHECK(auf::numerical_rank(ab.values) == 3);
  CHECK((ab.values * ab.values - ab.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ab.values - ab.values.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  for (const Word& x : auf::ball(6)) {
    const auto p = auf::word_projection(x, eng);
    const auto d = auf::word_projection_direct(x, eng);
    CHECK((p.values - d.values).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(auf::numerical_rank(p.values) == auf::fusion_dim(x, 2));
    CHECK(eng.word_dim(x) == auf::fusion_dim(x, 2));
  }
}

TEST_CASE("inclusion V is the projection onto H_xy") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.7));
  for (int i = 0; i < 30; ++i) {
    const Word x = gen::word(3);
    const Word y = gen::word(3);
    const auto v = auf::inclusion_v(x, y, eng);
    const auto p = auf::word_projection(x.concat(y), eng);
    CHECK((v.values - p.values).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Vtilde norms") {
  for (double qv : {0.3, 0.5, 0.7}) {
    const IntertwinerEngine eng(ModelConfig::from_q(qv, 12));
    const QParams q(qv);
    // v = e: Vtilde is the inclusion.
    CHECK(auf::vtilde(w("ab"), Word{}, w("a"), eng).norm == doctest::Approx(1.0).epsilon(1e-12));
    for (const Word& v : auf::ball(4)) {
      if (v.empty()) continue;
      for (const Word& s : auf::ball(2)) {
        for (const Word& t : auf::ball(2)) {
          if (s.length() + v.length() + t.length() > 6) continue;
          const Word full = s.concat(v).concat(v.bar()).concat(t);
          if (full.length() > 12 || !alternating(full)) continue;
          const auto r = auf::vtilde(s, v, t, eng);
          // Norm of the dense operator on H_st, independent of the cached value.
          const double direct = top_singular(r.op.values * eng.word_basis(s.concat(t)));
          CHECK(r.norm == doctest::Approx(direct).epsilon(1e-10));
          CHECK(r.proportionality < 1e-9);
          const int ls = s.length(), lv = v.length(), lt = t.length();
          const double closed = std::sqrt(qbinom_direct(ls + lv + lt + 1, lv, qv) /
                                          (qbinom_direct(ls + lv, lv, qv) * qbinom_direct(lt + lv, lv, qv)));
          CHECK(r.norm == doctest::Approx(closed).epsilon(1e-8));
          CHECK(auf::vtilde_norm_closed_form(ls, lv, lt, q) == doctest::Approx(closed).epsilon(1e-12));
          CHECK(r.norm <= std::sqrt(auf::qdim(v, q)) * (1.0 + 1e-12));
          if (s.empty()) {
            CHECK(r.norm == doctest::Approx(std::sqrt(auf::qdim(v.bar().concat(t), q) / auf::qdim(t, q))).epsilon(1e-10));
          }
        }
      }
    }
  }
}

TEST_CASE("Vtilde scan") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.5, 12));
  const auto s = auf::vtilde_scan(eng, 6);
  CHECK(s.triples > 20);
  CHECK(s.max_relative_error < 1e-8);
  CHECK(s.c_max <= 1.0 + 1e-12);
  CHECK(s.c_min > 0.0);
}

TEST_CASE("categorical and weighted traces") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.5));
  const QParams q(0.5);
  for (const Word& x : auf::ball(5)) {
    const Eigen::Index dim = eng.ambient_dim(x.length());
    const auf::Intertwiner id{x, x, Eigen::MatrixXd::Identity(dim, dim)};
    CHECK(auf::categorical_trace(id, eng) == doctest::Approx(1.0).epsilon(1e-12));
    const auto p = auf::word_projection(x, eng);
    const double tr = auf::categorical_trace(p, eng);
    CHECK(tr == doctest::Approx(auf::weighted_trace(p, eng)).epsilon(1e-12));
    CHECK(tr * std::pow(eng.letter_qdim(), x.length()) == doctest::Approx(auf::qdim(x, q)).epsilon(1e-11));
  }
  // Random operators: both traces are linear functionals and must coincide.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(8, 8);
  for (Eigen::Index i = 0; i < 8; ++i) {
    for (Eigen::Index j = 0; j < 8; ++j) m(i, j) = gen::uniform(-100, 100) / 37.0;
  }
  const auf::Intertwiner t{w("aba"), w("aba"), m};
  CHECK(auf::categorical_trace(t, eng) == doctest::Approx(auf::weighted_trace(t, eng)).epsilon(1e-12));
}

TEST_CASE("defect audit") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.5, 12));
  for (const char* x : {"a", "ab", "aba", "bb"}) {
    CHECK(auf::defect_audit(w("a"), w(x), Word{}, w(x), eng).defect < 1e-12);
  }
  // Top component of x (x) ab with x = (ba)^k b: exponent grows by 2 per step, defect by q^2.
  std::vector<double> d;
  for (const char* x : {"b", "bab", "babab"}) {
    const Word xx = w(x);
    const auto r = auf::defect_audit(w("a"), xx, w("ab"), xx.concat(w("ab")), eng);
    CHECK(r.exponent == doctest::Approx((2.0 * xx.length() + 2.0 - 2.0) / 2.0));
    d.push_back(r.defect);
  }
  CHECK(std::sqrt(d[2] / d[1]) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::sqrt(d[1] / d[0]) < std::sqrt(d[2] / d[1]));
  CHECK_THROWS_AS(auf::defect_audit(w("a"), w("a"), w("b"), w("aa"), eng), auf::Error);
}

TEST_CASE("composite defect") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.5, 12));
  const auto c = auf::composite_defect_audit(w("a"), w("b"), w("a"), w("ba"), eng);
  CHECK(std::isfinite(c.defect));
  CHECK(c.exponent == doctest::Approx(0.0));
  CHECK(auf::composite_defect_audit(w("a"), Word{}, w("a"), w("ba"), eng).defect < 1e-12);
}

TEST_CASE("tensor cap") {
  const IntertwinerEngine eng(ModelConfig::from_q(0.5, 4));
  CHECK_THROWS_AS(auf::word_projection(w("ababa"), eng), auf::Error);
  try {
    auf::vtilde(w("a"), w("ba"), w("b"), eng);
    FAIL("expected ResourceCap");
  } catch (const auf::Error& e) {
    CHECK(e.kind() == auf::ErrorKind::ResourceCap);
  }
}
