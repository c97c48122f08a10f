#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "auf/green.hpp"
#include "auf/kernels.hpp"
#include "gen.hpp"

using auf::Domain;
using auf::QParams;
using auf::Word;
namespace k = auf::kernels;

namespace {

Word w(const char* s) { return Word::parse(s); }

auf::TransitionMatrix walk(const auf::Measure& mu, int radius, double q = 0.5) {
  return auf::build_transition_matrix(mu, Domain::ball(radius), QParams(q));
}

k::ScanInput scan(const auf::KernelTable& t) {
  k::ScanInput in;
  in.green = &t.green;
  in.domain = t.domain;
  in.words = t.domain.words();
  for (const Word& x : in.words) in.interior.push_back(t.domain.is_interior(x, t.range) ? 1 : 0);
  return in;
}

}  // namespace

TEST_CASE("serial and parallel kernels agree") {
  for (const auto& mu : {gen::half_ab(), gen::range_two()}) {
    const auto p = walk(mu, 7, 0.7);
    const auto haar = p.haar_weights();
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(p.size()), -1.0, 2.0);
    Eigen::VectorXd y1, y2;
    k::serial::spmv(p.entries, x, y1);
    k::parallel::spmv(p.entries, x, y2);
    CHECK((y1 - y2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((y1 - p.entries * x).cwiseAbs().maxCoeff() < 1e-14);

    const auto n1 = k::serial::weighted_norm(p.entries, haar);
    const auto n2 = k::parallel::weighted_norm(p.entries, haar);
    CHECK(n1.converged);
    CHECK(n1.norm == doctest::Approx(n2.norm).epsilon(1e-12));

    const std::vector<int> targets = {0, 5, static_cast<int>(p.size()) - 1};
    const auto c1 = k::serial::neumann_columns(p.entries, targets, 30);
    const auto c2 = k::parallel::neumann_columns(p.entries, targets, 30);
    CHECK((c1 - c2).cwiseAbs().maxCoeff() < 1e-13);

    const auto g1 = k::serial::green_solve(p.entries);
    const auto g2 = k::parallel::green_solve(p.entries);
    CHECK((g1 - g2).cwiseAbs().maxCoeff() < 1e-12);

    auto t = auf::green_table(p, Word{});
    const auto in = scan(t);
    const auto h1 = k::serial::harnack_scan(in);
    const auto h2 = k::parallel::harnack_scan(in);
    CHECK(h1.triples == h2.triples);
    CHECK(h1.empirical_delta == doctest::Approx(h2.empirical_delta).epsilon(1e-14));
    const auto m1 = k::serial::multiplicativity_scan(in);
    const auto m2 = k::parallel::multiplicativity_scan(in);
    CHECK(m1.triples == m2.triples);
    CHECK(m1.lower == doctest::Approx(m2.lower).epsilon(1e-14));
    CHECK(m1.upper == doctest::Approx(m2.upper).epsilon(1e-14));
  }
}

TEST_CASE("weighted norm against a dense SVD oracle") {
  const auto p = walk(gen::range_two(), 5, 0.5);
  const auto haar = p.haar_weights();
  Eigen::MatrixXd a = Eigen::MatrixXd(p.entries);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) *= std::sqrt(haar[i] / haar[j]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  CHECK(k::serial::weighted_norm(p.entries, haar).norm ==
        doctest::Approx(svd.singularValues()(0)).epsilon(1e-9));
}

TEST_CASE("green_table trivial cases") {
  auto p = walk(gen::half_ab(), 3);
  p.entries.setZero();
  const auto t = auf::green_table(p, Word{});
  CHECK((t.green - Eigen::MatrixXd::Identity(15, 15)).cwiseAbs().maxCoeff() == 0.0);

  const auto p0 = walk(gen::half_ab(), 0);
  const auto t0 = auf::green_table(p0, Word{});
  CHECK(t0.green.rows() == 1);
  CHECK(t0.green(0, 0) == 1.0);
}

TEST_CASE("green_table on ball(1) is a scalar geometric series") {
  const QParams q(0.5);
  const auto p = walk(gen::half_ab(), 1);
  const double out = auf::transition_prob(gen::half_ab(), w("e"), w("a"), q);
  const double back = auf::transition_prob(gen::half_ab(), w("a"), w("e"), q);
  // Returns to e go through a or b; nothing else stays inside.
  const double want = 1.0 / (1.0 - 2.0 * out * back);
  const auto t = auf::green_table(p, Word{});
  CHECK(t.g(w("e"), w("e")) == doctest::Approx(want).epsilon(1e-14));
  CHECK(t.g(w("a"), w("e")) == doctest::Approx(back * want).epsilon(1e-14));
}

TEST_CASE("green diagonal and Neumann checks") {
  for (double qv : {0.3, 0.5, 0.7}) {
    for (const auto& mu : {gen::half_ab(), gen::range_two(), auf::Measure::delta(w("a"))}) {
      const auto p = walk(mu, 8, qv);
      const auto t = auf::green_table(p, Word{});
      const double lam = auf::norm_upper_bound(mu, QParams(qv));
      CHECK(t.power_norm <= lam + 1e-8);
      CHECK(t.residual < 1e-10);
      CHECK(t.green.diagonal().maxCoeff() <= 1.0 / (1.0 - lam));
      CHECK(t.neumann_deviation <= t.neumann_bound);
      CHECK(t.neumann_weighted_ratio <= 1.0);
    }
  }
}

TEST_CASE("green_table rejects a non-contracting matrix") {
  auto p = walk(gen::half_ab(), 3);
  p.entries *= 3.0;
  CHECK_THROWS_AS(auf::green_table(p, Word{}), auf::Error);
}

TEST_CASE("truncation error bound") {
  const QParams q(0.5);
  CHECK(auf::truncation_error_bound(12, Word{}, Word{}, 0.8, 1, q) == doctest::Approx(std::pow(0.8, 24) / 0.2));
  const double b1 = auf::truncation_error_bound(8, Word{}, w("aa"), 0.8, 1, q);
  const double b2 = auf::truncation_error_bound(14, Word{}, w("aa"), 0.8, 1, q);
  // R - |t| doubles from 6 to 12: the lambda factor squares.
  const double scale = auf::qdim(w("aa"), q);
  CHECK(b2 * 0.2 / scale == doctest::Approx(std::pow(b1 * 0.2 / scale, 2)).epsilon(1e-12));
  double prev = 1.0 / 0.2;
  for (int r = 1; r <= 60; ++r) {
    const double b = auf::truncation_error_bound(r, Word{}, Word{}, 0.8, 1, q);
    CHECK(b < prev);
    prev = b;
  }
  CHECK(prev == doctest::Approx(std::pow(0.8, 120) / 0.2));
}

TEST_CASE("green tables on two radii agree within the truncation bound") {
  for (const auto& mu : {gen::half_ab(), gen::range_two()}) {
    const QParams q(0.5);
    const auto small = auf::green_table(walk(mu, 7), Word{});
    const auto big = auf::green_table(walk(mu, 10), Word{});
    const double lam = auf::norm_upper_bound(mu, q);
    for (const Word& s : auf::ball(3)) {
      for (const Word& t : auf::ball(3)) {
        const double gap = std::abs(small.g(s, t) - big.g(s, t));
        CHECK(gap <= auf::truncation_error_bound(7, s, t, lam, mu.range(), q));
      }
    }
  }
}

TEST_CASE("Harnack and multiplicativity on ball(8)") {
  for (double qv : {0.3, 0.5, 0.7}) {
    const auto p = walk(gen::half_ab(), 8, qv);
    const auto t = auf::green_table(p, Word{});
    const auto wit = auf::irreducibility_witness(p);
    const auto h = auf::harnack_audit(t, wit);
    CHECK(h.pass);
    CHECK(h.empirical_delta >= h.paper_delta);
    const auto m = auf::multiplicativity_audit(t, auf::norm_upper_bound(gen::half_ab(), QParams(qv)), h.paper_delta);
    CHECK(m.pass);
    CHECK(m.triples > 0);
  }
}

TEST_CASE("last-entry decomposition") {
  const QParams q(0.5);
  SUBCASE("S = 1 on ball(10)") {
    const auto p = walk(gen::half_ab(), 10);
    const auto full = auf::green_table(p, Word{});
    const auto x = w("ab");
    const auto br = auf::green_table(auf::restrict_to(p, Domain::branch(x, 10)), x);
    const auto r = auf::last_entry_audit(x, p, full, br);
    CHECK(r.pairs > 0);
    CHECK(r.residual < 1e-8);
    // Single-entry cut: G(s,t) = M(s,x) G_branch(x,t), M(s,x) = sum_{v outside} G(s,v) p(v,x).
    const Word s = w("b");
    const Word t = w("aab");
    double m = 0.0;
    for (const Word& v : auf::ball(10)) {
      if (!v.ends_with(x)) m += full.g(s, v) * p.at(v, x);
    }
    CHECK(full.g(s, t) == doctest::Approx(m * br.g(x, t)).epsilon(1e-10));
  }
  SUBCASE("S = 2") {
    const auto p = walk(gen::range_two(), 9);
    const auto full = auf::green_table(p, Word{});
    const auto x = w("a");
    const auto br = auf::green_table(auf::restrict_to(p, Domain::branch(x, 9)), x);
    CHECK(auf::last_entry_audit(x, p, full, br).residual < 1e-8);
  }
}

TEST_CASE("boundary profiles") {
  const auto t = auf::green_table(walk(gen::half_ab(), 10), Word{});
  const auto ray = auf::ray_points(auf::Ray{Word{}, w("a")}, 8);
  CHECK(ray.front() == Word{});
  CHECK(ray.back() == w("aaaaaaaa"));
  const auto pe = auf::boundary_profile(t, Word{}, ray);
  for (const auto& pt : pe.points) CHECK(pt.k == doctest::Approx(1.0).epsilon(1e-14));
  // s off the ray: constant once the geodesics from s and e to t_n merge (n >= 1).
  const auto pb = auf::boundary_profile(t, w("b"), ray);
  for (std::size_t i = 1; i < pb.points.size(); ++i) {
    CHECK(pb.points[i].k == doctest::Approx(pb.points[1].k).epsilon(1e-12));
  }
  CHECK(pb.cauchy);
  const auto pa = auf::boundary_profile(t, w("a"), ray);
  CHECK(pa.cauchy);
}

TEST_CASE("boundary limits on two radii agree within truncation bounds") {
  const auto r8 = auf::green_table(walk(gen::range_two(), 8), Word{});
  const auto r10 = auf::green_table(walk(gen::range_two(), 10), Word{});
  for (const Word& t : auf::ray_points(auf::Ray{Word{}, w("a")}, 5)) {
    const double k8 = r8.martin(w("a"), t);
    const double k10 = r10.martin(w("a"), t);
    CHECK(std::abs(k8 - k10) <= auf::martin_truncation_bound(r8, r8, w("a"), t));
  }
}

TEST_CASE("gaps_cauchy rule") {
  CHECK(auf::gaps_cauchy({1.0, 0.5, 0.25}, {1, 1, 1}));
  CHECK_FALSE(auf::gaps_cauchy({1.0, 0.5, 0.6}, {1, 1, 1}));
  CHECK(auf::gaps_cauchy({1.0, 1e-15, 2e-15}, {1, 1, 1}));
  CHECK(auf::gaps_cauchy({1.0, 0.5, 0.6}, {1, 1, 1}, {0.0, 0.0, 0.7}));
  CHECK_FALSE(auf::gaps_cauchy({1.0}, {1}));
}
