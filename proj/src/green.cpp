#include "auf/green.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "auf/kernels.hpp"

namespace auf {

double KernelTable::g(const Word& s, const Word& t) const {
  const auto i = domain.index_of(s);
  const auto j = domain.index_of(t);
  if (!i || !j) fail(ErrorKind::InvalidArgument, "kernel table has no entry (" + s.str() + ", " + t.str() + ")");
  return green(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j));
}

double KernelTable::truncation_bound(const Word& s, const Word& t) const {
  if (!(power_norm > 0.0 && power_norm < 1.0)) return 0.0;
  return truncation_error_bound(domain.radius(), s, t, power_norm, range, q);
}

double martin_truncation_bound(const KernelTable& num, const KernelTable& den, const Word& s, const Word& t) {
  const double g0 = den.g(den.base, t);
  const double k = num.g(s, t) / g0;
  return (num.truncation_bound(s, t) + std::abs(k) * den.truncation_bound(den.base, t)) / g0;
}

namespace {

std::vector<int> neumann_targets(std::size_t n, int samples, std::uint64_t seed) {
  std::vector<int> out;
  if (n == 0 || samples <= 0) return out;
  out.push_back(0);
  if (n > 1 && samples > 1) out.push_back(static_cast<int>(n - 1));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (static_cast<int>(out.size()) < std::min<int>(samples, static_cast<int>(n))) {
    const int c = static_cast<int>(pick(rng));
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

}  // namespace

KernelTable green_table(const TransitionMatrix& w, const Word& base, const GreenOptions& opts) {
  KernelTable t;
  t.domain = w.domain;
  t.base = base;
  t.range = w.range;
  t.q = w.q;
  if (!w.domain.contains(base)) fail(ErrorKind::InvalidArgument, "Martin base " + base.str() + " outside domain");
  const std::vector<double> haar = w.haar_weights();
  const auto norm = opts.parallel ? kernels::parallel::weighted_norm(w.entries, haar)
                                  : kernels::serial::weighted_norm(w.entries, haar);
  t.power_norm = norm.norm;
  if (norm.norm >= 1.0 - 1e-6) {
    fail(ErrorKind::Numerical, "weighted norm " + std::to_string(norm.norm) + " of the walk matrix is not < 1");
  }
  t.green = opts.parallel ? kernels::parallel::green_solve(w.entries) : kernels::serial::green_solve(w.entries);

  const Eigen::Index n = static_cast<Eigen::Index>(w.size());
  Eigen::MatrixXd r = t.green - w.entries * t.green;
  r -= Eigen::MatrixXd::Identity(n, n);
  t.residual = n > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
  if (!(t.residual < 1e-10)) fail(ErrorKind::Numerical, "Green solve residual " + std::to_string(t.residual));

  const double lambda = opts.lambda > 0.0 ? opts.lambda : norm.norm;
  if (n > 0 && lambda > 0.0 && lambda < 1.0) {
    // Enough terms that the tail bound is far above rounding.
    t.neumann_terms = static_cast<int>(std::ceil(std::log(1e-7 * (1.0 - lambda)) / std::log(lambda)));
    t.neumann_bound = std::pow(lambda, t.neumann_terms) / (1.0 - lambda);
    const auto targets = neumann_targets(w.size(), opts.neumann_samples, opts.seed);
    const Eigen::MatrixXd s = opts.parallel ? kernels::parallel::neumann_columns(w.entries, targets, t.neumann_terms)
                                            : kernels::serial::neumann_columns(w.entries, targets, t.neumann_terms);
    const double tail = std::pow(lambda, t.neumann_terms + 1) / (1.0 - lambda);
    for (std::size_t c = 0; c < targets.size(); ++c) {
      const int j = targets[c];
      double col = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double dev = std::abs(t.green(i, j) - s(i, static_cast<Eigen::Index>(c)));
        col += dev * dev * haar[static_cast<std::size_t>(i)];
        t.neumann_max_entry = std::max(t.neumann_max_entry, dev);
        const double weight = std::sqrt(haar[static_cast<std::size_t>(j)] / haar[static_cast<std::size_t>(i)]);
        t.neumann_weighted_ratio = std::max(t.neumann_weighted_ratio, dev / (weight * tail));
      }
      t.neumann_deviation = std::max(t.neumann_deviation, std::sqrt(col / haar[static_cast<std::size_t>(j)]));
    }
  }
  return t;
}

double truncation_error_bound(int radius, const Word& s, const Word& t, double lambda, int range, QParams q) {
  if (range < 1) fail(ErrorKind::InvalidArgument, "range must be positive");
  const int gap = radius - std::max(s.length(), t.length());
  const int steps = gap > 0 ? (2 * gap + range - 1) / range : 0;
  const double ms = qdim(s, q);
  const double mt = qdim(t, q);
  return (mt / ms) * std::pow(lambda, steps) / (1.0 - lambda);
}

namespace {

kernels::ScanInput scan_input(const KernelTable& table) {
  kernels::ScanInput in;
  in.green = &table.green;
  in.domain = table.domain;
  in.words = table.domain.words();
  in.interior.resize(in.words.size());
  for (std::size_t i = 0; i < in.words.size(); ++i) {
    in.interior[i] = table.domain.is_interior(in.words[i], table.range) ? 1 : 0;
  }
  return in;
}

}  // namespace

HarnackResult harnack_audit(const KernelTable& table, const IrreducibilityWitness& w, bool parallel) {
  const auto in = scan_input(table);
  const auto scan = parallel ? kernels::parallel::harnack_scan(in) : kernels::serial::harnack_scan(in);
  HarnackResult out;
  out.empirical_delta = scan.empirical_delta;
  out.paper_delta = std::pow(w.delta0, w.k_steps);
  out.triples = scan.triples;
  out.pass = scan.triples > 0 && out.empirical_delta >= out.paper_delta;
  return out;
}

MultiplicativityResult multiplicativity_audit(const KernelTable& table, double lambda, double delta, bool parallel) {
  const auto in = scan_input(table);
  const auto scan =
      parallel ? kernels::parallel::multiplicativity_scan(in) : kernels::serial::multiplicativity_scan(in);
  MultiplicativityResult out;
  out.lower = scan.lower;
  out.upper = scan.upper;
  out.lower_bound = 1.0 / (1.0 - lambda);
  out.upper_bound = 3.0 * std::pow(2.0 / (delta * delta), table.range - 1);
  out.triples = scan.triples;
  out.pass = scan.triples > 0 && out.lower <= out.lower_bound && out.upper <= out.upper_bound;
  return out;
}

LastEntryResult last_entry_audit(const Word& x, const TransitionMatrix& p, const KernelTable& full,
                                 const KernelTable& branch) {
  if (!(p.domain == full.domain)) fail(ErrorKind::InvalidArgument, "last-entry audit: P and G domains differ");
  const std::vector<Word> words = full.domain.words();
  const auto n = static_cast<Eigen::Index>(words.size());
  // Entry matrix E(w,u) = p(w,u) for w outside Delta_x and u inside the branch table.
  const std::vector<Word> inside = branch.domain.words();
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<Eigen::Index> outside_rows;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (words[static_cast<std::size_t>(i)].ends_with(x)) continue;
    outside_rows.push_back(i);
    for (SparseRowMatrix::InnerIterator it(p.entries, static_cast<int>(i)); it; ++it) {
      const auto j = branch.domain.index_of(words[static_cast<std::size_t>(it.col())]);
      if (j) trip.emplace_back(static_cast<int>(i), static_cast<int>(*j), it.value());
    }
  }
  Eigen::SparseMatrix<double> entry(n, static_cast<Eigen::Index>(inside.size()));
  entry.setFromTriplets(trip.begin(), trip.end());
  Eigen::MatrixXd g_out(static_cast<Eigen::Index>(outside_rows.size()), n);
  for (std::size_t r = 0; r < outside_rows.size(); ++r) g_out.row(static_cast<Eigen::Index>(r)) = full.green.row(outside_rows[r]);
  const Eigen::MatrixXd m = g_out * entry;
  const Eigen::MatrixXd through = m * branch.green;
  LastEntryResult out;
  for (std::size_t c = 0; c < inside.size(); ++c) {
    const auto j = full.domain.index_of(inside[c]);
    if (!j) continue;
    for (std::size_t r = 0; r < outside_rows.size(); ++r) {
      const double g = full.green(outside_rows[r], static_cast<Eigen::Index>(*j));
      if (!(g > 0.0)) continue;
      const double d = std::abs(g - through(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      out.residual = std::max(out.residual, d / g);
      ++out.pairs;
    }
  }
  return out;
}

std::vector<Word> ray_points(const Ray& ray, int max_length, const Word& tail) {
  if (ray.period.empty()) fail(ErrorKind::Config, "ray period must be nonempty");
  std::vector<Word> out;
  Word t = ray.preperiod.concat(tail);
  while (t.length() <= max_length) {
    out.push_back(t);
    if (t.length() + ray.period.length() > Word::kMaxLength) break;
    t = ray.period.concat(t);
  }
  return out;
}

bool gaps_cauchy(const std::vector<double>& gaps, const std::vector<double>& values,
                 const std::vector<double>& floors) {
  if (gaps.size() < 2) return false;
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    double floor = kStableGap * std::max(1.0, std::abs(values[i + 1]));
    if (i + 1 < floors.size()) floor = std::max(floor, floors[i + 1]);
    if (gaps[i + 1] <= floor) continue;  // stabilized
    if (!(gaps[i + 1] < gaps[i])) return false;
  }
  return true;
}

BoundaryProfile boundary_profile(const KernelTable& table, const Word& s, const std::vector<Word>& ray) {
  BoundaryProfile out;
  out.s = s;
  for (std::size_t i = 0; i < ray.size(); ++i) {
    if (!table.contains(ray[i])) fail(ErrorKind::InvalidArgument, "ray point " + ray[i].str() + " leaves the domain");
    out.points.push_back(ProfilePoint{static_cast<int>(i), ray[i], table.martin(s, ray[i]), 0.0});
  }
  std::vector<double> gaps;
  std::vector<double> values;
  for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
    out.points[i].gap = std::abs(out.points[i].k - out.points[i + 1].k);
    gaps.push_back(out.points[i].gap);
    values.push_back(out.points[i].k);
  }
  out.cauchy = gaps_cauchy(gaps, values);
  return out;
}

}  // namespace auf
