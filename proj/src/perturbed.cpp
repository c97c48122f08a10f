#include "auf/perturbed.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <tuple>

namespace auf {

BranchContext BranchContext::make(const Word& z, int radius) {
  if (z.empty()) fail(ErrorKind::Config, "branchZ must be nonempty");
  if (radius < z.length()) fail(ErrorKind::Config, "branch radius " + std::to_string(radius) + " shorter than z");
  BranchContext c;
  c.z = z;
  c.y = z.bar().concat(z);
  c.omega = Domain::branch(z, radius);
  return c;
}

int max_q_radius(const Word& z, int range, int tensor_cap) { return tensor_cap - 2 * z.length() - range; }

namespace {

struct Decompositions {
  Decomposition us;  // V(t, u (x) s)
  Decomposition sy;  // V(s, s (x) y)
  Decomposition ty;  // V(t, t (x) y)
};

Decompositions decompositions(const Word& u, const Word& s, const Word& t, const BranchContext& ctx) {
  auto us = decompose(t, u, s);
  auto sy = decompose(s, s, ctx.y);
  auto ty = decompose(t, t, ctx.y);
  if (!us || !sy || !ty) fail(ErrorKind::InvalidArgument, "q-check entry (" + u.str() + "," + s.str() + "," + t.str() + ") has no decomposition");
  return {*us, *sy, *ty};
}

void require_branch(const Word& s, const Word& t, const BranchContext& ctx) {
  if (!s.ends_with(ctx.z) || !t.ends_with(ctx.z)) {
    fail(ErrorKind::InvalidArgument, s.str() + " or " + t.str() + " is not in the branch of " + ctx.z.str());
  }
}

}  // namespace

double qhat_entry(const Word& u, const Word& s, const Word& t, const BranchContext& ctx,
                  const IntertwinerEngine& engine) {
  require_branch(s, t, ctx);
  if (multiplicity(t, u, s) == 0) return 0.0;
  if (u.empty()) return s == t ? 1.0 : 0.0;
  const int lu = u.length();
  const int ls = s.length();
  const int lt = t.length();
  const int ly = ctx.y.length();
  engine.require_cap(lu + ls + ly, "q-check entry");
  const Decompositions d = decompositions(u, s, t, ctx);
  const QParams qp = engine.config().qparams();

  // tr_{u(x)s}(X) = sum over a basis b of H_t of <(1 (x) V_sy) V_us D b, (V_us (x) 1) V_ty b> / (dim u dim s),
  // X the operator of the trace formula, D the rho^-1 weights (they commute with every V).
  const Eigen::VectorXd weights = engine.trace_weights(t);
  const Eigen::Index dim = engine.word_dim(t);
  constexpr Eigen::Index kBatch = 64;
  double acc = 0.0;
  for (Eigen::Index start = 0; start < dim; start += kBatch) {
    const Eigen::MatrixXd b = engine.word_basis(t, start, std::min(kBatch, dim - start));
    const Eigen::MatrixXd db = weights.asDiagonal() * b;
    const Eigen::MatrixXd left = engine.apply_v(d.sy, engine.apply_v(d.us, db, 0, lt), lu, lu + ls);
    const Eigen::MatrixXd right = engine.apply_v(d.us, engine.apply_v(d.ty, b, 0, lt), 0, lt + ly);
    acc += left.cwiseProduct(right).sum();
  }
  return acc / (qdim(u, qp) * qdim(s, qp));
}

QhatOracle qhat_partial_trace(const Word& u, const Word& s, const Word& t, const BranchContext& ctx,
                              const IntertwinerEngine& engine) {
  require_branch(s, t, ctx);
  if (multiplicity(t, u, s) == 0) return {};
  if (u.empty()) return {s == t ? 1.0 : 0.0, 0.0};
  const int lu = u.length();
  const int ls = s.length();
  const int lt = t.length();
  const int ly = ctx.y.length();
  engine.require_cap(2 * lu + ls + ly, "partial-trace oracle");
  const Decompositions d = decompositions(u, s, t, ctx);
  const QParams qp = engine.config().qparams();

  const Eigen::MatrixXd cup = engine.standard_cup(u);  // in bar(u) u
  const Eigen::MatrixXd bs = engine.word_basis(s);
  // R_u (x) b for each basis vector b of H_s, then 1_bar(u) (x) X on the last |u|+|s| letters.
  Eigen::MatrixXd w = apply_mid(bs, 1, engine.ambient_dim(ls), cup);
  w = engine.apply_v_adjoint(d.us, w, lu, 2 * lu + ls);
  w = engine.apply_v(d.ty, w, lu, lu + lt);
  w = engine.apply_v(d.us, w, lu, lu + lt + ly);
  const Eigen::MatrixXd z = apply_mid(w, 1, engine.ambient_dim(ls + ly), cup.transpose()) / qdim(u, qp);

  const Eigen::MatrixXd vs = engine.apply_v(d.sy, bs, 0, ls);
  const double vv = vs.squaredNorm();
  QhatOracle out;
  out.value = vs.cwiseProduct(z).sum() / vv;
  out.residual = (z - out.value * vs).norm() / std::sqrt(vv);
  return out;
}

QMatrix q_matrix(const Measure& mu, const BranchContext& ctx, const IntertwinerEngine& engine, QhatStore* store,
                 bool parallel) {
  const QParams qp = engine.config().qparams();
  QMatrix out{build_transition_matrix(mu, ctx.omega, qp), build_transition_matrix(mu, ctx.omega, qp), {}, {}};
  const std::vector<Word> words = ctx.omega.words();

  // q(s,t) needs q-check_{delta_bar r}(t, s), i.e. the entry (u, s', t') = (bar r, t, s).
  std::map<std::tuple<Word, Word, Word>, std::size_t> index;
  for (const Word& s : words) {
    for (const auto& a : mu.atoms()) {
      for (const Word& t : fuse(a.word, s)) {
        if (!ctx.in_omega(t)) continue;
        index.emplace(std::make_tuple(a.word.bar(), t, s), 0);
      }
    }
  }
  std::vector<std::string> missing;
  for (auto& [key, slot] : index) {
    slot = out.requests.size();
    const auto& [u, s1, t1] = key;
    out.requests.push_back({u, s1, t1});
    if (u.length() + s1.length() + ctx.y.length() > engine.config().tensor_cap) {
      missing.push_back("(" + u.str() + "," + s1.str() + "," + t1.str() + ")");
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 12; ++i) list += (i ? " " : "") + missing[i];
    if (missing.size() > 12) list += " ...";
    fail(ErrorKind::ResourceCap, std::to_string(missing.size()) + " q-check entries exceed tensorCap " +
                                     std::to_string(engine.config().tensor_cap) + ": " + list);
  }

  out.qhat_values.assign(out.requests.size(), 0.0);
  const std::uint64_t h = engine.config().hash();
  std::exception_ptr error;
  const int count = static_cast<int>(out.requests.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < count; ++i) {
    try {
      const QhatRequest& r = out.requests[static_cast<std::size_t>(i)];
      std::optional<double> v;
      if (store) v = store->lookup(h, r.u, r.s, r.t, ctx.z);
      if (!v) {
        v = qhat_entry(r.u, r.s, r.t, ctx, engine);
        if (store) store->insert(h, r.u, r.s, r.t, ctx.z, *v);
      }
      out.qhat_values[static_cast<std::size_t>(i)] = *v;
    } catch (...) {
#pragma omp critical(auf_qmatrix_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  std::vector<Eigen::Triplet<double, int>> triplets;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const Word& s = words[i];
    const double ds = out.q.qdims[i];
    for (const auto& a : mu.atoms()) {
      for (const Word& t : fuse(a.word, s)) {
        const auto j = ctx.omega.index_of(t);
        if (!j) continue;
        const double dt = out.q.qdims[*j];
        const double qhat = out.qhat_values[index.at(std::make_tuple(a.word.bar(), t, s))];
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(*j), a.weight * dt * dt / (ds * ds) * qhat);
      }
    }
  }
  const int n = static_cast<int>(words.size());
  SparseRowMatrix e(n, n);
  e.setFromTriplets(triplets.begin(), triplets.end());
  e.makeCompressed();
  out.q.entries = std::move(e);
  return out;
}

DominationResult domination_check(const QMatrix& m) {
  DominationResult out;
  out.excess = -1.0;
  for (int i = 0; i < m.q.entries.outerSize(); ++i) {
    for (SparseRowMatrix::InnerIterator it(m.q.entries, i); it; ++it) {
      const double p = m.p.entries.coeff(i, it.col());
      if (p == 0.0 && it.value() != 0.0) ++out.pattern_violations;
      out.excess = std::max(out.excess, std::abs(it.value()) - p);
    }
  }
  return out;
}

DecayResult decay_audit(const QMatrix& m, int min_len, int max_len) {
  const QParams qp = m.q.q;
  std::map<int, double> per_length;
  DecayResult out;
  for (int i = 0; i < m.p.entries.outerSize(); ++i) {
    const Word s = m.p.domain.word_at(static_cast<std::size_t>(i));
    if (s.length() < min_len || s.length() > max_len) continue;
    double worst = per_length.count(s.length()) ? per_length[s.length()] : 0.0;
    for (SparseRowMatrix::InnerIterator it(m.p.entries, i); it; ++it) {
      const double gap = std::abs(m.q.entries.coeff(i, it.col()) - it.value());
      worst = std::max(worst, gap);
      out.envelope = std::max(out.envelope, gap / std::pow(qp.q(), s.length()));
    }
    per_length[s.length()] = worst;
  }
  std::vector<double> xs;
  for (const auto& [len, gap] : per_length) {
    out.lengths.push_back(len);
    out.max_gap.push_back(gap);
    xs.push_back(len);
  }
  if (xs.size() < 4) fail(ErrorKind::InvalidArgument, "decay audit needs at least four word lengths");
  out.fit = fit_rate(xs, out.max_gap, qp.q(), 1e-12);
  return out;
}

KernelTable green_q(const QMatrix& m, const GreenOptions& opts) {
  return green_table(m.q, m.q.domain.suffix(), opts);
}

double martin_q(const KernelTable& gq, const KernelTable& gp_full, const Word& s, const Word& t) {
  return gq.g(s, t) / gp_full.g(Word{}, t);
}

GdifResult gdif_audit(const QMatrix& m, const std::vector<Word>& xs, const GreenOptions& opts) {
  const Word& z = m.q.domain.suffix();
  const int radius = m.q.domain.radius();
  GdifResult out;
  std::map<int, double> per_length;
  for (const Word& x : xs) {
    if (!x.ends_with(z)) fail(ErrorKind::InvalidArgument, x.str() + " is not in the branch of " + z.str());
    if (x.length() > radius) fail(ErrorKind::InvalidArgument, x.str() + " lies beyond the Q domain");
    const Domain sub = Domain::branch(x, radius);
    const KernelTable gq = green_table(restrict_to(m.q, sub), x, opts);
    const KernelTable gp = green_table(restrict_to(m.p, sub), x, opts);
    double gap = 0.0;
    for (Eigen::Index i = 0; i < gp.green.rows(); ++i) {
      for (Eigen::Index j = 0; j < gp.green.cols(); ++j) {
        const double g = gp.green(i, j);
        if (g > 0.0) gap = std::max(gap, std::abs(gq.green(i, j) - g) / g);
      }
    }
    out.xs.push_back(x);
    out.gaps.push_back(gap);
    per_length[x.length()] = std::max(per_length[x.length()], gap);
  }
  std::vector<double> lx;
  for (const auto& [len, gap] : per_length) {
    out.lengths.push_back(len);
    out.max_gap.push_back(gap);
    lx.push_back(len);
  }
  if (lx.size() < 2) fail(ErrorKind::InvalidArgument, "gdif audit needs at least two lengths of x");
  // Q = P on every Delta_x leaves nothing to fit; points stays 0.
  if (std::count_if(out.max_gap.begin(), out.max_gap.end(), [](double g) { return g > 1e-15; }) >= 2) {
    out.fit = fit_rate(lx, out.max_gap, m.q.q.q(), 1e-15);
  }
  return out;
}

std::vector<BoundarySummary> boundary_positivity_and_ratio(const KernelTable& gq, const KernelTable& gp_full,
                                                           const std::vector<Word>& ray,
                                                           const std::vector<Word>& s_list) {
  std::vector<BoundarySummary> out;
  for (const Word& s : s_list) {
    BoundarySummary b;
    b.s = s;
    for (std::size_t i = 0; i < ray.size(); ++i) {
      const Word& t = ray[i];
      if (!gq.contains(t) || !gp_full.contains(t)) {
        fail(ErrorKind::InvalidArgument, "ray point " + t.str() + " outside the kernel tables");
      }
      BoundaryRow r;
      r.s = s;
      r.n = static_cast<int>(i);
      r.t = t;
      r.kp = gp_full.martin(s, t);
      r.kq = martin_q(gq, gp_full, s, t);
      r.ratio = r.kq / r.kp;
      b.rows.push_back(r);
    }
    std::vector<double> gq_gaps, gp_gaps, kq_vals, kp_vals, fq, fp;
    for (std::size_t i = 0; i < b.rows.size(); ++i) {
      BoundaryRow& r = b.rows[i];
      r.trunc_q = martin_truncation_bound(gq, gp_full, s, r.t);
      r.trunc_p = martin_truncation_bound(gp_full, gp_full, s, r.t);
      if (i + 1 < b.rows.size()) {
        r.gap_q = std::abs(r.kq - b.rows[i + 1].kq);
        r.gap_p = std::abs(r.kp - b.rows[i + 1].kp);
      }
    }
    bool near_set = false;
    for (std::size_t i = 0; i + 1 < b.rows.size(); ++i) {
      const BoundaryRow& r = b.rows[i];
      if (r.t.length() < s.length()) continue;
      if (!near_set) {
        b.ratio_near = r.ratio;
        near_set = true;
      }
      gq_gaps.push_back(r.gap_q);
      gp_gaps.push_back(r.gap_p);
      kq_vals.push_back(r.kq);
      kp_vals.push_back(r.kp);
      fq.push_back(r.trunc_q + b.rows[i + 1].trunc_q);
      fp.push_back(r.trunc_p + b.rows[i + 1].trunc_p);
      if (r.gap_q > fq.back()) ++b.resolved_q;
    }
    if (!near_set && !b.rows.empty()) b.ratio_near = b.rows.back().ratio;
    b.cauchy_q = gaps_cauchy(gq_gaps, kq_vals, fq);
    b.cauchy_p = gaps_cauchy(gp_gaps, kp_vals, fp);
    if (!b.rows.empty()) {
      b.kq_deep = b.rows.back().kq;
      b.kp_deep = b.rows.back().kp;
      b.ratio_deep = b.rows.back().ratio;
      b.gap_q_deep = b.rows.size() >= 2 ? b.rows[b.rows.size() - 2].gap_q : 0.0;
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace auf
