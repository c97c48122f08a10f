#pragma once

// The perturbed walk on a branch: q-check entries from the trace formula, the
// matrix Q on Omega_y = Delta_z, its Green and Martin kernels, and the audits
// comparing Q with P.

#include <vector>

#include "auf/fit.hpp"
#include "auf/fusion.hpp"
#include "auf/green.hpp"
#include "auf/intertwiner.hpp"
#include "auf/qhat_store.hpp"

namespace auf {

struct BranchContext {
  Word z;
  Word y;  // bar(z) z
  Domain omega = Domain::ball(0);

  /// Omega_y intersected with ball(radius). Throws Config for z = e.
  static BranchContext make(const Word& z, int radius);
  bool in_omega(const Word& w) const { return omega.contains(w); }
};

/// Largest radius for which every entry of Q is within the tensor cap: cap - |y| - range(mu).
int max_q_radius(const Word& z, int range, int tensor_cap);

/// q-check(s,t) for mu-check = delta_u, by the trace formula on u (x) s.
/// Zero unless t occurs in u (x) s; delta_{st} for u = e.
double qhat_entry(const Word& u, const Word& s, const Word& t, const BranchContext& ctx,
                  const IntertwinerEngine& engine);

struct QhatOracle {
  /// c with (tr_u (x) 1)((V(t,u(x)s) (x) 1_y) V(t,t(x)y) V(t,u(x)s)^*) = c V(s,s(x)y).
  double value = 0.0;
  /// Frobenius distance from proportionality, relative to ||V(s,s(x)y)|| on H_s.
  double residual = 0.0;
};

/// Independent evaluation through the partial trace over u alone (needs 2|u|+|s|+|y| letters).
QhatOracle qhat_partial_trace(const Word& u, const Word& s, const Word& t, const BranchContext& ctx,
                              const IntertwinerEngine& engine);

struct QhatRequest {
  Word u;
  Word s;
  Word t;
};

struct QMatrix {
  TransitionMatrix q;
  /// P restricted to the same domain.
  TransitionMatrix p;
  /// Every q-check entry used, with its value.
  std::vector<QhatRequest> requests;
  std::vector<double> qhat_values;
};

/// Assembles q(s,t) = dim_q(t)^2/dim_q(s)^2 sum_r mu(r) q-check_{delta_bar r}(t,s) on ctx.omega.
/// Throws ResourceCap listing the entries that exceed the tensor cap.
QMatrix q_matrix(const Measure& mu, const BranchContext& ctx, const IntertwinerEngine& engine,
                 QhatStore* store = nullptr, bool parallel = true);

struct DominationResult {
  /// max(|q(s,t)| - p(s,t)).
  double excess = 0.0;
  /// Entries of q outside the support of p.
  std::size_t pattern_violations = 0;
};
DominationResult domination_check(const QMatrix& m);

struct DecayResult {
  std::vector<int> lengths;
  /// max |q(s,t) - p(s,t)| over s of each length.
  std::vector<double> max_gap;
  RateFit fit;
  /// Smallest C with |q - p| <= C q^{|s|} over every pair in range.
  double envelope = 0.0;
};

/// |q - p| against |s| for min_len <= |s| <= max_len.
DecayResult decay_audit(const QMatrix& m, int min_len, int max_len);

/// G_Q on the branch; same solver and checks as green_table.
KernelTable green_q(const QMatrix& m, const GreenOptions& opts = {});
/// K_Q(s,t) = G_Q(s,t) / G_P(e,t) with the full-tree G_P.
double martin_q(const KernelTable& gq, const KernelTable& gp_full, const Word& s, const Word& t);

struct GdifResult {
  std::vector<Word> xs;
  /// max over s,t in Delta_x of |G_{Q,Delta_x} - G_{P,Delta_x}| / G_{P,Delta_x}.
  std::vector<double> gaps;
  std::vector<int> lengths;
  /// Largest gap per length.
  std::vector<double> max_gap;
  /// Left empty (points = 0) when fewer than two lengths have a nonzero gap.
  RateFit fit;
};

GdifResult gdif_audit(const QMatrix& m, const std::vector<Word>& xs, const GreenOptions& opts = {});

struct BoundaryRow {
  Word s;
  int n = 0;
  Word t;
  double kp = 0.0;
  double kq = 0.0;
  double ratio = 0.0;
  /// |K_Q(s,t_n) - K_Q(s,t_{n+1})|; 0 at the deepest point.
  double gap_q = 0.0;
  double gap_p = 0.0;
  /// Truncation bounds on K_Q and K_P at t.
  double trunc_q = 0.0;
  double trunc_p = 0.0;
};

struct BoundarySummary {
  Word s;
  std::vector<BoundaryRow> rows;
  /// Cauchy rule on the tail |t_n| >= |s|, with truncation bounds as the stabilization floor.
  bool cauchy_p = false;
  bool cauchy_q = false;
  /// Tail gaps of K_Q above their floor, i.e. actually resolved.
  int resolved_q = 0;
  /// K_Q/K_P at the first tail point; the least truncated point past s.
  double ratio_near = 0.0;
  /// Values at the deepest ray point.
  double kq_deep = 0.0;
  double kp_deep = 0.0;
  double ratio_deep = 0.0;
  double gap_q_deep = 0.0;
};

/// K_P and K_Q along a ray for each s; both kernels normalized by the full-tree G_P(e, .).
std::vector<BoundarySummary> boundary_positivity_and_ratio(const KernelTable& gq, const KernelTable& gp_full,
                                                           const std::vector<Word>& ray,
                                                           const std::vector<Word>& s_list);

}  // namespace auf
