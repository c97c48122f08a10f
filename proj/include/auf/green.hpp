#pragma once

// Green and Martin kernels of substochastic matrices on finite tree domains,
// and the audits that compare them with the constants of the estimates on
// trees (Harnack, almost multiplicativity, last-entry decomposition).

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "auf/fusion.hpp"

namespace auf {

struct KernelTable {
  Domain domain = Domain::ball(0);
  /// Martin kernels are normalized at this word.
  Word base;
  int range = 1;
  QParams q = QParams(0.5);  // overwritten by green_table
  Eigen::MatrixXd green;  // G(s,t), domain order
  /// max |(I - W)G - I|.
  double residual = 0.0;
  /// Power-iteration norm of W on l^2(domain, m).
  double power_norm = 0.0;
  /// Neumann cross-check: largest ||(G - sum_{k<=N} W^k) e_t||_m / ||e_t||_m over the sampled columns t.
  double neumann_deviation = 0.0;
  /// Largest plain entry of G - sum_{k<=N} W^k over the same columns.
  double neumann_max_entry = 0.0;
  /// lambda^N / (1 - lambda) for the lambda and N used.
  double neumann_bound = 0.0;
  /// Largest deviation divided by sqrt(m(t)/m(s)) lambda^{N+1}/(1-lambda), entrywise.
  double neumann_weighted_ratio = 0.0;
  int neumann_terms = 0;

  double g(const Word& s, const Word& t) const;
  double martin(const Word& s, const Word& t) const { return g(s, t) / g(base, t); }
  bool contains(const Word& w) const { return domain.contains(w); }
  /// truncation_error_bound for G(s,t) with this table's radius, norm and range.
  double truncation_bound(const Word& s, const Word& t) const;
};

struct GreenOptions {
  /// Norm bound used for the Neumann check; <= 0 uses the measured power-iteration norm.
  double lambda = 0.0;
  /// Number of sampled Neumann columns (first, last, then seeded random picks).
  int neumann_samples = 4;
  std::uint64_t seed = 1;
  bool parallel = true;
};

/// Solves (I - W)G = I by sparse LU. Throws Numerical if the weighted norm of W is
/// >= 1 - 1e-6 or the residual exceeds 1e-10.
KernelTable green_table(const TransitionMatrix& w, const Word& base, const GreenOptions& opts = {});

/// sqrt(m(t)/m(s)) lambda^N / (1 - lambda), N = ceil(2 (R - max(|s|,|t|)) / S).
double truncation_error_bound(int radius, const Word& s, const Word& t, double lambda, int range, QParams q);

struct HarnackResult {
  double empirical_delta = 0.0;
  double paper_delta = 0.0;  // delta0^K
  long long triples = 0;
  bool pass = false;
};
HarnackResult harnack_audit(const KernelTable& table, const IrreducibilityWitness& w, bool parallel = true);

struct MultiplicativityResult {
  double lower = 0.0;        // max G(s,v)G(v,t)/G(s,t)
  double upper = 0.0;        // max G(s,t)/(G(s,v)G(v,t))
  double lower_bound = 0.0;  // (1 - lambda)^-1
  double upper_bound = 0.0;  // 3 (2/delta^2)^{S-1}
  long long triples = 0;
  bool pass = false;
};
MultiplicativityResult multiplicativity_audit(const KernelTable& table, double lambda, double delta,
                                              bool parallel = true);

struct LastEntryResult {
  /// max |G(s,t) - sum_u M(s,u) G_{Delta_x}(u,t)| / G(s,t).
  double residual = 0.0;
  std::size_t pairs = 0;
};

/// Last-entry decomposition through the branch Delta_x, for every s outside and t inside
/// the branch within both tables. M(s,u) = sum_{w not in Delta_x} G(s,w) p(w,u).
LastEntryResult last_entry_audit(const Word& x, const TransitionMatrix& p, const KernelTable& full,
                                 const KernelTable& branch);

/// Eventually periodic left-infinite word ... period period preperiod.
struct Ray {
  Word preperiod;
  Word period;
};

/// t_n = period^n preperiod tail, n = 0, 1, ... while |t_n| <= max_length.
std::vector<Word> ray_points(const Ray& ray, int max_length, const Word& tail = Word{});

struct ProfilePoint {
  int n = 0;
  Word t;
  double k = 0.0;
  /// |K(s,t_n) - K(s,t_{n+1})|; 0 for the deepest point.
  double gap = 0.0;
};

struct BoundaryProfile {
  Word s;
  std::vector<ProfilePoint> points;
  /// Successive gaps strictly decrease until they fall below the stabilization floor.
  bool cauchy = false;
};

/// Stabilization floor for gaps, relative to |K|.
constexpr double kStableGap = 1e-12;

BoundaryProfile boundary_profile(const KernelTable& table, const Word& s, const std::vector<Word>& ray);
/// Applies the Cauchy rule above to a gap sequence (deepest gap excluded). A gap also
/// counts as stabilized when it is below floors[i] (if given), the truncation error of the pair.
bool gaps_cauchy(const std::vector<double>& gaps, const std::vector<double>& values,
                 const std::vector<double>& floors = {});

/// Bound on |K(s,t) - K_infinite(s,t)| for K = num(s,t) / den(den.base, t), from the truncation bounds of both tables.
double martin_truncation_bound(const KernelTable& num, const KernelTable& den, const Word& s, const Word& t);

}  // namespace auf
