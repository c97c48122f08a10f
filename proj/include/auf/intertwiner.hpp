#pragma once

// Concrete Hilbert-space model for the fundamental representation of A_u(F)
// with diagonal F: duality maps, the subspaces H_x of tensor powers, the
// isometries V(z, x (x) y) and categorical traces.
//
// Everything is real. Vectors of a tensor word w = w_1...w_k live in the
// ambient space (R^n)^{(x)k}, index = sum_i idx_i n^{k-1-i} (leftmost letter is
// the most significant digit). Operators are applied to thin matrices whose
// columns are ambient vectors; an operator acting on letters [offset,
// offset+len) of a k-letter tensor word is applied with apply_mid().

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "auf/fit.hpp"
#include "auf/word.hpp"

namespace auf {

constexpr int kDefaultTensorCap = 10;
constexpr int kHardTensorCap = 14;

struct ModelConfig {
  int n = 2;
  std::vector<double> f_diag;
  /// Eigenvalues of pi_alpha(rho) = (F^*F)^t, i.e. f_i^2.
  std::vector<double> rho_eigs;
  /// lambda_i = rho_i^{-1/2}; R_alpha(1) = sum_i lambda_i f_i (x) e_i.
  std::vector<double> lambdas;
  double q = 0.5;
  int tensor_cap = kDefaultTensorCap;

  /// Validates Tr(F^*F) = Tr((F^*F)^-1) and q < 1.
  static ModelConfig from_f_diag(std::vector<double> f_diag, int tensor_cap = kDefaultTensorCap);
  /// n = 2 with F = diag(q^{1/2}, q^{-1/2}).
  static ModelConfig from_q(double q, int tensor_cap = kDefaultTensorCap);

  QParams qparams() const { return QParams(q); }
  /// FNV-1a over the deformation data; keys the persistent q-check cache.
  std::uint64_t hash() const;
};

/// Dense real operator between ambient spaces of two tensor words.
struct Intertwiner {
  Word source;
  Word target;
  Eigen::MatrixXd values;  // n^{|target|} x n^{|source|}
};

/// Applies `op` (mid_out x mid_in) to the middle factor of each column of x,
/// viewed as a left x mid_in x right tensor. Output rows = left * mid_out * right.
Eigen::MatrixXd apply_mid(const Eigen::MatrixXd& x, Eigen::Index left, Eigen::Index right, const Eigen::MatrixXd& op);

/// z = s t obtained from x = s v and y = bar(v) t.
struct Decomposition {
  Word s;
  Word v;
  Word t;

  Word source() const { return s.concat(t); }
  Word left() const { return s.concat(v); }
  Word right() const { return v.bar().concat(t); }
};

/// Finds the decomposition with z = st, x = sv, y = bar(v) t, if z occurs in x (x) y.
std::optional<Decomposition> decompose(const Word& z, const Word& x, const Word& y);

struct VtildeNorm {
  double norm = 0.0;
  /// max |Vt^T Vt - norm^2 I| / norm^2 over the probe basis.
  double proportionality = 0.0;
};

class IntertwinerEngine {
 public:
  explicit IntertwinerEngine(ModelConfig cfg);

  const ModelConfig& config() const noexcept { return cfg_; }
  int n() const noexcept { return cfg_.n; }
  Eigen::Index ambient_dim(int letters) const;
  /// Throws ResourceCap if `letters` exceeds the configured tensor cap.
  void require_cap(int letters, const char* what) const;

  // Duality.
  /// Nested solution R_w(1) in ambient(bar(w) w) for the tensor product w_1 (x) ... (x) w_k.
  Eigen::VectorXd tensor_cup(const Word& w) const;
  /// Standard solution R_x(1) for the irreducible x: (p_{bar x} (x) p_x) R_{tensor x}.
  Eigen::VectorXd standard_cup(const Word& x) const;
  /// bar-R_x(1) = R_{bar x}(1), a vector in ambient(x bar(x)).
  Eigen::VectorXd standard_cobar(const Word& x) const { return standard_cup(x.bar()); }

  // Projections onto H_x.
  /// Orthonormal basis of H_x for an alternating x, built letter by letter. Cached.
  std::shared_ptr<const Eigen::MatrixXd> alternating_basis(const Word& x) const;
  /// dim H_x as the product of its factor ranks.
  Eigen::Index word_dim(const Word& x) const;
  /// Columns [start, start+count) of the product basis of H_x.
  Eigen::MatrixXd word_basis(const Word& x, Eigen::Index start, Eigen::Index count) const;
  Eigen::MatrixXd word_basis(const Word& x) const { return word_basis(x, 0, word_dim(x)); }
  /// Applies p_x to letters [offset, offset+|x|) of a `total`-letter tensor word.
  Eigen::MatrixXd project(const Word& x, const Eigen::MatrixXd& v, int offset, int total) const;

  // Isometries.
  VtildeNorm vtilde_norm(const Decomposition& d) const;
  /// V(st, sv (x) bar(v)t) applied to letters [offset, offset+|st|); output has 2|v| more letters.
  /// With normalized = false the unnormalized Vtilde is applied.
  Eigen::MatrixXd apply_v(const Decomposition& d, const Eigen::MatrixXd& x, int offset, int total,
                          bool normalized = true) const;
  /// Adjoint of apply_v: acts on letters [offset, offset+|s|+2|v|+|t|).
  Eigen::MatrixXd apply_v_adjoint(const Decomposition& d, const Eigen::MatrixXd& x, int offset, int total) const;

  // Traces.
  /// Diagonal of the rho^{-1} weights on ambient(w): lambda_i^2 per A letter, lambda_i^-2 per B letter.
  Eigen::VectorXd trace_weights(const Word& w) const;
  /// sum_i lambda_i^2 = q + 1/q.
  double letter_qdim() const noexcept { return letter_qdim_; }

 private:
  struct NormKey {
    Word s, v, t;
    bool operator==(const NormKey&) const = default;
  };
  struct NormKeyHash {
    std::size_t operator()(const NormKey& k) const noexcept {
      WordHash h;
      return h(k.s) ^ (h(k.v) * 31U) ^ (h(k.t) * 1009U);
    }
  };

  Eigen::MatrixXd build_alternating_basis(const Word& x) const;
  VtildeNorm compute_vtilde_norm(const Decomposition& d) const;

  ModelConfig cfg_;
  double letter_qdim_ = 0.0;
  mutable std::shared_mutex basis_mutex_;
  mutable std::unordered_map<Word, std::shared_ptr<const Eigen::MatrixXd>, WordHash> bases_;
  mutable std::shared_mutex norm_mutex_;
  mutable std::unordered_map<NormKey, VtildeNorm, NormKeyHash> norms_;
};

// Operations on the model, returning dense operators for inspection and dumps.

struct DualityMaps {
  Intertwiner r_a;     // scalar -> H_B (x) H_A
  Intertwiner rbar_a;  // scalar -> H_A (x) H_B
  Intertwiner r_b;     // = rbar_a
  Intertwiner rbar_b;  // = r_a
};
DualityMaps build_duality_maps(const IntertwinerEngine& engine);

/// Largest residual of the conjugate equations over both letters.
double conjugate_equation_residual(const IntertwinerEngine& engine);

/// p_x as a dense operator on the full tensor space of x.
Intertwiner word_projection(const Word& x, const IntertwinerEngine& engine);
/// Reference construction: orthogonal complement of the span of every single-R insertion.
Intertwiner word_projection_direct(const Word& x, const IntertwinerEngine& engine);
/// Numerical rank with the 1e-9 relative singular-value threshold.
Eigen::Index numerical_rank(const Eigen::MatrixXd& m);

/// V(xy, x (x) y): the inclusion H_{xy} -> H_x (x) H_y (ambient form).
Intertwiner inclusion_v(const Word& x, const Word& y, const IntertwinerEngine& engine);

struct VtildeResult {
  Intertwiner op;  // unnormalized Vtilde on ambient spaces
  double norm = 0.0;
  double proportionality = 0.0;
};
VtildeResult vtilde(const Word& s, const Word& v, const Word& t, const IntertwinerEngine& engine);

/// Closed form [|s|+|t|+|v|+1 choose |v|]^{1/2} [|s|+|v| choose |v|]^{-1/2} [|t|+|v| choose |v|]^{-1/2}
/// for s v bar(v) t alternating.
double vtilde_norm_closed_form(int s_len, int v_len, int t_len, QParams q);

/// Normalized categorical trace dim_q(w)^{-1} R_w^*(1 (x) T)R_w on End(ambient(w)).
double categorical_trace(const Intertwiner& t, const IntertwinerEngine& engine);
/// Same trace through the weighted matrix trace Tr(T D_w) / Tr(D_w).
double weighted_trace(const Intertwiner& t, const IntertwinerEngine& engine);

struct DefectResult {
  double defect = 0.0;
  /// Exponent e in the envelope C q^e.
  double exponent = 0.0;
};

/// || (1_u (x) V(z,x(x)y)) p_{uz} - (p_{ux} (x) 1_y)(1_u (x) V(z,x(x)y)) || on H_u (x) H_z.
DefectResult defect_audit(const Word& u, const Word& x, const Word& y, const Word& z,
                          const IntertwinerEngine& engine);

/// || (V(ux,uv(x)bar(v)x) (x) 1_y) V(ux,ux(x)y) - (1_{uv} (x) V(bar(v)x,bar(v)x(x)y)) V(ux,uv(x)bar(v)x) ||
/// on H_{ux}; exponent |x| - |y|/2.
DefectResult composite_defect_audit(const Word& u, const Word& v, const Word& x, const Word& y,
                                    const IntertwinerEngine& engine);

struct DefectScan {
  /// Distinct exponents with a defect above the floor, ascending, and the largest defect at each.
  std::vector<double> exponents;
  std::vector<double> max_defect;
  std::size_t cases = 0;
  std::size_t nonzero = 0;
  /// Fit of log(max defect) against the exponent, target log q.
  RateFit fit;
};

/// defect_audit over every u, y with 1 <= |u|, |y| <= 2, every nonempty x with |u|+|x|+|y| <= max_letters
/// and every component z of x (x) y.
DefectScan defect_scan(const IntertwinerEngine& engine, int max_letters, double floor = 1e-12);

struct VtildeScan {
  std::size_t triples = 0;
  /// max | ||Vtilde|| / closed form - 1 |.
  double max_relative_error = 0.0;
  double max_proportionality = 0.0;
  /// min and max of ||Vtilde|| / dim_q(v)^{1/2} over triples with v nonempty.
  double c_min = 0.0;
  double c_max = 0.0;
};

/// Every (s, v, t) with s v bar(v) t alternating, |v| >= 1, |s|+|v|+|t| <= max_total and
/// |s|+2|v|+|t| within the engine cap.
VtildeScan vtilde_scan(const IntertwinerEngine& engine, int max_total);

}  // namespace auf
