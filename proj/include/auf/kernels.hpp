#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference and an OpenMP version with identical results (up to reduction
// order). Tests compare the two; bench/ times them.

#include <vector>

#include <Eigen/Dense>

#include "auf/fusion.hpp"

namespace auf::kernels {

struct PowerResult {
  double norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct ScanInput {
  const Eigen::MatrixXd* green = nullptr;  // G(s,t), rows s, cols t over the domain
  Domain domain = Domain::ball(0);
  std::vector<Word> words;                  // domain order
  std::vector<char> interior;               // audit only over these
};

struct HarnackScan {
  /// Largest delta with G(s,t) <= delta^{-d(s,v)} G(v,t) and G(s,t) <= delta^{-d(t,v)} G(s,v).
  double empirical_delta = 1.0;
  long long triples = 0;
};

struct MultiplicativityScan {
  double lower = 0.0;  // max G(s,v)G(v,t)/G(s,t)
  double upper = 0.0;  // max G(s,t)/(G(s,v)G(v,t))
  long long triples = 0;
};

#define AUF_KERNEL_SET                                                                          \
  void spmv(const SparseRowMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);            \
  /** Operator norm of W on l^2(domain, m) by power iteration on A^T A, A = M^1/2 W M^-1/2. */ \
  PowerResult weighted_norm(const SparseRowMatrix& w, const std::vector<double>& haar,          \
                            double tol = 1e-14, int max_iter = 20000);                          \
  /** Columns of sum_{k<=terms} W^k at the given targets (one output column per target). */    \
  Eigen::MatrixXd neumann_columns(const SparseRowMatrix& w, const std::vector<int>& targets,     \
                                  int terms);                                                   \
  /** Solves (I - W) G = I; rows s, cols t. */                                                  \
  Eigen::MatrixXd green_solve(const SparseRowMatrix& w);                                        \
  HarnackScan harnack_scan(const ScanInput& in);                                                \
  MultiplicativityScan multiplicativity_scan(const ScanInput& in);

namespace serial {
AUF_KERNEL_SET
}  // namespace serial

namespace parallel {
AUF_KERNEL_SET
}  // namespace parallel

#undef AUF_KERNEL_SET

/// M^1/2 W M^-1/2 for Haar weights m.
SparseRowMatrix symmetrized(const SparseRowMatrix& w, const std::vector<double>& haar);

}  // namespace auf::kernels
