#include "auf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseLU>
#include <omp.h>

namespace auf::kernels {

SparseRowMatrix symmetrized(const SparseRowMatrix& w, const std::vector<double>& haar) {
  SparseRowMatrix a = w;
  for (int i = 0; i < a.outerSize(); ++i) {
    const double si = std::sqrt(haar[static_cast<std::size_t>(i)]);
    for (SparseRowMatrix::InnerIterator it(a, i); it; ++it) {
      it.valueRef() *= si / std::sqrt(haar[static_cast<std::size_t>(it.col())]);
    }
  }
  return a;
}

namespace {

template <bool Parallel>
void spmv_impl(const SparseRowMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  y.resize(a.rows());
  const int rows = static_cast<int>(a.rows());
  const int* outer = a.outerIndexPtr();
  const int* inner = a.innerIndexPtr();
  const double* val = a.valuePtr();
#pragma omp parallel for schedule(static) if (Parallel)
  for (int i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (int k = outer[i]; k < outer[i + 1]; ++k) acc += val[k] * x[inner[k]];
    y[i] = acc;
  }
}

template <bool Parallel>
PowerResult weighted_norm_impl(const SparseRowMatrix& w, const std::vector<double>& haar, double tol,
                               int max_iter) {
  const SparseRowMatrix a = symmetrized(w, haar);
  const SparseRowMatrix at = a.transpose();
  PowerResult out;
  if (a.rows() == 0) {
    out.converged = true;
    return out;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Ones(a.rows()).normalized();
  Eigen::VectorXd y(a.rows());
  Eigen::VectorXd z(a.rows());
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    spmv_impl<Parallel>(a, x, y);
    const double sigma = y.norm();
    out.norm = std::max(out.norm, sigma);
    out.iterations = it;
    if (sigma == 0.0) {
      out.converged = true;
      break;
    }
    if (it > 1 && std::abs(sigma - prev) <= tol * sigma) {
      out.converged = true;
      break;
    }
    prev = sigma;
    spmv_impl<Parallel>(at, y, z);
    const double zn = z.norm();
    if (zn == 0.0) {
      out.converged = true;
      break;
    }
    x = z / zn;
  }
  return out;
}

template <bool Parallel>
Eigen::MatrixXd neumann_impl(const SparseRowMatrix& w, const std::vector<int>& targets, int terms) {
  const Eigen::Index n = w.rows();
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(targets.size()));
  const int cols = static_cast<int>(targets.size());
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (int c = 0; c < cols; ++c) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[targets[static_cast<std::size_t>(c)]] = 1.0;
    Eigen::VectorXd acc = v;
    Eigen::VectorXd next(n);
    for (int k = 1; k <= terms; ++k) {
      spmv_impl<false>(w, v, next);
      v.swap(next);
      acc += v;
    }
    out.col(c) = acc;
  }
  return out;
}

Eigen::SparseMatrix<double> resolvent_operator(const SparseRowMatrix& w) {
  Eigen::SparseMatrix<double> a(w.rows(), w.cols());
  a.setIdentity();
  a -= Eigen::SparseMatrix<double>(w);
  a.makeCompressed();
  return a;
}

void check_factorization(const Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu) {
  if (lu.info() != Eigen::Success) fail(ErrorKind::Numerical, "sparse LU factorization of I - W failed");
}

inline double log_or_neg_inf(double g) {
  return g > 0.0 ? std::log(g) : -std::numeric_limits<double>::infinity();
}

template <bool Parallel>
HarnackScan harnack_impl(const ScanInput& in) {
  const Eigen::MatrixXd& g = *in.green;
  std::vector<int> idx;
  for (std::size_t i = 0; i < in.words.size(); ++i) {
    if (in.interior[i]) idx.push_back(static_cast<int>(i));
  }
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd lg(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) lg(a, b) = log_or_neg_inf(g(idx[a], idx[b]));
  }
  double min_log_delta = 0.0;
  long long triples = 0;
#pragma omp parallel for schedule(dynamic) reduction(min : min_log_delta) reduction(+ : triples) if (Parallel)
  for (int a = 0; a < m; ++a) {
    const Word& s = in.words[static_cast<std::size_t>(idx[a])];
    for (int c = 0; c < m; ++c) {
      if (c == a) continue;
      const Word& v = in.words[static_cast<std::size_t>(idx[c])];
      const double d = tree_distance(s, v);
      for (int b = 0; b < m; ++b) {
        // G(s,t) <= delta^{-d(s,v)} G(v,t), and the column version with b as the row.
        const double first = (lg(c, b) - lg(a, b)) / d;
        const double second = (lg(b, c) - lg(b, a)) / d;
        if (first < min_log_delta) min_log_delta = first;
        if (second < min_log_delta) min_log_delta = second;
        ++triples;
      }
    }
  }
  return HarnackScan{std::exp(min_log_delta), triples};
}

template <bool Parallel>
MultiplicativityScan multiplicativity_impl(const ScanInput& in) {
  const Eigen::MatrixXd& g = *in.green;
  const int n = static_cast<int>(in.words.size());
  const Domain& dom = in.domain;
  double lower = 0.0;
  double upper = 0.0;
  long long triples = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : lower, upper) reduction(+ : triples) if (Parallel)
  for (int i = 0; i < n; ++i) {
    if (!in.interior[static_cast<std::size_t>(i)]) continue;
    const Word& s = in.words[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      if (!in.interior[static_cast<std::size_t>(j)]) continue;
      const Word& t = in.words[static_cast<std::size_t>(j)];
      const double gst = g(i, j);
      for (const Word& v : geodesic(s, t)) {
        const auto k = dom.index_of(v);
        if (!k || !in.interior[*k]) continue;
        const double through = g(i, static_cast<Eigen::Index>(*k)) * g(static_cast<Eigen::Index>(*k), j);
        lower = std::max(lower, through / gst);
        upper = std::max(upper, gst / through);
        ++triples;
      }
    }
  }
  return MultiplicativityScan{lower, upper, triples};
}

}  // namespace

namespace serial {

void spmv(const SparseRowMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) { spmv_impl<false>(a, x, y); }

PowerResult weighted_norm(const SparseRowMatrix& w, const std::vector<double>& haar, double tol, int max_iter) {
  return weighted_norm_impl<false>(w, haar, tol, max_iter);
}

Eigen::MatrixXd neumann_columns(const SparseRowMatrix& w, const std::vector<int>& targets, int terms) {
  return neumann_impl<false>(w, targets, terms);
}

Eigen::MatrixXd green_solve(const SparseRowMatrix& w) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(resolvent_operator(w));
  check_factorization(lu);
  const Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(w.rows(), w.cols());
  return lu.solve(rhs);
}

HarnackScan harnack_scan(const ScanInput& in) { return harnack_impl<false>(in); }

MultiplicativityScan multiplicativity_scan(const ScanInput& in) { return multiplicativity_impl<false>(in); }

}  // namespace serial

namespace parallel {

void spmv(const SparseRowMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) { spmv_impl<true>(a, x, y); }

PowerResult weighted_norm(const SparseRowMatrix& w, const std::vector<double>& haar, double tol, int max_iter) {
  return weighted_norm_impl<true>(w, haar, tol, max_iter);
}

Eigen::MatrixXd neumann_columns(const SparseRowMatrix& w, const std::vector<int>& targets, int terms) {
  return neumann_impl<true>(w, targets, terms);
}

Eigen::MatrixXd green_solve(const SparseRowMatrix& w) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(resolvent_operator(w));
  check_factorization(lu);
  const Eigen::Index n = w.rows();
  Eigen::MatrixXd g(n, n);
  // Column blocks are independent right-hand sides for the shared factorization.
  constexpr Eigen::Index kBlock = 64;
  const Eigen::Index blocks = (n + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index c0 = b * kBlock;
    const Eigen::Index width = std::min(kBlock, n - c0);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, width);
    for (Eigen::Index c = 0; c < width; ++c) rhs(c0 + c, c) = 1.0;
    g.middleCols(c0, width) = lu.solve(rhs);
  }
  return g;
}

HarnackScan harnack_scan(const ScanInput& in) { return harnack_impl<true>(in); }

MultiplicativityScan multiplicativity_scan(const ScanInput& in) { return multiplicativity_impl<true>(in); }

}  // namespace parallel

}  // namespace auf::kernels
