#include "auf/intertwiner.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include <Eigen/SVD>

#include "auf/fusion.hpp"

namespace auf {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kRankThreshold = 1e-9;

Eigen::Index ipow(Eigen::Index base, int e) {
  Eigen::Index r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Flips each column so its first non-negligible coordinate is positive.
void fix_signs(Eigen::MatrixXd& b) {
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    const double scale = b.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      if (std::abs(b(r, c)) > 1e-8 * scale) {
        if (b(r, c) < 0.0) b.col(c) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace

ModelConfig ModelConfig::from_f_diag(std::vector<double> f_diag, int tensor_cap) {
  ModelConfig c;
  c.n = static_cast<int>(f_diag.size());
  if (c.n < 2) fail(ErrorKind::Config, "model needs n >= 2");
  if (tensor_cap < 1 || tensor_cap > kHardTensorCap) {
    fail(ErrorKind::Config, "tensorCap must lie in [1, " + std::to_string(kHardTensorCap) + "]");
  }
  double tr = 0.0;
  double tr_inv = 0.0;
  for (double f : f_diag) {
    if (!(f > 0.0) || !std::isfinite(f)) fail(ErrorKind::Config, "fDiag entries must be positive");
    c.rho_eigs.push_back(f * f);
    c.lambdas.push_back(1.0 / f);
    tr += f * f;
    tr_inv += 1.0 / (f * f);
  }
  if (std::abs(tr - tr_inv) > 1e-12 * std::max(tr, tr_inv)) {
    fail(ErrorKind::Config, "fDiag violates Tr(F*F) = Tr((F*F)^-1)");
  }
  // q + 1/q = tr, smaller root.
  c.q = 2.0 / (tr + std::sqrt(std::max(0.0, tr * tr - 4.0)));
  if (!(c.q < 1.0 - 1e-12)) fail(ErrorKind::Config, "q = 1 is excluded (F unitary up to scale)");
  c.f_diag = std::move(f_diag);
  c.tensor_cap = tensor_cap;
  return c;
}

ModelConfig ModelConfig::from_q(double q, int tensor_cap) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::Config, "q must lie in (0,1)");
  ModelConfig c = from_f_diag({std::sqrt(q), 1.0 / std::sqrt(q)}, tensor_cap);
  c.q = q;  // exact value, not the re-derived root
  return c;
}

std::uint64_t ModelConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const std::int64_t nn = n;
  mix(&nn, sizeof nn);
  for (double l : lambdas) mix(&l, sizeof l);
  return h;
}

Eigen::MatrixXd apply_mid(const Eigen::MatrixXd& x, Eigen::Index left, Eigen::Index right, const Eigen::MatrixXd& op) {
  const Eigen::Index mid_in = op.cols();
  const Eigen::Index mid_out = op.rows();
  if (x.rows() != left * mid_in * right) fail(ErrorKind::InvalidArgument, "apply_mid: shape mismatch");
  Eigen::MatrixXd out(left * mid_out * right, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double* in = x.data() + c * x.rows();
    double* dst = out.data() + c * out.rows();
    if (right == 1) {
      // One GEMM: (left x mid_in) row-major times op^T.
      Eigen::Map<const RowMat> a(in, left, mid_in);
      Eigen::Map<RowMat> b(dst, left, mid_out);
      b.noalias() = a * op.transpose();
      continue;
    }
    for (Eigen::Index l = 0; l < left; ++l) {
      Eigen::Map<const RowMat> a(in + l * mid_in * right, mid_in, right);
      Eigen::Map<RowMat> b(dst + l * mid_out * right, mid_out, right);
      b.noalias() = op * a;
    }
  }
  return out;
}

std::optional<Decomposition> decompose(const Word& z, const Word& x, const Word& y) {
  const int kmax = std::min(x.length(), y.length());
  for (int k = 0; k <= kmax; ++k) {
    const Word v = x.suffix(k);
    if (!y.starts_with(v.bar())) continue;
    Decomposition d{x.drop_back(k), v, y.drop_front(k)};
    if (d.source() == z) return d;
  }
  return std::nullopt;
}

IntertwinerEngine::IntertwinerEngine(ModelConfig cfg) : cfg_(std::move(cfg)) {
  for (double l : cfg_.lambdas) letter_qdim_ += l * l;
}

Eigen::Index IntertwinerEngine::ambient_dim(int letters) const { return ipow(cfg_.n, letters); }

void IntertwinerEngine::require_cap(int letters, const char* what) const {
  if (letters > cfg_.tensor_cap) {
    fail(ErrorKind::ResourceCap, std::string(what) + " needs " + std::to_string(letters) +
                                     " tensor letters, above tensorCap " + std::to_string(cfg_.tensor_cap));
  }
}

namespace {

// R_a(1) in ambient(bar(a) a).
Eigen::VectorXd letter_cup(const std::vector<double>& lambdas, Letter a) {
  const auto n = static_cast<Eigen::Index>(lambdas.size());
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = lambdas[static_cast<std::size_t>(i)];
    r[i * n + i] = a == Letter::A ? l : 1.0 / l;
  }
  return r;
}

}  // namespace

Eigen::VectorXd IntertwinerEngine::tensor_cup(const Word& w) const {
  Eigen::VectorXd r = Eigen::VectorXd::Ones(1);
  // R_{x (x) a} = (1_a-bar (x) R_x (x) 1_a) R_a, peeling letters from the right.
  for (int i = 0; i < w.length(); ++i) {
    const Eigen::VectorXd ra = letter_cup(cfg_.lambdas, w.at(i));
    if (i == 0) {
      r = ra;
      continue;
    }
    Eigen::MatrixXd inner = r;  // op: scalar -> ambient(bar(x) x)
    r = apply_mid(ra, cfg_.n, cfg_.n, inner).col(0);
  }
  return r;
}

Eigen::VectorXd IntertwinerEngine::standard_cup(const Word& x) const {
  const int k = x.length();
  Eigen::MatrixXd r = tensor_cup(x);
  r = project(x.bar(), r, 0, 2 * k);
  r = project(x, r, k, 2 * k);
  return r.col(0);
}

Eigen::MatrixXd IntertwinerEngine::build_alternating_basis(const Word& x) const {
  const int k = x.length();
  const Eigen::Index n = cfg_.n;
  if (k == 0) return Eigen::MatrixXd::Ones(1, 1);
  if (k == 1) return Eigen::MatrixXd::Identity(n, n);
  const auto prev = alternating_basis(x.drop_back(1));
  const Eigen::Index d_prev = prev->cols();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(prev->rows() * n, d_prev * n);
  for (Eigen::Index j = 0; j < d_prev; ++j) {
    for (Eigen::Index a = 0; a < prev->rows(); ++a) {
      const double v = (*prev)(a, j);
      if (v == 0.0) continue;
      for (Eigen::Index i = 0; i < n; ++i) c(a * n + i, j * n + i) = v;
    }
  }
  const Eigen::MatrixXd cup = letter_cup(cfg_.lambdas, x.last()).transpose();
  const Eigen::MatrixXd m = apply_mid(c, ipow(n, k - 2), 1, cup);
  // Null space of the stacked contraction: columns j of c with m * coeffs = 0.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankThreshold * smax) ++rank;
  }
  const Eigen::MatrixXd null = svd.matrixV().rightCols(svd.matrixV().cols() - rank);
  Eigen::MatrixXd b = c * null;
  fix_signs(b);
  return b;
}

std::shared_ptr<const Eigen::MatrixXd> IntertwinerEngine::alternating_basis(const Word& x) const {
  {
    std::shared_lock lock(basis_mutex_);
    if (auto it = bases_.find(x); it != bases_.end()) return it->second;
  }
  auto built = std::make_shared<const Eigen::MatrixXd>(build_alternating_basis(x));
  std::unique_lock lock(basis_mutex_);
  auto [it, inserted] = bases_.emplace(x, std::move(built));
  return it->second;
}

Eigen::Index IntertwinerEngine::word_dim(const Word& x) const {
  Eigen::Index d = 1;
  for (const Word& f : indecomposable_factors(x)) d *= alternating_basis(f)->cols();
  return d;
}

Eigen::MatrixXd IntertwinerEngine::word_basis(const Word& x, Eigen::Index start, Eigen::Index count) const {
  std::vector<std::shared_ptr<const Eigen::MatrixXd>> factors;
  for (const Word& f : indecomposable_factors(x)) factors.push_back(alternating_basis(f));
  const Eigen::Index rows = ambient_dim(x.length());
  Eigen::MatrixXd out(rows, count);
  std::vector<Eigen::Index> digit(factors.size());
  for (Eigen::Index c = 0; c < count; ++c) {
    Eigen::Index j = start + c;
    for (std::size_t f = factors.size(); f-- > 0;) {
      digit[f] = j % factors[f]->cols();
      j /= factors[f]->cols();
    }
    Eigen::VectorXd v = Eigen::VectorXd::Ones(1);
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const auto col = factors[f]->col(digit[f]);
      Eigen::VectorXd next(v.size() * col.size());
      for (Eigen::Index a = 0; a < v.size(); ++a) next.segment(a * col.size(), col.size()) = v[a] * col;
      v.swap(next);
    }
    out.col(c) = v;
  }
  return out;
}

Eigen::MatrixXd IntertwinerEngine::project(const Word& x, const Eigen::MatrixXd& v, int offset, int total) const {
  Eigen::MatrixXd out = v;
  int pos = offset;
  for (const Word& f : indecomposable_factors(x)) {
    const int len = f.length();
    if (len >= 2) {
      const auto b = alternating_basis(f);
      const Eigen::Index left = ambient_dim(pos);
      const Eigen::Index right = ambient_dim(total - pos - len);
      out = apply_mid(apply_mid(out, left, right, b->transpose()), left, right, *b);
    }
    pos += len;
  }
  return out;
}

VtildeNorm IntertwinerEngine::compute_vtilde_norm(const Decomposition& d) const {
  const Word st = d.source();
  constexpr Eigen::Index kProbes = 32;
  const Eigen::Index k = std::min(word_dim(st), kProbes);
  const Eigen::MatrixXd probe = word_basis(st, 0, k);
  const Eigen::MatrixXd y = apply_v(d, probe, 0, st.length(), false);
  const Eigen::MatrixXd gram = y.transpose() * y;
  const double c2 = gram.trace() / static_cast<double>(k);
  if (!(c2 > 0.0)) fail(ErrorKind::Numerical, "Vtilde vanishes for " + d.s.str() + "," + d.v.str() + "," + d.t.str());
  VtildeNorm out;
  out.norm = std::sqrt(c2);
  out.proportionality = (gram - c2 * Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() / c2;
  if (out.proportionality > 1e-9) {
    fail(ErrorKind::Numerical, "Vtilde is not proportional to an isometry for " + d.s.str() + "," + d.v.str() + "," +
                                   d.t.str());
  }
  return out;
}

VtildeNorm IntertwinerEngine::vtilde_norm(const Decomposition& d) const {
  const NormKey key{d.s, d.v, d.t};
  {
    std::shared_lock lock(norm_mutex_);
    if (auto it = norms_.find(key); it != norms_.end()) return it->second;
  }
  const VtildeNorm v = compute_vtilde_norm(d);
  std::unique_lock lock(norm_mutex_);
  norms_.emplace(key, v);
  return v;
}

Eigen::MatrixXd IntertwinerEngine::apply_v(const Decomposition& d, const Eigen::MatrixXd& x, int offset, int total,
                                           bool normalized) const {
  const int ls = d.s.length();
  const int lv = d.v.length();
  const int out_total = total + 2 * lv;
  require_cap(out_total, "isometry V");
  Eigen::MatrixXd y = project(d.source(), x, offset, total);
  if (lv > 0) {
    const Eigen::MatrixXd cobar = standard_cobar(d.v);
    y = apply_mid(y, ambient_dim(offset + ls), ambient_dim(total - offset - ls), cobar);
  }
  y = project(d.left(), y, offset, out_total);
  y = project(d.right(), y, offset + ls + lv, out_total);
  if (normalized && lv > 0) y /= vtilde_norm(d).norm;
  return y;
}

Eigen::MatrixXd IntertwinerEngine::apply_v_adjoint(const Decomposition& d, const Eigen::MatrixXd& x, int offset,
                                                   int total) const {
  const int ls = d.s.length();
  const int lv = d.v.length();
  Eigen::MatrixXd y = project(d.right(), x, offset + ls + lv, total);
  y = project(d.left(), y, offset, total);
  if (lv > 0) {
    const Eigen::MatrixXd cobar_t = standard_cobar(d.v).transpose();
    y = apply_mid(y, ambient_dim(offset + ls), ambient_dim(total - offset - ls - 2 * lv), cobar_t);
    y /= vtilde_norm(d).norm;
  }
  return project(d.source(), y, offset, total - 2 * lv);
}

Eigen::VectorXd IntertwinerEngine::trace_weights(const Word& w) const {
  Eigen::VectorXd d = Eigen::VectorXd::Ones(1);
  for (int i = 0; i < w.length(); ++i) {
    const Eigen::Index n = cfg_.n;
    Eigen::VectorXd next(d.size() * n);
    for (Eigen::Index a = 0; a < d.size(); ++a) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double l = cfg_.lambdas[static_cast<std::size_t>(j)];
        next[a * n + j] = d[a] * (w.at(i) == Letter::A ? l * l : 1.0 / (l * l));
      }
    }
    d.swap(next);
  }
  return d;
}

DualityMaps build_duality_maps(const IntertwinerEngine& engine) {
  const Word a = Word::letter(Letter::A);
  const Word b = Word::letter(Letter::B);
  const Word ba = b.concat(a);
  const Word ab = a.concat(b);
  Intertwiner r_a{Word{}, ba, letter_cup(engine.config().lambdas, Letter::A)};
  Intertwiner rbar_a{Word{}, ab, letter_cup(engine.config().lambdas, Letter::B)};
  return DualityMaps{r_a, rbar_a, rbar_a, r_a};
}

double conjugate_equation_residual(const IntertwinerEngine& engine) {
  const Eigen::Index n = engine.n();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  double worst = 0.0;
  for (Letter a : {Letter::A, Letter::B}) {
    const Eigen::MatrixXd r = letter_cup(engine.config().lambdas, a);               // bar(a) a
    const Eigen::MatrixXd rbar = letter_cup(engine.config().lambdas, conjugate(a));  // a bar(a)
    // (rbar^* (x) 1)(1 (x) r) = 1 on H_a, and (r^* (x) 1)(1 (x) rbar) = 1 on H_bar(a).
    const Eigen::MatrixXd first = apply_mid(apply_mid(id, n, 1, r), 1, n, rbar.transpose());
    const Eigen::MatrixXd second = apply_mid(apply_mid(id, n, 1, rbar), 1, n, r.transpose());
    worst = std::max({worst, (first - id).cwiseAbs().maxCoeff(), (second - id).cwiseAbs().maxCoeff()});
    worst = std::max(worst, std::abs(r.squaredNorm() - engine.letter_qdim()));
  }
  return worst;
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankThreshold * sv[0]) ++rank;
  }
  return rank;
}

Intertwiner word_projection(const Word& x, const IntertwinerEngine& engine) {
  engine.require_cap(x.length(), "word projection");
  const Eigen::MatrixXd b = engine.word_basis(x);
  return Intertwiner{x, x, b * b.transpose()};
}

Intertwiner word_projection_direct(const Word& x, const IntertwinerEngine& engine) {
  engine.require_cap(x.length(), "word projection");
  const int k = x.length();
  const Eigen::Index dim = engine.ambient_dim(k);
  std::vector<Eigen::MatrixXd> images;
  Eigen::Index cols = 0;
  for (int i = 0; i + 1 < k; ++i) {
    if (x.at(i) == x.at(i + 1)) continue;
    const Eigen::MatrixXd cup = letter_cup(engine.config().lambdas, x.at(i + 1));
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(engine.ambient_dim(k - 2), engine.ambient_dim(k - 2));
    images.push_back(apply_mid(id, engine.ambient_dim(i), engine.ambient_dim(k - i - 2), cup));
    cols += images.back().cols();
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(dim, dim);
  if (cols == 0) return Intertwiner{x, x, p};
  Eigen::MatrixXd span(dim, cols);
  Eigen::Index at = 0;
  for (const auto& im : images) {
    span.middleCols(at, im.cols()) = im;
    at += im.cols();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(span, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankThreshold * sv[0]) ++rank;
  }
  const Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
  p -= u * u.transpose();
  return Intertwiner{x, x, p};
}

Intertwiner inclusion_v(const Word& x, const Word& y, const IntertwinerEngine& engine) {
  const Word xy = x.concat(y);
  engine.require_cap(xy.length(), "inclusion V");
  const Decomposition d{x, Word{}, y};
  const Eigen::Index dim = engine.ambient_dim(xy.length());
  return Intertwiner{xy, xy, engine.apply_v(d, Eigen::MatrixXd::Identity(dim, dim), 0, xy.length())};
}

VtildeResult vtilde(const Word& s, const Word& v, const Word& t, const IntertwinerEngine& engine) {
  const Decomposition d{s, v, t};
  const int total = s.length() + 2 * v.length() + t.length();
  engine.require_cap(total, "Vtilde");
  const Word st = d.source();
  const Eigen::Index dim = engine.ambient_dim(st.length());
  const VtildeNorm norm = engine.vtilde_norm(d);
  VtildeResult out;
  out.op = Intertwiner{st, d.left().concat(d.right()),
                       engine.apply_v(d, Eigen::MatrixXd::Identity(dim, dim), 0, st.length(), false)};
  out.norm = norm.norm;
  out.proportionality = norm.proportionality;
  return out;
}

double vtilde_norm_closed_form(int s_len, int v_len, int t_len, QParams q) {
  const double num = qbinom(s_len + t_len + v_len + 1, v_len, q);
  const double a = qbinom(s_len + v_len, v_len, q);
  const double b = qbinom(t_len + v_len, v_len, q);
  return std::sqrt(num / (a * b));
}

namespace {

void require_square(const Intertwiner& t, const IntertwinerEngine& engine) {
  const Eigen::Index dim = engine.ambient_dim(t.source.length());
  if (t.source != t.target || t.values.rows() != dim || t.values.cols() != dim) {
    fail(ErrorKind::InvalidArgument, "trace needs a square endomorphism of a tensor word");
  }
}

}  // namespace

double categorical_trace(const Intertwiner& t, const IntertwinerEngine& engine) {
  require_square(t, engine);
  const Word& w = t.source;
  const Eigen::MatrixXd r = engine.tensor_cup(w);
  const Eigen::MatrixXd tr = apply_mid(r, engine.ambient_dim(w.length()), 1, t.values);
  return (r.transpose() * tr)(0, 0) / std::pow(engine.letter_qdim(), w.length());
}

double weighted_trace(const Intertwiner& t, const IntertwinerEngine& engine) {
  require_square(t, engine);
  const Eigen::VectorXd d = engine.trace_weights(t.source);
  return d.dot(t.values.diagonal()) / d.sum();
}

namespace {

Eigen::MatrixXd kron_basis(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Eigen::VectorXd col(a.rows() * b.rows());
      for (Eigen::Index r = 0; r < a.rows(); ++r) col.segment(r * b.rows(), b.rows()) = a(r, i) * b.col(j);
      out.col(i * b.cols() + j) = col;
    }
  }
  return out;
}

double operator_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

Decomposition require_decomposition(const Word& z, const Word& x, const Word& y) {
  auto d = decompose(z, x, y);
  if (!d) fail(ErrorKind::InvalidArgument, z.str() + " does not occur in " + x.str() + " (x) " + y.str());
  return *d;
}

}  // namespace

DefectResult defect_audit(const Word& u, const Word& x, const Word& y, const Word& z,
                          const IntertwinerEngine& engine) {
  const Decomposition d = require_decomposition(z, x, y);
  const int lu = u.length();
  const int total_in = lu + z.length();
  const int total_out = lu + x.length() + y.length();
  engine.require_cap(total_out, "defect audit");
  const Eigen::MatrixXd basis = kron_basis(engine.word_basis(u), engine.word_basis(z));
  const Eigen::MatrixXd first = engine.apply_v(d, engine.project(u.concat(z), basis, 0, total_in), lu, total_in);
  const Eigen::MatrixXd second = engine.project(u.concat(x), engine.apply_v(d, basis, lu, total_in), 0, total_out);
  DefectResult out;
  out.defect = operator_norm(first - second);
  out.exponent = 0.5 * (z.length() + x.length() - y.length());
  return out;
}

DefectResult composite_defect_audit(const Word& u, const Word& v, const Word& x, const Word& y,
                                    const IntertwinerEngine& engine) {
  const Word ux = u.concat(x);
  const Word uv = u.concat(v);
  const Word vbx = v.bar().concat(x);
  const Decomposition split = require_decomposition(ux, uv, vbx);
  const Decomposition grow = require_decomposition(ux, ux, y);
  const Decomposition grow_right = require_decomposition(vbx, vbx, y);
  const int total = uv.length() + vbx.length() + y.length();
  engine.require_cap(total, "composite defect audit");
  const Eigen::MatrixXd basis = engine.word_basis(ux);
  const int lux = ux.length();
  const Eigen::MatrixXd first = engine.apply_v(split, engine.apply_v(grow, basis, 0, lux), 0, lux + y.length());
  const Eigen::MatrixXd second =
      engine.apply_v(grow_right, engine.apply_v(split, basis, 0, lux), uv.length(), uv.length() + vbx.length());
  DefectResult out;
  out.defect = operator_norm(first - second);
  out.exponent = x.length() - 0.5 * y.length();
  return out;
}

}  // namespace auf

namespace auf {

DefectScan defect_scan(const IntertwinerEngine& engine, int max_letters, double floor) {
  DefectScan out;
  std::map<double, double> best;
  for (int lu = 1; lu <= 2; ++lu) {
    for (const Word& u : ball(lu)) {
      if (u.length() != lu) continue;
      for (int ly = 1; ly <= 2; ++ly) {
        for (const Word& y : ball(ly)) {
          if (y.length() != ly) continue;
          const int room = max_letters - lu - ly;
          if (room < 1) continue;
          for (const Word& x : ball(room)) {
            if (x.empty()) continue;
            for (const Word& z : fuse(x, y)) {
              const DefectResult r = defect_audit(u, x, y, z, engine);
              ++out.cases;
              if (r.defect > floor) {
                ++out.nonzero;
                double& b = best[r.exponent];
                b = std::max(b, r.defect);
              }
            }
          }
        }
      }
    }
  }
  for (const auto& [e, d] : best) {
    out.exponents.push_back(e);
    out.max_defect.push_back(d);
  }
  if (out.exponents.size() >= 2) out.fit = fit_rate(out.exponents, out.max_defect, engine.config().q, floor);
  return out;
}

VtildeScan vtilde_scan(const IntertwinerEngine& engine, int max_total) {
  VtildeScan out;
  const QParams q = engine.config().qparams();
  out.c_min = std::numeric_limits<double>::infinity();
  for (const Word& v : ball(max_total)) {
    if (v.empty()) continue;
    for (const Word& s : ball(max_total - v.length())) {
      for (const Word& t : ball(max_total - v.length() - s.length())) {
        const Word whole = s.concat(v).concat(v.bar()).concat(t);
        if (whole.length() > engine.config().tensor_cap) continue;
        if (indecomposable_factors(whole).size() > 1) continue;
        const VtildeResult r = vtilde(s, v, t, engine);
        const double closed = vtilde_norm_closed_form(s.length(), v.length(), t.length(), q);
        out.max_relative_error = std::max(out.max_relative_error, std::abs(r.norm / closed - 1.0));
        out.max_proportionality = std::max(out.max_proportionality, r.proportionality);
        const double c = r.norm / std::sqrt(qdim(v, q));
        out.c_min = std::min(out.c_min, c);
        out.c_max = std::max(out.c_max, c);
        ++out.triples;
      }
    }
  }
  if (out.triples == 0) out.c_min = 0.0;
  return out;
}

}  // namespace auf
