#include "auf/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "auf/perturbed.hpp"

namespace auf {

using nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

OutputWriter::OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) fail(ErrorKind::Config, "cannot create output directory " + dir_.string() + ": " + ec.message());
}

void OutputWriter::write(const std::string& name, const std::string& content) {
  std::lock_guard lock(mutex_);
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Config, "cannot write " + path.string());
  out << content;
  if (!out) fail(ErrorKind::Config, "write failed for " + path.string());
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
      return 2;
    case ErrorKind::ResourceCap:
      return 3;
    case ErrorKind::Numerical:
      return 1;
  }
  return 1;
}

namespace {

// Numbers go through fmt17 so the JSON text is fixed by the values alone.
ordered_json num(double v) {
  if (!std::isfinite(v)) return fmt17(v);
  return ordered_json::parse(fmt17(v));
}

void require_dense(int radius) {
  if (radius > kMaxDenseRadius) {
    fail(ErrorKind::ResourceCap, "ballRadius " + std::to_string(radius) + " exceeds the dense Green limit " +
                                     std::to_string(kMaxDenseRadius));
  }
}

GreenOptions green_options(const RunConfig& cfg) {
  GreenOptions o;
  o.seed = cfg.seed;
  return o;
}

struct Classical {
  Measure mu;
  TransitionMatrix p;
  KernelTable g;
  IrreducibilityWitness witness;
  double norm_bound = 0.0;
};

Classical classical(const RunConfig& cfg) {
  require_dense(cfg.ball_radius);
  Classical c{cfg.make_measure(), build_transition_matrix(cfg.make_measure(), Domain::ball(cfg.ball_radius),
                                                          cfg.model.qparams()),
              {}, {}, 0.0};
  c.norm_bound = norm_upper_bound(c.mu, cfg.model.qparams());
  c.g = green_table(c.p, Word{}, green_options(cfg));
  // The witness needs interior edges; small balls borrow a larger one.
  const int wr = std::min(kMaxDenseRadius, std::max(cfg.ball_radius, 4 * c.mu.range()));
  c.witness = wr == cfg.ball_radius ? irreducibility_witness(c.p)
                                    : irreducibility_witness(build_transition_matrix(c.mu, Domain::ball(wr),
                                                                                     cfg.model.qparams()));
  return c;
}

double max_diagonal(const KernelTable& t) { return t.green.size() ? t.green.diagonal().maxCoeff() : 0.0; }

AuditEntry entry(std::string name, std::string anchor, double measured, double bound, bool pass) {
  return AuditEntry{std::move(name), std::move(anchor), measured, bound, pass, {}};
}

AuditEntry below(std::string name, std::string anchor, double measured, double bound) {
  return entry(std::move(name), std::move(anchor), measured, bound, measured < bound);
}

struct Branch {
  BranchContext ctx;
  std::unique_ptr<QhatStore> store;
  QMatrix m;
};

Branch branch(const RunConfig& cfg, const Measure& mu, const IntertwinerEngine& engine, std::ostream& log) {
  const int rq = std::min(cfg.ball_radius, max_q_radius(cfg.branch_z, mu.range(), cfg.tensor_cap));
  if (rq < cfg.branch_z.length()) {
    fail(ErrorKind::ResourceCap, "tensorCap " + std::to_string(cfg.tensor_cap) + " leaves no room for the branch of " +
                                     cfg.branch_z.str());
  }
  Branch b{BranchContext::make(cfg.branch_z, rq), nullptr, {build_transition_matrix(mu, Domain::ball(0), cfg.model.qparams()),
                                                         build_transition_matrix(mu, Domain::ball(0), cfg.model.qparams()),
                                                         {}, {}}};
  if (!cfg.qhat_cache.empty()) b.store = std::make_unique<QhatStore>(cfg.qhat_cache);
  b.m = q_matrix(mu, b.ctx, engine, b.store.get());
  if (b.store) {
    log << "qhat cache " << cfg.qhat_cache.string() << ": " << b.store->hits() << " hits, " << b.store->misses()
        << " misses";
    if (b.store->skipped_lines()) log << ", " << b.store->skipped_lines() << " unreadable lines skipped";
    log << "\n";
  }
  return b;
}

std::vector<Word> boundary_bases(const RunConfig& cfg, const std::vector<Word>& ray) {
  if (!cfg.boundary_s.empty()) return cfg.boundary_s;
  std::vector<Word> s(ray.begin(), ray.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(5, ray.size())));
  return s;
}

// Fills rows per ray; shared by the boundary subcommand and the audit.
struct RayResult {
  std::vector<Word> points;
  std::vector<BoundarySummary> summaries;
  std::vector<Word> outside;  // base points outside the branch (K_Q undefined)
  std::vector<BoundaryProfile> p_only;
};

RayResult run_ray(const RunConfig& cfg, const Ray& ray, const KernelTable& gq, const KernelTable& gp,
                  const BranchContext& ctx) {
  RayResult r;
  r.points = ray_points(ray, std::min(ctx.omega.radius(), gp.domain.radius()), ctx.z);
  if (r.points.size() < 3) {
    fail(ErrorKind::Config, "ray (" + ray.preperiod.str() + ", " + ray.period.str() +
                                ") has fewer than three points inside the branch domain");
  }
  std::vector<Word> inside;
  for (const Word& s : boundary_bases(cfg, r.points)) {
    if (!gp.contains(s)) fail(ErrorKind::Config, "boundary base " + s.str() + " outside ball(" +
                                                     std::to_string(gp.domain.radius()) + ")");
    if (ctx.in_omega(s)) {
      inside.push_back(s);
    } else {
      r.outside.push_back(s);
      r.p_only.push_back(boundary_profile(gp, s, r.points));
    }
  }
  r.summaries = boundary_positivity_and_ratio(gq, gp, r.points, inside);
  return r;
}

std::string boundary_csv(const RayResult& r) {
  std::string out = "s,n,t,K_P,K_Q,ratio,cauchyGap,truncationBound\n";
  for (const BoundarySummary& b : r.summaries) {
    for (const BoundaryRow& row : b.rows) {
      out += row.s.str() + "," + std::to_string(row.n) + "," + row.t.str() + "," + fmt17(row.kp) + "," +
             fmt17(row.kq) + "," + fmt17(row.ratio) + "," + fmt17(row.gap_q) + "," + fmt17(row.trunc_q) + "\n";
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const BoundaryProfile& p : r.p_only) {
    for (const ProfilePoint& pt : p.points) {
      out += p.s.str() + "," + std::to_string(pt.n) + "," + pt.t.str() + "," + fmt17(pt.k) + "," + fmt17(nan) + "," +
             fmt17(nan) + "," + fmt17(pt.gap) + "," + fmt17(nan) + "\n";
    }
  }
  return out;
}

// Ratio column moves toward 1: |1 - ratio| at the last base is below the first.
bool ratio_trend(const std::vector<BoundarySummary>& s) {
  if (s.size() < 2) return false;
  return std::abs(1.0 - s.back().ratio_near) < std::abs(1.0 - s.front().ratio_near);
}

}  // namespace

std::vector<AuditEntry> run_audits(const RunConfig& cfg, std::ostream& log) {
  std::vector<AuditEntry> out;
  const double tol = cfg.tolerances.audit;
  const QParams qp = cfg.model.qparams();

  log << "classical layer: ball(" << cfg.ball_radius << ")\n";
  const Classical c = classical(cfg);
  {
    const auto sums = c.p.row_sums();
    double worst = 0.0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (c.p.domain.is_interior(c.p.domain.word_at(i), c.p.range)) worst = std::max(worst, std::abs(sums[i] - 1.0));
    }
    out.push_back(below("stochasticity", "row sums of the transition probabilities", worst, tol));
  }
  out.push_back(below("dual_measure", "dual measure identity", dual_audit(c.mu, Domain::ball(std::min(cfg.ball_radius, 8)), qp),
                      tol));
  {
    auto e = entry("norm_bound", "norm lemma: bounded operator on l2(m)", c.g.power_norm, c.norm_bound + 1e-8,
                   c.g.power_norm <= c.norm_bound + 1e-8 && c.g.power_norm < 1.0);
    out.push_back(e);
  }
  out.push_back(below("green_residual", "Green kernel as a resolvent", c.g.residual, cfg.tolerances.solver));
  {
    auto e = entry("neumann_cross_check", "Green kernel as a series", c.g.neumann_deviation, c.g.neumann_bound,
                   c.g.neumann_deviation <= c.g.neumann_bound);
    e.extra = {{"terms", c.g.neumann_terms}, {"maxEntry", c.g.neumann_max_entry},
               {"weightedRatio", c.g.neumann_weighted_ratio}};
    out.push_back(e);
  }
  {
    const double lam = c.g.power_norm;
    const double bound = lam < 1.0 ? 1.0 / (1.0 - lam) : std::numeric_limits<double>::infinity();
    out.push_back(entry("green_diagonal", "G(v,v) <= 1/(1 - lambda)", max_diagonal(c.g), bound,
                        max_diagonal(c.g) <= bound));
  }
  if (cfg.ball_radius >= 2 * c.mu.range() + 2) {
    const HarnackResult h = harnack_audit(c.g, c.witness);
    auto e = entry("harnack", "uniform Harnack inequality, delta = delta0^K", h.empirical_delta, h.paper_delta, h.pass);
    e.extra = {{"delta0", c.witness.delta0}, {"K", c.witness.k_steps}, {"triples", static_cast<double>(h.triples)}};
    out.push_back(e);
    const MultiplicativityResult m = multiplicativity_audit(c.g, c.g.power_norm, h.paper_delta);
    auto lo = entry("multiplicativity_lower", "almost multiplicativity along geodesics, C1 = 1/(1 - lambda)", m.lower,
                    m.lower_bound, m.lower <= m.lower_bound);
    lo.extra = {{"triples", static_cast<double>(m.triples)}};
    out.push_back(lo);
    out.push_back(entry("multiplicativity_upper", "almost multiplicativity along geodesics, 3 (2/delta^2)^(S-1)",
                        m.upper, m.upper_bound, m.upper <= m.upper_bound));
  } else {
    log << "ball too small for the Harnack and multiplicativity scans; skipped\n";
  }
  if (cfg.ball_radius > cfg.branch_z.length()) {
    const Domain sub = Domain::branch(cfg.branch_z, cfg.ball_radius);
    const KernelTable gb = green_table(restrict_to(c.p, sub), cfg.branch_z, green_options(cfg));
    const LastEntryResult le = last_entry_audit(cfg.branch_z, c.p, c.g, gb);
    const double bound = c.mu.range() == 1
                             ? 1e-8
                             : truncation_error_bound(cfg.ball_radius, Word{}, cfg.branch_z, c.g.power_norm,
                                                      c.mu.range(), qp);
    auto e = below("last_entry", "last entry into the branch", le.residual, bound);
    e.extra = {{"pairs", static_cast<double>(le.pairs)}};
    out.push_back(e);
  }

  log << "intertwiner layer: tensorCap " << cfg.tensor_cap << "\n";
  const IntertwinerEngine engine(cfg.model);
  out.push_back(below("conjugate_equations", "standard solutions of the conjugate equations",
                      conjugate_equation_residual(engine), 1e-10));
  {
    const Eigen::VectorXd r = engine.tensor_cup(Word::parse("a"));
    out.push_back(below("r_star_r", "R*R = q + 1/q", std::abs(r.squaredNorm() - (qp.q() + 1.0 / qp.q())), 1e-10));
  }
  {
    double worst = 0.0;
    const int maxlen = std::min(7, cfg.tensor_cap);
    for (const Word& x : ball(maxlen)) {
      const auto want = static_cast<double>(fusion_dim(x, cfg.model.n));
      const auto r1 = static_cast<double>(numerical_rank(word_projection(x, engine).values));
      const auto r2 = static_cast<double>(numerical_rank(word_projection_direct(x, engine).values));
      worst = std::max({worst, std::abs(r1 - want), std::abs(r2 - want)});
    }
    auto e = entry("fusion_rank", "rank p_x equals the fusion dimension", worst, 0.0, worst == 0.0);
    e.extra = {{"maxLength", maxlen}};
    out.push_back(e);
  }
  {
    const VtildeScan v = vtilde_scan(engine, 6);
    auto e = below("vtilde_closed_form", "norm of Vtilde by q-binomials", v.max_relative_error, 1e-8);
    e.extra = {{"triples", static_cast<double>(v.triples)}, {"proportionality", v.max_proportionality}};
    out.push_back(e);
    auto b = entry("vtilde_bounds", "c dim_q(v)^(1/2) <= norm <= dim_q(v)^(1/2)", v.c_min, 0.0,
                   v.triples > 0 && v.c_min > 0.0 && v.c_max <= 1.0 + 1e-12);
    b.extra = {{"cMax", v.c_max}};
    out.push_back(b);
  }
  {
    const DefectScan d = defect_scan(engine, std::min(cfg.tensor_cap, 8));
    auto e = entry("defect_decay", "defect decays like q^((|z|+|x|-|y|)/2)", d.fit.relative_error, 0.2,
                   d.exponents.size() >= 3 && d.fit.relative_error <= 0.2);
    e.extra = {{"fittedRate", d.fit.rate}, {"logQ", d.fit.target}, {"cases", static_cast<double>(d.cases)},
               {"nonzero", static_cast<double>(d.nonzero)}};
    out.push_back(e);
  }

  log << "perturbed layer: branch of " << cfg.branch_z.str() << "\n";
  const Branch b = branch(cfg, c.mu, engine, log);
  {
    const int oracle_cap = std::min(kHardTensorCap, cfg.tensor_cap + c.mu.range());
    ModelConfig oc = cfg.model;
    oc.tensor_cap = oracle_cap;
    const IntertwinerEngine oracle_engine(oc);
    double agree = 0.0;
    double residual = 0.0;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < b.m.requests.size(); ++i) {
      const QhatRequest& r = b.m.requests[i];
      if (2 * r.u.length() + r.s.length() + b.ctx.y.length() > oracle_cap) continue;
      const QhatOracle o = qhat_partial_trace(r.u, r.s, r.t, b.ctx, oracle_engine);
      agree = std::max(agree, std::abs(o.value - b.m.qhat_values[i]));
      residual = std::max(residual, o.residual);
      ++checked;
    }
    auto e = below("qhat_oracle", "q_mu(s,t) are real: trace formula against partial trace", agree, 1e-9);
    e.extra = {{"entries", static_cast<double>(b.m.requests.size())}, {"checked", static_cast<double>(checked)},
               {"oracleResidual", residual}};
    out.push_back(e);
    const DominationResult dom = domination_check(b.m);
    auto d = entry("qhat_domination", "|q_mu| <= p_mu", dom.excess, 1e-12,
                   dom.excess <= 1e-12 && dom.pattern_violations == 0);
    d.extra = {{"patternViolations", static_cast<double>(dom.pattern_violations)}};
    out.push_back(d);
  }
  const int rq = b.ctx.omega.radius();
  if (std::min(5, rq) - b.ctx.z.length() + 1 >= 4) {
    const DecayResult dec = decay_audit(b.m, 1, std::min(5, rq));
    std::vector<double> xs(dec.lengths.begin(), dec.lengths.end());
    const double env = envelope_ratio(xs, dec.max_gap, qp.q());
    auto e = entry("decay_envelope", "|q - p| <= C q^|s|", env, 1.0, env <= 1.0 + 1e-9);
    e.extra = {{"C", dec.max_gap.front() / std::pow(qp.q(), xs.front())}};
    out.push_back(e);
    auto r = entry("decay", "fitted rate of |q - p| against |s| is log q", dec.fit.relative_error, 0.15,
                   dec.fit.relative_error <= 0.15);
    r.extra = {{"fittedRate", dec.fit.rate}, {"logQ", dec.fit.target}};
    out.push_back(r);
  }
  {
    std::vector<Word> xs;
    for (const Word& w : b.ctx.omega.words()) {
      if (w.length() >= 1 && w.length() <= std::min(4, rq - 1)) xs.push_back(w);
    }
    std::set<int> lengths;
    for (const Word& w : xs) lengths.insert(w.length());
    if (lengths.size() >= 2) {
      const GdifResult g = gdif_audit(b.m, xs, green_options(cfg));
      std::vector<double> lx(g.lengths.begin(), g.lengths.end());
      const double env = envelope_ratio(lx, g.max_gap, qp.q());
      auto e = entry("gdif_envelope", "key estimate: relative Green gap <= C2 q^|x|", env, 1.0, env <= 1.0 + 1e-9);
      e.extra = {{"C2", g.max_gap.front() / std::pow(qp.q(), lx.front())}};
      out.push_back(e);
      auto r = entry("gdif_rate", "fitted rate of the relative Green gap is log q", g.fit.relative_error, 0.2,
                     g.fit.points >= 2 && g.fit.relative_error <= 0.2);
      r.extra = {{"fittedRate", g.fit.rate}, {"logQ", g.fit.target}};
      out.push_back(r);
    }
  }
  {
    const KernelTable gq = green_q(b.m, green_options(cfg));
    for (std::size_t i = 0; i < cfg.rays.size(); ++i) {
      const RayResult rr = run_ray(cfg, cfg.rays[i], gq, c.g, b.ctx);
      const std::string tag = "ray" + std::to_string(i);
      bool cp = !rr.summaries.empty();
      bool cq = !rr.summaries.empty();
      double kq_min = std::numeric_limits<double>::infinity();
      int resolved = 0;
      for (const BoundarySummary& s : rr.summaries) {
        cp = cp && s.cauchy_p;
        cq = cq && s.cauchy_q;
        kq_min = std::min(kq_min, s.kq_deep);
        resolved += s.resolved_q;
      }
      for (const BoundaryProfile& p : rr.p_only) cp = cp && p.cauchy;
      out.push_back(entry("boundary_cauchy_p_" + tag, "Martin kernel K_P converges along the ray", cp ? 1 : 0, 1, cp));
      auto e = entry("boundary_cauchy_q_" + tag, "Martin kernel K_Q converges along the ray", cq ? 1 : 0, 1, cq);
      e.extra = {{"resolvedGaps", resolved}};
      out.push_back(e);
      if (!rr.summaries.empty()) {
        out.push_back(entry("boundary_positivity_" + tag, "K_Q > 0 at the deepest point", kq_min, 0.0, kq_min > 0.0));
        auto t = entry("boundary_ratio_" + tag, "K_Q/K_P moves toward 1 as |s| grows",
                       std::abs(1.0 - rr.summaries.back().ratio_near), std::abs(1.0 - rr.summaries.front().ratio_near),
                       ratio_trend(rr.summaries));
        out.push_back(t);
      }
    }
  }
  return out;
}

std::string audit_json(const RunConfig& cfg, const std::vector<AuditEntry>& entries) {
  ordered_json j;
  j["configHash"] = hex16(config_hash(cfg));
  bool all = true;
  ordered_json list = ordered_json::array();
  for (const AuditEntry& e : entries) {
    ordered_json a;
    a["name"] = e.name;
    a["paperAnchor"] = e.anchor;
    a["measured"] = num(e.measured);
    a["bound"] = num(e.bound);
    a["pass"] = e.pass;
    for (const auto& [k, v] : e.extra) a[k] = num(v);
    list.push_back(a);
    all = all && e.pass;
  }
  j["pass"] = all;
  j["audits"] = list;
  return j.dump(2) + "\n";
}

int cmd_walk(const RunConfig& cfg, std::ostream& log) {
  OutputWriter w(cfg.output_dir);
  const Classical c = classical(cfg);
  const QParams qp = cfg.model.qparams();
  const std::vector<Word> words = c.p.domain.words();

  std::string tcsv = "s,t,p\n";
  for (int i = 0; i < c.p.entries.outerSize(); ++i) {
    for (SparseRowMatrix::InnerIterator it(c.p.entries, i); it; ++it) {
      tcsv += words[static_cast<std::size_t>(i)].str() + "," + words[static_cast<std::size_t>(it.col())].str() + "," +
              fmt17(it.value()) + "\n";
    }
  }
  w.write("transition.csv", tcsv);

  std::string g;
  g.reserve(words.size() * words.size() * 64);
  g += "s,t,G,K,truncationBound\n";
  const double lam = c.g.power_norm;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = 0; j < words.size(); ++j) {
      const double gij = c.g.green(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double k = gij / c.g.green(0, static_cast<Eigen::Index>(j));
      const double tb = lam > 0.0 ? truncation_error_bound(cfg.ball_radius, words[i], words[j], lam, c.mu.range(), qp)
                                  : 0.0;
      g += words[i].str() + "," + words[j].str() + "," + fmt17(gij) + "," + fmt17(k) + "," + fmt17(tb) + "\n";
    }
  }
  w.write("green.csv", g);

  ordered_json m;
  m["configHash"] = hex16(config_hash(cfg));
  m["config"] = ordered_json::parse(canonical_json(cfg));
  m["n"] = cfg.model.n;
  m["q"] = num(qp.q());
  m["ballRadius"] = cfg.ball_radius;
  m["domainSize"] = words.size();
  m["S"] = c.mu.range();
  m["normBound"] = num(c.norm_bound);
  m["powerNorm"] = num(c.g.power_norm);
  m["lambda"] = num(lam);
  m["delta0"] = num(c.witness.delta0);
  m["K"] = c.witness.k_steps;
  m["harnackDelta"] = num(std::pow(c.witness.delta0, c.witness.k_steps));
  m["greenResidual"] = num(c.g.residual);
  m["neumannTerms"] = c.g.neumann_terms;
  m["neumannDeviation"] = num(c.g.neumann_deviation);
  m["neumannMaxEntry"] = num(c.g.neumann_max_entry);
  m["neumannBound"] = num(c.g.neumann_bound);
  w.write("manifest.json", m.dump(2) + "\n");
  log << "walk: " << words.size() << " words written to " << w.dir().string() << "\n";
  return 0;
}

int cmd_audit(const RunConfig& cfg, std::ostream& log) {
  OutputWriter w(cfg.output_dir);
  const auto entries = run_audits(cfg, log);
  w.write("audit.json", audit_json(cfg, entries));
  bool all = true;
  for (const AuditEntry& e : entries) {
    log << (e.pass ? "PASS " : "FAIL ") << e.name << "  measured " << fmt17(e.measured) << "  bound "
        << fmt17(e.bound) << "\n";
    all = all && e.pass;
  }
  return all ? 0 : 1;
}

int cmd_boundary(const RunConfig& cfg, std::ostream& log) {
  if (cfg.rays.empty()) fail(ErrorKind::Config, "boundary needs at least one ray");
  OutputWriter w(cfg.output_dir);
  const Classical c = classical(cfg);
  const IntertwinerEngine engine(cfg.model);
  const Branch b = branch(cfg, c.mu, engine, log);
  const KernelTable gq = green_q(b.m, green_options(cfg));
  ordered_json summary = ordered_json::array();
  for (std::size_t i = 0; i < cfg.rays.size(); ++i) {
    const RayResult rr = run_ray(cfg, cfg.rays[i], gq, c.g, b.ctx);
    w.write("boundary_" + std::to_string(i) + ".csv", boundary_csv(rr));
    for (const BoundarySummary& s : rr.summaries) {
      ordered_json e;
      e["ray"] = i;
      e["s"] = s.s.str();
      e["cauchyP"] = s.cauchy_p;
      e["cauchyQ"] = s.cauchy_q;
      e["resolvedGapsQ"] = s.resolved_q;
      e["kqDeep"] = num(s.kq_deep);
      e["ratioNear"] = num(s.ratio_near);
      e["ratioDeep"] = num(s.ratio_deep);
      summary.push_back(e);
    }
  }
  ordered_json j;
  j["configHash"] = hex16(config_hash(cfg));
  j["profiles"] = summary;
  w.write("boundary.json", j.dump(2) + "\n");
  log << "boundary: " << cfg.rays.size() << " rays written to " << w.dir().string() << "\n";
  return 0;
}

int cmd_intertwiner(const RunConfig& cfg, std::ostream& log) {
  OutputWriter w(cfg.output_dir);
  const IntertwinerEngine engine(cfg.model);
  const QParams qp = cfg.model.qparams();
  bool ok = true;

  std::string ranks = "x,rank,rankDirect,classicalDim\n";
  for (const Word& x : ball(std::min(7, cfg.tensor_cap))) {
    const auto r1 = numerical_rank(word_projection(x, engine).values);
    const auto r2 = numerical_rank(word_projection_direct(x, engine).values);
    const auto want = fusion_dim(x, cfg.model.n);
    ok = ok && static_cast<std::uint64_t>(r1) == want && static_cast<std::uint64_t>(r2) == want;
    ranks += x.str() + "," + std::to_string(r1) + "," + std::to_string(r2) + "," + std::to_string(want) + "\n";
  }
  w.write("ranks.csv", ranks);

  std::string vt = "s,v,t,norm,closedForm,relativeError,proportionality\n";
  for (const Word& v : ball(6)) {
    if (v.empty()) continue;
    for (const Word& s : ball(6 - v.length())) {
      for (const Word& t : ball(6 - v.length() - s.length())) {
        const Word whole = s.concat(v).concat(v.bar()).concat(t);
        if (whole.length() > cfg.tensor_cap || indecomposable_factors(whole).size() > 1) continue;
        const VtildeResult r = vtilde(s, v, t, engine);
        const double cf = vtilde_norm_closed_form(s.length(), v.length(), t.length(), qp);
        const double rel = std::abs(r.norm / cf - 1.0);
        ok = ok && rel < 1e-8;
        vt += s.str() + "," + v.str() + "," + t.str() + "," + fmt17(r.norm) + "," + fmt17(cf) + "," + fmt17(rel) +
              "," + fmt17(r.proportionality) + "\n";
      }
    }
  }
  w.write("vtilde.csv", vt);
  log << "intertwiner: " << (ok ? "ranks and norms match" : "MISMATCH") << "\n";
  return ok ? 0 : 1;
}

}  // namespace auf
