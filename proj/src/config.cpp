#include "auf/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace auf {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(ErrorKind::Config, where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) fail(ErrorKind::Config, "unknown key '" + it.key() + "' in " + where);
  }
}

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) fail(ErrorKind::Config, key + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(ErrorKind::Config, key + " must be finite");
  return v;
}

int get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) fail(ErrorKind::Config, key + " must be an integer");
  return j.get<int>();
}

Word get_word(const json& j, const std::string& key) {
  if (!j.is_string()) fail(ErrorKind::Config, key + " must be a word string over {a,b} or \"e\"");
  try {
    return Word::parse(j.get<std::string>());
  } catch (const Error& e) {
    fail(ErrorKind::Config, key + ": " + e.what());
  }
}

void build_model(RunConfig& cfg) {
  if (cfg.q) {
    cfg.model = ModelConfig::from_q(*cfg.q, cfg.tensor_cap);
  } else {
    cfg.model = ModelConfig::from_f_diag(cfg.f_diag, cfg.tensor_cap);
  }
}

void validate(RunConfig& cfg) {
  if (cfg.ball_radius < 0 || cfg.ball_radius > kMaxBallRadius) {
    fail(ErrorKind::Config, "ballRadius must lie in [0, " + std::to_string(kMaxBallRadius) + "]");
  }
  if (cfg.tensor_cap < 1 || cfg.tensor_cap > kHardTensorCap) {
    fail(ErrorKind::Config, "tensorCap must lie in [1, " + std::to_string(kHardTensorCap) + "]");
  }
  if (cfg.branch_z.empty()) fail(ErrorKind::Config, "branchZ must be a nonempty word");
  for (const Ray& r : cfg.rays) {
    if (r.period.empty()) fail(ErrorKind::Config, "ray period must be nonempty");
  }
  if (!(cfg.tolerances.solver > 0.0) || !(cfg.tolerances.audit > 0.0)) {
    fail(ErrorKind::Config, "tolerances must be positive");
  }
  (void)cfg.make_measure();  // "measure not normalized"
  build_model(cfg);
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(root, "config", {"model", "measure", "ballRadius", "tensorCap", "branchZ", "rays", "boundaryS",
                             "tolerances", "outputDir", "seed", "qhatCache"});
  RunConfig cfg;
  if (!root.contains("model")) fail(ErrorKind::Config, "missing key 'model'");
  const json& model = root["model"];
  only_keys(model, "model", {"n", "q", "fDiag"});
  if (model.contains("q") == model.contains("fDiag")) {
    fail(ErrorKind::Config, "model needs exactly one of 'q' and 'fDiag'");
  }
  if (model.contains("q")) {
    cfg.q = get_number(model["q"], "model.q");
  } else {
    if (!model["fDiag"].is_array()) fail(ErrorKind::Config, "model.fDiag must be an array");
    for (const json& f : model["fDiag"]) cfg.f_diag.push_back(get_number(f, "model.fDiag"));
    cfg.q.reset();
  }
  if (model.contains("n")) {
    const int n = get_int(model["n"], "model.n");
    const int have = cfg.q ? 2 : static_cast<int>(cfg.f_diag.size());
    if (n != have) fail(ErrorKind::Config, "model.n does not match the model data");
  }

  if (root.contains("measure")) {
    const json& m = root["measure"];
    if (!m.is_object() || m.empty()) fail(ErrorKind::Config, "measure must be a nonempty object word -> weight");
    cfg.measure.clear();
    for (auto it = m.begin(); it != m.end(); ++it) {
      const double w = get_number(it.value(), "measure." + it.key());
      if (!(w > 0.0)) fail(ErrorKind::Config, "measure weights must be positive");
      cfg.measure.push_back({get_word(json(it.key()), "measure key"), w});
    }
  }
  if (root.contains("ballRadius")) cfg.ball_radius = get_int(root["ballRadius"], "ballRadius");
  if (root.contains("tensorCap")) cfg.tensor_cap = get_int(root["tensorCap"], "tensorCap");
  if (root.contains("branchZ")) cfg.branch_z = get_word(root["branchZ"], "branchZ");
  if (root.contains("rays")) {
    if (!root["rays"].is_array()) fail(ErrorKind::Config, "rays must be an array");
    cfg.rays.clear();
    for (const json& r : root["rays"]) {
      only_keys(r, "ray", {"preperiod", "period"});
      Ray ray;
      if (r.contains("preperiod")) ray.preperiod = get_word(r["preperiod"], "ray.preperiod");
      if (!r.contains("period")) fail(ErrorKind::Config, "ray needs a period");
      ray.period = get_word(r["period"], "ray.period");
      cfg.rays.push_back(ray);
    }
  }
  if (root.contains("boundaryS")) {
    if (!root["boundaryS"].is_array()) fail(ErrorKind::Config, "boundaryS must be an array");
    for (const json& s : root["boundaryS"]) cfg.boundary_s.push_back(get_word(s, "boundaryS"));
  }
  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    only_keys(t, "tolerances", {"solver", "audit"});
    if (t.contains("solver")) cfg.tolerances.solver = get_number(t["solver"], "tolerances.solver");
    if (t.contains("audit")) cfg.tolerances.audit = get_number(t["audit"], "tolerances.audit");
  }
  if (root.contains("outputDir")) {
    if (!root["outputDir"].is_string()) fail(ErrorKind::Config, "outputDir must be a string");
    cfg.output_dir = root["outputDir"].get<std::string>();
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) fail(ErrorKind::Config, "seed must be a nonnegative integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("qhatCache")) {
    if (!root["qhatCache"].is_string()) fail(ErrorKind::Config, "qhatCache must be a string");
    cfg.qhat_cache = root["qhatCache"].get<std::string>();
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.radius) cfg.ball_radius = *o.radius;
  if (o.q) {
    cfg.q = *o.q;
    cfg.f_diag.clear();
  }
  if (o.out) cfg.output_dir = *o.out;
  validate(cfg);
}

std::string canonical_json(const RunConfig& cfg) {
  json j;
  if (cfg.q) {
    j["model"]["q"] = *cfg.q;
  } else {
    j["model"]["fDiag"] = cfg.f_diag;
  }
  j["model"]["n"] = cfg.model.n;
  json m = json::object();
  const Measure mu = cfg.make_measure();
  for (const auto& a : mu.atoms()) m[a.word.str()] = a.weight;
  j["measure"] = m;
  j["ballRadius"] = cfg.ball_radius;
  j["tensorCap"] = cfg.tensor_cap;
  j["branchZ"] = cfg.branch_z.str();
  j["rays"] = json::array();
  for (const Ray& r : cfg.rays) j["rays"].push_back({{"preperiod", r.preperiod.str()}, {"period", r.period.str()}});
  j["boundaryS"] = json::array();
  for (const Word& s : cfg.boundary_s) j["boundaryS"].push_back(s.str());
  j["tolerances"] = {{"solver", cfg.tolerances.solver}, {"audit", cfg.tolerances.audit}};
  j["seed"] = cfg.seed;
  // outputDir and qhatCache do not change any emitted number and stay out of the hash.
  return j.dump();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical_json(cfg)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace auf
