#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include <json.hpp>

#include "auf/config.hpp"
#include "auf/orchestrator.hpp"

using auf::parse_config;
using auf::RunConfig;

namespace {

const char* kMinimal = R"({"model": {"n": 2, "q": 0.5}, "measure": {"a": 0.5, "b": 0.5}, "ballRadius": 8})";

auf::ErrorKind kind_of(const char* text) {
  try {
    parse_config(text);
  } catch (const auf::Error& e) {
    return e.kind();
  }
  FAIL("config was accepted: " << text);
  return auf::ErrorKind::Numerical;
}

}  // namespace

TEST_CASE("defaults and a minimal config") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.ball_radius == 8);
  CHECK(c.tensor_cap == 10);
  CHECK(c.branch_z.str() == "a");
  CHECK(c.rays.size() == 1);
  CHECK(c.model.q == 0.5);
  CHECK(c.make_measure().range() == 1);
  // Omitted keys take the documented defaults, so the hash matches a bare model.
  CHECK(auf::config_hash(c) == auf::config_hash(parse_config(R"({"model": {"q": 0.5}})")));
}

TEST_CASE("rejected configs") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"model": {"q": 0.5}, "measure": {"a": 0.5, "b": 0.4}})"),
                       "measure not normalized", auf::Error);
  CHECK(kind_of(R"({"model": {"q": 0.5}, "ballradius": 4})") == auf::ErrorKind::Config);
  CHECK(kind_of(R"({"model": {"q": 0.5, "fDiag": [1, 1]}})") == auf::ErrorKind::Config);
  CHECK(kind_of(R"({"model": {}})") == auf::ErrorKind::Config);
  CHECK(kind_of(R"({"measure": {"a": 1}})") == auf::ErrorKind::Config);
  CHECK(kind_of(R"({"model": {"q": 1.0}})") != auf::ErrorKind::ResourceCap);
  CHECK(kind_of(R"({"model": {"q": 0.5, "n": 3}})") == auf::ErrorKind::Config);
  CHECK(kind_of(R"({"model": {"q": 0.5}, "measure": {"c": 1}})") == auf::ErrorKind::Config);
  CHECK(kind_of(R"({"model": {"q": 0.5}, "measure": {"a": 1.5, "b": -0.5}})") == auf::ErrorKind::Config);
  CHECK(kind_of(R"({"model": {"q": 0.5}, "branchZ": "e"})") == auf::ErrorKind::Config);
  CHECK(kind_of(R"({"model": {"q": 0.5}, "rays": [{"preperiod": "a"}]})") == auf::ErrorKind::Config);
  CHECK(kind_of(R"({"model": {"q": 0.5}, "tensorCap": 15})") == auf::ErrorKind::Config);
  CHECK(kind_of(R"({"model": {"q": 0.5}, "tolerances": {"solver": 0}})") == auf::ErrorKind::Config);
  CHECK(kind_of(R"({"model": {"q": 0.5}, "seed": -1})") == auf::ErrorKind::Config);
  CHECK(kind_of("{not json") == auf::ErrorKind::Config);
}

TEST_CASE("fDiag derives q") {
  const RunConfig c = parse_config(R"({"model": {"fDiag": [0.7071067811865476, 1.4142135623730951]}})");
  CHECK_FALSE(c.q);
  CHECK(c.model.q == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("overrides") {
  RunConfig c = parse_config(R"({"model": {"fDiag": [0.7071067811865476, 1.4142135623730951]}})");
  auf::Overrides o;
  o.radius = 3;
  o.q = 0.3;
  o.out = "elsewhere";
  auf::apply_overrides(c, o);
  CHECK(c.ball_radius == 3);
  CHECK(c.model.q == 0.3);
  CHECK(c.f_diag.empty());
  CHECK(c.output_dir == "elsewhere");
  auf::Overrides bad;
  bad.q = 1.5;
  CHECK_THROWS_AS(auf::apply_overrides(c, bad), auf::Error);
}

TEST_CASE("config hash") {
  RunConfig a = parse_config(kMinimal);
  RunConfig b = parse_config(R"({"ballRadius": 8, "measure": {"b": 0.5, "a": 0.5}, "model": {"q": 0.5}})");
  CHECK(auf::config_hash(a) == auf::config_hash(b));
  CHECK(auf::canonical_json(a) == auf::canonical_json(b));
  b.output_dir = "other";
  CHECK(auf::config_hash(a) == auf::config_hash(b));
  b.ball_radius = 9;
  CHECK(auf::config_hash(a) != auf::config_hash(b));
  CHECK(auf::hex16(0x1234) == "0000000000001234");
  // Round trip through the canonical text.
  CHECK(auf::config_hash(parse_config(auf::canonical_json(a))) == auf::config_hash(a));
}

TEST_CASE("exit codes") {
  CHECK(auf::exit_code(auf::Error(auf::ErrorKind::Config, "")) == 2);
  CHECK(auf::exit_code(auf::Error(auf::ErrorKind::InvalidArgument, "")) == 2);
  CHECK(auf::exit_code(auf::Error(auf::ErrorKind::ResourceCap, "")) == 3);
  CHECK(auf::exit_code(auf::Error(auf::ErrorKind::Numerical, "")) == 1);
  CHECK(auf::fmt17(0.1) == "0.10000000000000001");
}

TEST_CASE("audits on the minimal config") {
  const RunConfig c = parse_config(kMinimal);
  std::ostringstream log;
  const auto entries = auf::run_audits(c, log);
  std::set<std::string> names;
  for (const auto& e : entries) {
    CHECK(names.insert(e.name).second);
    CHECK_FALSE(e.anchor.empty());
  }
  // Every audit of the classical walk passes.
  for (const char* name : {"stochasticity", "dual_measure", "norm_bound", "green_residual", "neumann_cross_check",
                           "green_diagonal", "harnack", "multiplicativity_lower", "multiplicativity_upper",
                           "last_entry", "boundary_cauchy_p_ray0"}) {
    CAPTURE(name);
    REQUIRE(names.count(name));
    for (const auto& e : entries) {
      if (e.name == name) CHECK(e.pass);
    }
  }
  const auto j = nlohmann::json::parse(auf::audit_json(c, entries));
  CHECK(j["configHash"] == auf::hex16(auf::config_hash(c)));
  CHECK(j["audits"].size() == entries.size());
  for (const auto& a : j["audits"]) {
    for (const char* key : {"name", "paperAnchor", "measured", "bound", "pass"}) CHECK(a.contains(key));
  }
  bool all = true;
  for (const auto& e : entries) all = all && e.pass;
  CHECK(j["pass"] == all);
}
