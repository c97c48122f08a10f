#pragma once

// Run configuration for the aufwalk CLI. The grammar is documented in
// docs/config.md; parsing rejects unknown keys so typos fail loudly.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "auf/fusion.hpp"
#include "auf/green.hpp"
#include "auf/intertwiner.hpp"

namespace auf {

struct Tolerances {
  double solver = 1e-10;
  double audit = 1e-12;
};

struct RunConfig {
  /// Exactly one of q or f_diag is set in the file; model is derived from it.
  std::optional<double> q;
  std::vector<double> f_diag;
  ModelConfig model = ModelConfig::from_q(0.5);

  std::vector<Measure::Atom> measure = {{Word::parse("a"), 0.5}, {Word::parse("b"), 0.5}};
  int ball_radius = 8;
  int tensor_cap = kDefaultTensorCap;
  Word branch_z = Word::parse("a");
  std::vector<Ray> rays = {Ray{Word{}, Word::parse("a")}};
  /// Base points for the boundary profiles; empty means the first five ray points.
  std::vector<Word> boundary_s;
  Tolerances tolerances;
  std::filesystem::path output_dir = "aufwalk-out";
  std::uint64_t seed = 1;
  /// Optional persistent q-check cache file.
  std::filesystem::path qhat_cache;

  Measure make_measure() const { return Measure(measure); }
};

/// Parses and validates; throws Error(Config) with the offending key.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

struct Overrides {
  std::optional<int> radius;
  std::optional<double> q;
  std::optional<std::filesystem::path> out;
};

/// Applies CLI overrides (q replaces any fDiag) and re-validates.
void apply_overrides(RunConfig& cfg, const Overrides& o);

/// Canonical JSON text of the effective configuration (sorted keys, round-trip numbers).
std::string canonical_json(const RunConfig& cfg);
/// FNV-1a over canonical_json.
std::uint64_t config_hash(const RunConfig& cfg);
std::string hex16(std::uint64_t v);

}  // namespace auf
