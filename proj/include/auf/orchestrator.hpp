#pragma once

// Subcommands of the aufwalk CLI. Each builds its tables from a RunConfig,
// renders CSV/JSON into strings and hands them to a single writer, so the
// files of two runs with the same config are byte-identical.

#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "auf/config.hpp"

namespace auf {

/// Serializes every file write of a run.
class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path dir);
  void write(const std::string& name, const std::string& content);
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
};

struct AuditEntry {
  std::string name;
  std::string anchor;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  /// Extra named numbers written next to the entry (fits, counts).
  std::vector<std::pair<std::string, double>> extra;
};

/// %.17g, the number format of every emitted file.
std::string fmt17(double v);

/// Every audit the config supports, in a fixed order.
std::vector<AuditEntry> run_audits(const RunConfig& cfg, std::ostream& log);
std::string audit_json(const RunConfig& cfg, const std::vector<AuditEntry>& entries);

/// Exit status 0 on success, 1 if an audit failed. Errors propagate as auf::Error.
int cmd_walk(const RunConfig& cfg, std::ostream& log);
int cmd_audit(const RunConfig& cfg, std::ostream& log);
int cmd_boundary(const RunConfig& cfg, std::ostream& log);
int cmd_intertwiner(const RunConfig& cfg, std::ostream& log);

/// 2 for Config and InvalidArgument, 3 for ResourceCap, 1 for Numerical.
int exit_code(const Error& e);

/// Largest ball radius for which dense Green tables are built.
constexpr int kMaxDenseRadius = 12;

}  // namespace auf
