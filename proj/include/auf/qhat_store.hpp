#pragma once

// Persistent cache of q-check entries.
//
// One record per line:
//   qhat v1 <config hash, 16 hex digits> <u> <s> <t> <z> <value, %.17g>
// Words use the {a,b} alphabet with "e" for the empty word. The file is
// append-only; unparsable lines are skipped with a warning on stderr.

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "auf/word.hpp"

namespace auf {

class QhatStore {
 public:
  /// In-memory only.
  QhatStore() = default;
  /// Loads `path` if it exists; new entries are appended to it.
  explicit QhatStore(std::filesystem::path path);

  std::optional<double> lookup(std::uint64_t config, const Word& u, const Word& s, const Word& t, const Word& z);
  void insert(std::uint64_t config, const Word& u, const Word& s, const Word& t, const Word& z, double value);

  std::size_t hits() const;
  std::size_t misses() const;
  std::size_t skipped_lines() const { return skipped_; }
  std::size_t size() const;

  static std::string key(std::uint64_t config, const Word& u, const Word& s, const Word& t, const Word& z);
  static std::string format_record(std::uint64_t config, const Word& u, const Word& s, const Word& t, const Word& z,
                                   double value);

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, double> values_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
  std::size_t skipped_ = 0;
};

}  // namespace auf
