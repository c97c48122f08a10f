#include "auf/qhat_store.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace auf {

std::string QhatStore::key(std::uint64_t config, const Word& u, const Word& s, const Word& t, const Word& z) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, config);
  return std::string(hex) + ' ' + u.str() + ' ' + s.str() + ' ' + t.str() + ' ' + z.str();
}

std::string QhatStore::format_record(std::uint64_t config, const Word& u, const Word& s, const Word& t, const Word& z,
                                     double value) {
  char num[32];
  std::snprintf(num, sizeof num, "%.17g", value);
  return "qhat v1 " + key(config, u, s, t, z) + ' ' + num;
}

QhatStore::QhatStore(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag, version, hex, u, s, t, z, value, extra;
    bool ok = static_cast<bool>(ls >> tag >> version >> hex >> u >> s >> t >> z >> value) && !(ls >> extra) &&
              tag == "qhat" && version == "v1" && hex.size() == 16;
    double v = 0.0;
    std::uint64_t h = 0;
    if (ok) {
      try {
        std::size_t used = 0;
        v = std::stod(value, &used);
        ok = used == value.size();
        h = std::stoull(hex, &used, 16);
        ok = ok && used == hex.size();
        ok = ok && std::isfinite(v);
        if (ok) values_[key(h, Word::parse(u), Word::parse(s), Word::parse(t), Word::parse(z))] = v;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      ++skipped_;
      std::cerr << "warning: " << path_.string() << ':' << lineno << ": skipping corrupt q-check cache line\n";
    }
  }
}

std::optional<double> QhatStore::lookup(std::uint64_t config, const Word& u, const Word& s, const Word& t,
                                        const Word& z) {
  std::lock_guard lock(mutex_);
  auto it = values_.find(key(config, u, s, t, z));
  if (it == values_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void QhatStore::insert(std::uint64_t config, const Word& u, const Word& s, const Word& t, const Word& z,
                       double value) {
  std::lock_guard lock(mutex_);
  const bool fresh = values_.emplace(key(config, u, s, t, z), value).second;
  if (!fresh || path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) fail(ErrorKind::Config, "cannot append to q-check cache " + path_.string());
  out << format_record(config, u, s, t, z, value) << '\n';
}

std::size_t QhatStore::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t QhatStore::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

std::size_t QhatStore::size() const {
  std::lock_guard lock(mutex_);
  return values_.size();
}

}  // namespace auf
