#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace markerflow {

/// Sentinel for quantities taken over an empty region (inf over nothing).
inline constexpr double kEmptySentinel = std::numeric_limits<double>::infinity();

inline bool is_sentinel(double v) { return std::isinf(v); }

/// Time-stamped named scalars. Keys are kept sorted so serialization order
/// is deterministic.
struct DiagnosticRecord {
  double t = 0.0;
  double beta = 0.0;
  std::map<std::string, double> entries;
  std::vector<std::string> notes;

  void set(const std::string& key, double value) { entries[key] = value; }
  bool has(const std::string& key) const { return entries.count(key) != 0; }
  double get(const std::string& key) const { return entries.at(key); }
};

}  // namespace markerflow
