#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace twinaudit::vuln {

// Total order over version strings. Versions split into segments on '.', '-',
// '_' and '+'; each segment compares by its leading number, then by whether a
// suffix follows (no suffix sorts higher, so 1.0-rc1 < 1.0), then by the
// lowercased suffix. Missing trailing segments equal "0", so 1.0 == 1.0.0.
// Returns <0, 0 or >0.
int CompareVersions(std::string_view a, std::string_view b);

struct VersionBound {
  std::string version;
  bool inclusive = true;

  friend bool operator==(const VersionBound&, const VersionBound&) = default;
};

// Interval over versions; an absent bound is unbounded on that side.
struct VersionRange {
  std::optional<VersionBound> lower;
  std::optional<VersionBound> upper;

  bool Contains(std::string_view version) const;
  // lower <= upper, and non-empty when both bounds are equal.
  bool WellFormed() const;
  std::string ToString() const;  // e.g. [2.0.0, 2.3.3)

  friend bool operator==(const VersionRange&, const VersionRange&) = default;
};

// Lowercase with '_' folded into '-'.
std::string NormalizePackageName(std::string_view name);

}  // namespace twinaudit::vuln
