#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinaudit/bom/model.hpp"

namespace twinaudit::bom {

template <typename T>
struct KeyedChanges {
  std::vector<T> added;
  std::vector<std::string> removed;  // keys
  std::vector<T> changed;            // new values

  bool empty() const { return added.empty() && removed.empty() && changed.empty(); }
  friend bool operator==(const KeyedChanges&, const KeyedChanges&) = default;
};

// Everything needed to turn one version of a Bom into another with the same
// serial number. Components are keyed by bom-ref, dependencies by ref,
// vulnerabilities by CVE id.
struct BomDelta {
  std::string serial_number;
  std::uint64_t from_version = 1;
  std::uint64_t to_version = 1;
  std::optional<BomKind> kind;
  std::optional<BomMetadata> metadata;
  KeyedChanges<Component> components;
  KeyedChanges<Dependency> dependencies;
  KeyedChanges<VulnerabilityEntry> vulnerabilities;
  std::optional<std::vector<BomLink>> links;
  std::optional<nlohmann::json> extensions;

  // No content change (the version may still move).
  bool IsContentEmpty() const;
  bool IsEmpty() const { return IsContentEmpty() && from_version == to_version; }

  friend bool operator==(const BomDelta&, const BomDelta&) = default;
};

// Throws InvalidArgumentError when serial numbers differ.
BomDelta DiffBoms(const Bom& old_bom, const Bom& new_bom);

// Throws InvalidArgumentError on serial mismatch and ConflictError when
// `old_bom.version` is not `delta.from_version` or a keyed change does not
// apply (removing/changing an absent key, adding an existing one).
Bom ApplyDelta(const Bom& old_bom, const BomDelta& delta);

nlohmann::json ToJson(const BomDelta& delta);
BomDelta DeltaFromJson(const nlohmann::json& value);

}  // namespace twinaudit::bom
