#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinaudit/evidence/record.hpp"

namespace twinaudit::ams {

enum class Segment { kDmz, kLan };
enum class RelationshipKind { kServes, kConnectsTo };

std::string_view ToString(Segment segment);
std::string_view ToString(RelationshipKind kind);

struct HostRecord {
  std::string host_id;
  std::string role;  // web-server, mail-server, user-workstation, ...
  Segment segment = Segment::kLan;
  std::string snapshot_ref;  // directory or tar archive

  nlohmann::json ToJson() const;
  static HostRecord FromJson(const nlohmann::json& value);
  friend bool operator==(const HostRecord&, const HostRecord&) = default;
};

struct TopologyRelationship {
  std::string from;
  std::string to;
  RelationshipKind kind = RelationshipKind::kConnectsTo;

  nlohmann::json ToJson() const;
  static TopologyRelationship FromJson(const nlohmann::json& value);
  std::string Key() const;
  friend bool operator==(const TopologyRelationship&, const TopologyRelationship&) = default;
};

struct TopologyGraph {
  std::vector<HostRecord> hosts;
  std::vector<TopologyRelationship> relationships;

  const HostRecord* FindHost(std::string_view host_id) const;
  // Throws InvalidArgumentError naming a duplicate host id or an unknown
  // relationship endpoint.
  void Validate() const;
  nlohmann::json ToJson() const;
};

// Inventory text: JSON or YAML. Either a mapping with `hosts` and optional
// `relationships`, or a bare list of hosts. Relative snapshot refs are
// resolved against `base_dir` when given. Throws ParseError or
// InvalidArgumentError.
TopologyGraph ParseInventory(std::string_view text, const std::filesystem::path& base_dir = {});
TopologyGraph LoadInventoryFile(const std::filesystem::path& path);

enum class SyncKind { kOnDemand, kPeriodic };

struct SyncPolicy {
  SyncKind kind = SyncKind::kOnDemand;
  std::int64_t interval_seconds = 0;
  friend bool operator==(const SyncPolicy&, const SyncPolicy&) = default;
};

struct AuditProfile {
  std::string profile_id;
  std::string name;
  // Host ids or role tags.
  std::vector<std::string> host_selector;
  std::set<evidence::Category> categories;
  SyncPolicy sync_policy;

  // Throws InvalidArgumentError on an empty selector or category set, or a
  // PERIODIC policy without a positive interval.
  void Validate() const;
  nlohmann::json ToJson() const;
  // Categories default to every category; sync to ON_DEMAND.
  static AuditProfile FromJson(const nlohmann::json& value);
  friend bool operator==(const AuditProfile&, const AuditProfile&) = default;
};

// JSON or YAML profile document.
AuditProfile ParseProfile(std::string_view text);

struct HostProfile {
  std::string profile_id;
  std::string host_id;
  std::set<evidence::Category> categories;

  nlohmann::json ToJson() const;
  static HostProfile FromJson(const nlohmann::json& value);
  friend bool operator==(const HostProfile&, const HostProfile&) = default;
};

// Hosts matched by the selector, in topology order. Throws
// InvalidArgumentError when an entry matches no host.
std::vector<const HostRecord*> SelectHosts(const TopologyGraph& topology,
                                           const std::vector<std::string>& selector);

// YAML or JSON text to a JSON value. Scalars stay strings unless they are
// plain integers, floats or booleans.
nlohmann::json YamlToJson(std::string_view text);

}  // namespace twinaudit::ams
