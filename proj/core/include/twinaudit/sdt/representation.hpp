#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinaudit/bom/model.hpp"

namespace twinaudit::sdt {

// WoT-style thing: id, title, properties, links.
struct ThingState {
  std::string id;
  std::string title;
  nlohmann::json properties = nlohmann::json::object();
  std::vector<std::string> links;  // rendered BOM-Links

  nlohmann::json ToJson() const;
  static ThingState FromJson(const nlohmann::json& value);
  friend bool operator==(const ThingState&, const ThingState&) = default;
};

struct Revision {
  std::uint64_t revision = 1;
  std::int64_t timestamp_ns = 0;  // instance-local monotonic clock
  std::uint64_t representation_version = 1;
  ThingState state;
};

// Thing id for a host and for a profile manifest.
std::string HostThingId(const std::string& host_id);
std::string ProfileThingId(const std::string& profile_id);

// One thing per host (documents grouped by host, properties grouped by
// artifact category) plus one per profile manifest. Throws
// InvalidArgumentError when two documents claim the same (host, role), or
// when `boms` is empty.
std::map<std::string, ThingState> DeriveThings(const std::vector<bom::Bom>& boms);

// Append-only revision store. Not synchronized; SdtController guards it.
class StoredRepresentation {
 public:
  // Version 1, every thing at revision 1.
  static StoredRepresentation Build(std::map<std::string, ThingState> things,
                                    std::int64_t timestamp_ns);

  std::uint64_t current_version() const { return current_version_; }
  std::vector<std::string> ThingIds() const;

  // Throws NotFoundError for unknown things, revisions past the history and
  // instants before the first revision.
  const Revision& Latest(const std::string& thing_id) const;
  const Revision& AtRevision(const std::string& thing_id, std::uint64_t revision) const;
  const Revision& AtTime(const std::string& thing_id, std::int64_t timestamp_ns) const;
  const std::vector<Revision>& History(const std::string& thing_id) const;

  // `new_version` must be current_version() + 1 and every key must name an
  // existing thing; otherwise nothing changes (InvalidArgumentError /
  // ConflictError). Things whose state differs from their latest revision
  // gain one revision. Returns the ids that changed.
  std::vector<std::string> Apply(const std::map<std::string, ThingState>& states,
                                 std::uint64_t new_version, std::int64_t timestamp_ns);

  // Everything, history included.
  nlohmann::json ToJson() const;

 private:
  std::uint64_t current_version_ = 0;
  std::map<std::string, std::vector<Revision>> history_;
};

}  // namespace twinaudit::sdt
