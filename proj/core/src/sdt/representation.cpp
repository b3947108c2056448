#include "twinaudit/sdt/representation.hpp"

#include <algorithm>
#include <set>

#include "twinaudit/bom/codec.hpp"
#include "twinaudit/errors.hpp"
#include "twinaudit/forge/forge.hpp"

namespace twinaudit::sdt {

using nlohmann::json;

json ThingState::ToJson() const {
  return {{"id", id}, {"title", title}, {"properties", properties}, {"links", links}};
}

ThingState ThingState::FromJson(const json& v) {
  ThingState t;
  t.id = v.at("id").get<std::string>();
  t.title = v.value("title", "");
  t.properties = v.value("properties", json::object());
  t.links = v.value("links", std::vector<std::string>{});
  return t;
}

std::string HostThingId(const std::string& host_id) { return "host:" + host_id; }
std::string ProfileThingId(const std::string& profile_id) { return "profile:" + profile_id; }

namespace {

const char* CategoryFor(bom::ComponentType type) {
  switch (type) {
    case bom::ComponentType::kLibrary:
    case bom::ComponentType::kApplication:
      return "components";
    case bom::ComponentType::kCryptoAsset:
      return "cryptoAssets";
    case bom::ComponentType::kCertificate:
      return "certificates";
    case bom::ComponentType::kOperatingSystemSetting:
      return "settings";
    case bom::ComponentType::kFile:
      return "files";
  }
  return "components";
}

json EmptyHostProperties() {
  json p = json::object();
  for (const char* k : {"components", "cryptoAssets", "certificates", "settings", "files",
                        "vulnerabilities", "documents"}) {
    p[k] = json::array();
  }
  return p;
}

}  // namespace

std::map<std::string, ThingState> DeriveThings(const std::vector<bom::Bom>& boms) {
  if (boms.empty()) throw InvalidArgumentError("representation requires at least one BOM");
  std::set<std::pair<std::string, std::string>> roles;
  std::map<std::string, ThingState> things;
  for (const auto& b : boms) {
    const std::string role = forge::DocumentRole(b);
    const std::string link = bom::BomLink{b.serial_number, b.version, std::nullopt}.Render();
    if (role == "manifest") {
      const std::string profile = b.metadata.property(forge::prop::kProfile).value_or(b.metadata.subject);
      if (!roles.emplace("profile:" + profile, role).second) {
        throw InvalidArgumentError("duplicate manifest for profile '" + profile + "'");
      }
      ThingState t;
      t.id = ProfileThingId(profile);
      t.title = "Audit profile " + profile;
      json docs = json::array();
      for (const auto& l : b.links) docs.push_back(l.Render());
      t.properties = {{"profileId", profile}, {"documents", docs}, {"manifest", link}};
      t.links = {link};
      for (const auto& l : b.links) t.links.push_back(l.Render());
      things[t.id] = std::move(t);
      continue;
    }
    const std::string host = b.metadata.property(forge::prop::kHost).value_or(b.metadata.subject);
    const std::string kind_role = role.empty() ? std::string(bom::ToString(b.kind)) : role;
    if (!roles.emplace(host, kind_role).second) {
      throw InvalidArgumentError("duplicate " + kind_role + " document for host '" + host + "'");
    }
    auto [it, inserted] = things.try_emplace(HostThingId(host));
    ThingState& t = it->second;
    if (inserted) {
      t.id = HostThingId(host);
      t.title = host;
      t.properties = EmptyHostProperties();
    }
    for (const auto& c : b.components) t.properties[CategoryFor(c.type)].push_back(bom::ToJson(c));
    for (const auto& v : b.vulnerabilities) t.properties["vulnerabilities"].push_back(bom::ToJson(v));
    t.properties["documents"].push_back(
        {{"serialNumber", b.serial_number}, {"version", b.version}, {"role", kind_role}});
    t.links.push_back(link);
  }
  for (auto& [id, t] : things) {
    std::sort(t.links.begin(), t.links.end());
    t.links.erase(std::unique(t.links.begin(), t.links.end()), t.links.end());
    if (t.properties.contains("documents") && t.properties["documents"].is_array() &&
        !t.properties["documents"].empty() && t.properties["documents"][0].is_object()) {
      auto& docs = t.properties["documents"];
      std::sort(docs.begin(), docs.end(), [](const json& a, const json& b) {
        return a.at("role").get<std::string>() < b.at("role").get<std::string>();
      });
    }
  }
  return things;
}

StoredRepresentation StoredRepresentation::Build(std::map<std::string, ThingState> things,
                                                 std::int64_t timestamp_ns) {
  StoredRepresentation r;
  r.current_version_ = 1;
  for (auto& [id, state] : things) {
    r.history_[id].push_back(Revision{1, timestamp_ns, 1, std::move(state)});
  }
  return r;
}

std::vector<std::string> StoredRepresentation::ThingIds() const {
  std::vector<std::string> out;
  for (const auto& [id, h] : history_) out.push_back(id);
  return out;
}

const std::vector<Revision>& StoredRepresentation::History(const std::string& thing_id) const {
  auto it = history_.find(thing_id);
  if (it == history_.end()) throw NotFoundError("unknown thing '" + thing_id + "'");
  return it->second;
}

const Revision& StoredRepresentation::Latest(const std::string& thing_id) const {
  return History(thing_id).back();
}

const Revision& StoredRepresentation::AtRevision(const std::string& thing_id,
                                                 std::uint64_t revision) const {
  const auto& h = History(thing_id);
  if (revision < 1 || revision > h.size()) {
    throw NotFoundError("thing '" + thing_id + "' has no revision " + std::to_string(revision));
  }
  return h[revision - 1];
}

const Revision& StoredRepresentation::AtTime(const std::string& thing_id,
                                             std::int64_t timestamp_ns) const {
  const auto& h = History(thing_id);
  auto it = std::upper_bound(h.begin(), h.end(), timestamp_ns,
                             [](std::int64_t t, const Revision& r) { return t < r.timestamp_ns; });
  if (it == h.begin()) {
    throw NotFoundError("thing '" + thing_id + "' did not exist at " + std::to_string(timestamp_ns));
  }
  return *(it - 1);
}

std::vector<std::string> StoredRepresentation::Apply(const std::map<std::string, ThingState>& states,
                                                     std::uint64_t new_version,
                                                     std::int64_t timestamp_ns) {
  if (new_version != current_version_ + 1) {
    throw ConflictError("representation is at version " + std::to_string(current_version_) +
                        ", update targets " + std::to_string(new_version));
  }
  for (const auto& [id, state] : states) {
    if (!history_.count(id)) throw InvalidArgumentError("update names unknown thing '" + id + "'");
  }
  std::vector<std::string> changed;
  for (const auto& [id, state] : states) {
    if (!(history_.at(id).back().state == state)) changed.push_back(id);
  }
  for (const auto& id : changed) {
    auto& h = history_.at(id);
    h.push_back(Revision{h.size() + 1, timestamp_ns, new_version, states.at(id)});
  }
  current_version_ = new_version;
  return changed;
}

json StoredRepresentation::ToJson() const {
  json things = json::object();
  for (const auto& [id, h] : history_) {
    json revs = json::array();
    for (const auto& r : h) {
      revs.push_back({{"revision", r.revision},
                      {"timestamp", r.timestamp_ns},
                      {"representationVersion", r.representation_version},
                      {"state", r.state.ToJson()}});
    }
    things[id] = std::move(revs);
  }
  return {{"currentVersion", current_version_}, {"things", things}};
}

}  // namespace twinaudit::sdt
