#include "twinaudit/bom/diff.hpp"

#include <map>

#include "twinaudit/bom/codec.hpp"
#include "twinaudit/errors.hpp"

namespace twinaudit::bom {

using nlohmann::json;

namespace {

const std::string& KeyOf(const Component& c) { return c.bom_ref; }
const std::string& KeyOf(const Dependency& d) { return d.ref; }
const std::string& KeyOf(const VulnerabilityEntry& v) { return v.cve_id; }

template <typename T>
KeyedChanges<T> DiffKeyed(const std::vector<T>& old_items, const std::vector<T>& new_items) {
  std::map<std::string, const T*> old_by_key;
  std::map<std::string, const T*> new_by_key;
  for (const auto& item : old_items) old_by_key.emplace(KeyOf(item), &item);
  for (const auto& item : new_items) new_by_key.emplace(KeyOf(item), &item);
  KeyedChanges<T> out;
  for (const auto& [key, item] : new_by_key) {
    auto it = old_by_key.find(key);
    if (it == old_by_key.end()) {
      out.added.push_back(*item);
    } else if (!(*it->second == *item)) {
      out.changed.push_back(*item);
    }
  }
  for (const auto& [key, item] : old_by_key) {
    if (new_by_key.count(key) == 0) out.removed.push_back(key);
  }
  return out;
}

template <typename T>
void ApplyKeyed(std::vector<T>& items, const KeyedChanges<T>& changes, std::string_view what) {
  std::map<std::string, T> by_key;
  for (auto& item : items) by_key.emplace(KeyOf(item), std::move(item));
  for (const auto& key : changes.removed) {
    if (by_key.erase(key) == 0) {
      throw ConflictError("delta removes absent " + std::string(what) + " '" + key + "'");
    }
  }
  for (const auto& item : changes.changed) {
    auto it = by_key.find(KeyOf(item));
    if (it == by_key.end()) {
      throw ConflictError("delta changes absent " + std::string(what) + " '" + KeyOf(item) + "'");
    }
    it->second = item;
  }
  for (const auto& item : changes.added) {
    if (!by_key.emplace(KeyOf(item), item).second) {
      throw ConflictError("delta adds existing " + std::string(what) + " '" + KeyOf(item) + "'");
    }
  }
  items.clear();
  for (auto& [key, item] : by_key) items.push_back(std::move(item));
}

json MetadataToJson(const BomMetadata& m) {
  json props = json::array();
  for (const auto& p : m.properties) props.push_back({{"name", p.name}, {"value", p.value}});
  json out = {{"subject", m.subject}, {"subjectType", m.subject_type}, {"properties", props}};
  if (m.timestamp) out["timestamp"] = *m.timestamp;
  return out;
}

BomMetadata MetadataFromJson(const json& v) {
  BomMetadata m;
  m.subject = v.at("subject").get<std::string>();
  m.subject_type = v.value("subjectType", "device");
  if (v.contains("timestamp")) m.timestamp = v.at("timestamp").get<std::string>();
  for (const auto& p : v.value("properties", json::array())) {
    m.properties.push_back({p.at("name").get<std::string>(), p.at("value").get<std::string>()});
  }
  return m;
}

template <typename T, typename ToFn>
json KeyedToJson(const KeyedChanges<T>& c, ToFn&& to_json) {
  json added = json::array();
  json changed = json::array();
  for (const auto& item : c.added) added.push_back(to_json(item));
  for (const auto& item : c.changed) changed.push_back(to_json(item));
  return {{"added", added}, {"removed", c.removed}, {"changed", changed}};
}

template <typename T, typename FromFn>
KeyedChanges<T> KeyedFromJson(const json& v, FromFn&& from_json) {
  KeyedChanges<T> c;
  for (const auto& item : v.value("added", json::array())) c.added.push_back(from_json(item));
  for (const auto& item : v.value("changed", json::array())) c.changed.push_back(from_json(item));
  c.removed = v.value("removed", std::vector<std::string>{});
  return c;
}

}  // namespace

bool BomDelta::IsContentEmpty() const {
  return !kind && !metadata && components.empty() && dependencies.empty() &&
         vulnerabilities.empty() && !links && !extensions;
}

BomDelta DiffBoms(const Bom& old_in, const Bom& new_in) {
  if (old_in.serial_number != new_in.serial_number) {
    throw InvalidArgumentError("cannot diff BOMs with different serial numbers: " +
                               old_in.serial_number + " vs " + new_in.serial_number);
  }
  const Bom old_bom = Canonicalize(old_in);
  const Bom new_bom = Canonicalize(new_in);
  BomDelta d;
  d.serial_number = new_bom.serial_number;
  d.from_version = old_bom.version;
  d.to_version = new_bom.version;
  if (old_bom.kind != new_bom.kind) d.kind = new_bom.kind;
  if (!(old_bom.metadata == new_bom.metadata)) d.metadata = new_bom.metadata;
  d.components = DiffKeyed(old_bom.components, new_bom.components);
  d.dependencies = DiffKeyed(old_bom.dependencies, new_bom.dependencies);
  d.vulnerabilities = DiffKeyed(old_bom.vulnerabilities, new_bom.vulnerabilities);
  if (!(old_bom.links == new_bom.links)) d.links = new_bom.links;
  if (old_bom.extensions != new_bom.extensions) d.extensions = new_bom.extensions;
  return d;
}

Bom ApplyDelta(const Bom& old_bom, const BomDelta& delta) {
  if (old_bom.serial_number != delta.serial_number) {
    throw InvalidArgumentError("delta for " + delta.serial_number + " applied to " +
                               old_bom.serial_number);
  }
  if (old_bom.version != delta.from_version) {
    throw ConflictError("delta expects version " + std::to_string(delta.from_version) +
                        ", BOM is at " + std::to_string(old_bom.version));
  }
  Bom out = old_bom;
  out.version = delta.to_version;
  if (delta.kind) out.kind = *delta.kind;
  if (delta.metadata) out.metadata = *delta.metadata;
  ApplyKeyed(out.components, delta.components, "component");
  ApplyKeyed(out.dependencies, delta.dependencies, "dependency");
  ApplyKeyed(out.vulnerabilities, delta.vulnerabilities, "vulnerability");
  if (delta.links) out.links = *delta.links;
  if (delta.extensions) out.extensions = *delta.extensions;
  return Canonicalize(std::move(out));
}

json ToJson(const BomDelta& d) {
  json out = {
      {"serialNumber", d.serial_number},
      {"fromVersion", d.from_version},
      {"toVersion", d.to_version},
      {"components", KeyedToJson(d.components, [](const Component& c) { return ToJson(c); })},
      {"dependencies", KeyedToJson(d.dependencies, [](const Dependency& x) { return ToJson(x); })},
      {"vulnerabilities",
       KeyedToJson(d.vulnerabilities, [](const VulnerabilityEntry& v) { return ToJson(v); })},
  };
  if (d.kind) out["kind"] = ToString(*d.kind);
  if (d.metadata) out["metadata"] = MetadataToJson(*d.metadata);
  if (d.links) {
    json links = json::array();
    for (const auto& l : *d.links) links.push_back(l.Render());
    out["links"] = std::move(links);
  }
  if (d.extensions) out["extensions"] = *d.extensions;
  return out;
}

BomDelta DeltaFromJson(const json& v) {
  try {
    BomDelta d;
    d.serial_number = v.at("serialNumber").get<std::string>();
    d.from_version = v.at("fromVersion").get<std::uint64_t>();
    d.to_version = v.at("toVersion").get<std::uint64_t>();
    if (v.contains("kind")) {
      auto kind = ParseBomKind(v.at("kind").get<std::string>());
      if (!kind) throw InvalidArgumentError("unknown BOM kind in delta");
      d.kind = *kind;
    }
    if (v.contains("metadata")) d.metadata = MetadataFromJson(v.at("metadata"));
    const ParseOptions lenient{.strict = false, .validate = false};
    d.components = KeyedFromJson<Component>(
        v.value("components", json::object()),
        [&](const json& c) { return ComponentFromJson(c, lenient); });
    d.dependencies = KeyedFromJson<Dependency>(v.value("dependencies", json::object()),
                                               [](const json& x) { return DependencyFromJson(x); });
    d.vulnerabilities = KeyedFromJson<VulnerabilityEntry>(
        v.value("vulnerabilities", json::object()),
        [](const json& x) { return VulnerabilityFromJson(x); });
    if (v.contains("links")) {
      std::vector<BomLink> links;
      for (const auto& l : v.at("links")) {
        auto link = BomLink::Parse(l.get<std::string>());
        if (!link) throw InvalidArgumentError("malformed BOM-Link in delta");
        links.push_back(*link);
      }
      d.links = std::move(links);
    }
    if (v.contains("extensions")) d.extensions = v.at("extensions");
    return d;
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("malformed BOM delta: ") + e.what());
  }
}

}  // namespace twinaudit::bom
