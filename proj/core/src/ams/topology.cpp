#include "twinaudit/ams/topology.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "twinaudit/errors.hpp"

namespace twinaudit::ams {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view ToString(Segment segment) { return segment == Segment::kDmz ? "DMZ" : "LAN"; }

std::string_view ToString(RelationshipKind kind) {
  return kind == RelationshipKind::kServes ? "SERVES" : "CONNECTS_TO";
}

namespace {

std::string RequireString(const json& v, const char* key, const char* what) {
  if (!v.is_object() || !v.contains(key) || !v[key].is_string() || v[key].get<std::string>().empty()) {
    throw InvalidArgumentError(std::string(what) + " requires a non-empty '" + key + "'");
  }
  return v[key].get<std::string>();
}

Segment ParseSegment(const std::string& s) {
  if (s == "DMZ" || s == "dmz") return Segment::kDmz;
  if (s == "LAN" || s == "lan") return Segment::kLan;
  throw InvalidArgumentError("unknown segment '" + s + "'");
}

RelationshipKind ParseRelationshipKind(const std::string& s) {
  if (s == "SERVES") return RelationshipKind::kServes;
  if (s == "CONNECTS_TO") return RelationshipKind::kConnectsTo;
  throw InvalidArgumentError("unknown relationship kind '" + s + "'");
}

json ScalarToJson(const std::string& s, const std::string& tag) {
  if (tag == "!" || tag == "tag:yaml.org,2002:str") return s;
  if (s == "true" || s == "True") return true;
  if (s == "false" || s == "False") return false;
  if (s == "null" || s == "~") return nullptr;
  if (!s.empty()) {
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i);
    if (ec == std::errc() && p == s.data() + s.size()) return i;
    double d = 0;
    auto [p2, ec2] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec2 == std::errc() && p2 == s.data() + s.size()) return d;
  }
  return s;
}

json NodeToJson(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar:
      return ScalarToJson(node.Scalar(), node.Tag());
    case YAML::NodeType::Sequence: {
      json out = json::array();
      for (const auto& child : node) out.push_back(NodeToJson(child));
      return out;
    }
    case YAML::NodeType::Map: {
      json out = json::object();
      for (const auto& kv : node) out[kv.first.as<std::string>()] = NodeToJson(kv.second);
      return out;
    }
  }
  return nullptr;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<evidence::Category> ParseCategories(const json& v) {
  std::set<evidence::Category> out;
  if (!v.is_array()) throw InvalidArgumentError("categories must be a list");
  for (const auto& c : v) {
    auto cat = c.is_string() ? evidence::ParseCategory(c.get<std::string>()) : std::nullopt;
    if (!cat) throw InvalidArgumentError("unknown evidence category " + c.dump());
    out.insert(*cat);
  }
  return out;
}

json CategoriesToJson(const std::set<evidence::Category>& cats) {
  json out = json::array();
  for (auto c : cats) out.push_back(evidence::ToString(c));
  return out;
}

}  // namespace

json YamlToJson(std::string_view text) {
  try {
    return NodeToJson(YAML::Load(std::string(text)));
  } catch (const YAML::ParserException& e) {
    throw ParseError(std::string("malformed YAML: ") + e.msg,
                     static_cast<std::size_t>(std::max(0, e.mark.pos)));
  }
}

namespace {

json ParseDocument(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && (text[first] == '{' || text[first] == '[')) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
    }
  }
  return YamlToJson(text);
}

}  // namespace

json HostRecord::ToJson() const {
  return {{"host_id", host_id},
          {"role", role},
          {"segment", ams::ToString(segment)},
          {"snapshot_ref", snapshot_ref}};
}

HostRecord HostRecord::FromJson(const json& v) {
  HostRecord h;
  h.host_id = RequireString(v, "host_id", "host");
  h.role = v.value("role", "");
  h.segment = ParseSegment(v.value("segment", "LAN"));
  h.snapshot_ref = v.value("snapshot_ref", "");
  return h;
}

json TopologyRelationship::ToJson() const {
  return {{"from", from}, {"to", to}, {"kind", ams::ToString(kind)}};
}

TopologyRelationship TopologyRelationship::FromJson(const json& v) {
  TopologyRelationship r;
  r.from = RequireString(v, "from", "relationship");
  r.to = RequireString(v, "to", "relationship");
  r.kind = ParseRelationshipKind(v.value("kind", "CONNECTS_TO"));
  return r;
}

std::string TopologyRelationship::Key() const {
  return from + "|" + std::string(ams::ToString(kind)) + "|" + to;
}

const HostRecord* TopologyGraph::FindHost(std::string_view host_id) const {
  for (const auto& h : hosts) {
    if (h.host_id == host_id) return &h;
  }
  return nullptr;
}

void TopologyGraph::Validate() const {
  std::set<std::string> ids;
  for (const auto& h : hosts) {
    if (!ids.insert(h.host_id).second) {
      throw InvalidArgumentError("duplicate host_id '" + h.host_id + "' in inventory");
    }
  }
  for (const auto& r : relationships) {
    for (const auto* end : {&r.from, &r.to}) {
      if (!ids.count(*end)) {
        throw InvalidArgumentError("relationship " + r.Key() + " references unknown host '" +
                                   *end + "'");
      }
    }
  }
}

json TopologyGraph::ToJson() const {
  json h = json::array();
  json r = json::array();
  for (const auto& x : hosts) h.push_back(x.ToJson());
  for (const auto& x : relationships) r.push_back(x.ToJson());
  return {{"hosts", h}, {"relationships", r}};
}

TopologyGraph ParseInventory(std::string_view text, const fs::path& base_dir) {
  json doc = ParseDocument(text);
  TopologyGraph g;
  json hosts = json::array();
  json rels = json::array();
  if (doc.is_null()) {
  } else if (doc.is_array()) {
    hosts = doc;
  } else if (doc.is_object()) {
    hosts = doc.value("hosts", json::array());
    rels = doc.value("relationships", json::array());
    if (hosts.is_null()) hosts = json::array();
    if (rels.is_null()) rels = json::array();
  } else {
    throw InvalidArgumentError("inventory must be a mapping or a list of hosts");
  }
  if (!hosts.is_array() || !rels.is_array()) {
    throw InvalidArgumentError("inventory hosts and relationships must be lists");
  }
  for (const auto& h : hosts) {
    HostRecord rec = HostRecord::FromJson(h);
    if (!rec.snapshot_ref.empty() && !base_dir.empty() && fs::path(rec.snapshot_ref).is_relative()) {
      rec.snapshot_ref = (base_dir / rec.snapshot_ref).lexically_normal().string();
    }
    g.hosts.push_back(std::move(rec));
  }
  for (const auto& r : rels) g.relationships.push_back(TopologyRelationship::FromJson(r));
  g.Validate();
  return g;
}

TopologyGraph LoadInventoryFile(const fs::path& path) {
  return ParseInventory(ReadFile(path), fs::absolute(path).parent_path());
}

void AuditProfile::Validate() const {
  if (profile_id.empty()) throw InvalidArgumentError("profile_id must not be empty");
  if (host_selector.empty()) {
    throw InvalidArgumentError("profile '" + profile_id + "' has an empty host selector");
  }
  if (categories.empty()) {
    throw InvalidArgumentError("profile '" + profile_id + "' selects no evidence categories");
  }
  if (sync_policy.kind == SyncKind::kPeriodic && sync_policy.interval_seconds <= 0) {
    throw InvalidArgumentError("PERIODIC sync policy needs a positive interval");
  }
}

json AuditProfile::ToJson() const {
  json sync = {{"kind", sync_policy.kind == SyncKind::kPeriodic ? "PERIODIC" : "ON_DEMAND"}};
  if (sync_policy.kind == SyncKind::kPeriodic) sync["interval_seconds"] = sync_policy.interval_seconds;
  return {{"profile_id", profile_id},
          {"name", name},
          {"host_selector", host_selector},
          {"categories", CategoriesToJson(categories)},
          {"sync_policy", sync}};
}

AuditProfile AuditProfile::FromJson(const json& v) {
  AuditProfile p;
  p.profile_id = RequireString(v, "profile_id", "profile");
  p.name = v.value("name", p.profile_id);
  const json sel = v.value("host_selector", json::array());
  if (!sel.is_array()) throw InvalidArgumentError("host_selector must be a list");
  for (const auto& s : sel) {
    if (!s.is_string()) throw InvalidArgumentError("host_selector entries must be strings");
    p.host_selector.push_back(s.get<std::string>());
  }
  if (v.contains("categories")) {
    p.categories = ParseCategories(v["categories"]);
  } else {
    p.categories.insert(std::begin(evidence::kAllCategories), std::end(evidence::kAllCategories));
  }
  if (v.contains("sync_policy")) {
    const json& s = v["sync_policy"];
    const std::string kind = s.is_string() ? s.get<std::string>() : s.value("kind", "ON_DEMAND");
    if (kind == "PERIODIC") {
      p.sync_policy.kind = SyncKind::kPeriodic;
      p.sync_policy.interval_seconds = s.is_object() ? s.value("interval_seconds", std::int64_t{0}) : 0;
    } else if (kind != "ON_DEMAND") {
      throw InvalidArgumentError("unknown sync policy '" + kind + "'");
    }
  }
  p.Validate();
  return p;
}

AuditProfile ParseProfile(std::string_view text) { return AuditProfile::FromJson(ParseDocument(text)); }

json HostProfile::ToJson() const {
  return {{"profile_id", profile_id}, {"host_id", host_id}, {"categories", CategoriesToJson(categories)}};
}

HostProfile HostProfile::FromJson(const json& v) {
  return {v.at("profile_id").get<std::string>(), v.at("host_id").get<std::string>(),
          ParseCategories(v.at("categories"))};
}

std::vector<const HostRecord*> SelectHosts(const TopologyGraph& topology,
                                           const std::vector<std::string>& selector) {
  std::set<std::string> picked;
  for (const auto& entry : selector) {
    bool matched = false;
    for (const auto& h : topology.hosts) {
      if (h.host_id == entry || h.role == entry) {
        picked.insert(h.host_id);
        matched = true;
      }
    }
    if (!matched) throw InvalidArgumentError("selector '" + entry + "' matches no known host");
  }
  std::vector<const HostRecord*> out;
  for (const auto& h : topology.hosts) {
    if (picked.count(h.host_id)) out.push_back(&h);
  }
  return out;
}

}  // namespace twinaudit::ams
