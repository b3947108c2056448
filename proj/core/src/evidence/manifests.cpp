#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "twinaudit/evidence/collector.hpp"

namespace twinaudit::evidence {

namespace {

namespace pt = boost::property_tree;
using nlohmann::json;

struct Dep {
  std::string name;
  std::string spec;  // verbatim version text
  std::optional<std::string> pinned;
  std::map<std::string, std::string> extra;
};

struct Project {
  std::string name;
  std::optional<std::string> version;
  std::map<std::string, std::string> extra;
  std::vector<Dep> deps;
};

std::string Basename(const std::string& path) {
  const auto slash = path.rfind('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string ParentName(const std::string& path) {
  const auto slash = path.rfind('/');
  if (slash == std::string::npos) return "";
  const std::string dir = path.substr(0, slash);
  return Basename(dir);
}

const std::regex& SemverExact() {
  static const std::regex re(R"(^v?=?(\d+\.\d+\.\d+(?:[-+][0-9A-Za-z.+-]+)?)$)");
  return re;
}

std::optional<std::string> ExactSemver(const std::string& spec) {
  std::smatch m;
  if (std::regex_match(spec, m, SemverExact())) return m[1].str();
  return std::nullopt;
}

std::string PurlName(const std::string& ecosystem, const std::string& name,
                     const std::string& group) {
  if (ecosystem == "maven") return "pkg:maven/" + group + "/" + name;
  if (ecosystem == "pypi") {
    std::string n = name;
    for (auto& c : n) c = c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return "pkg:pypi/" + n;
  }
  if (ecosystem == "npm") {
    return "pkg:npm/" + (name.rfind('@', 0) == 0 ? "%40" + name.substr(1) : name);
  }
  return "pkg:composer/" + name;
}

// ---- Maven ----

std::string Substitute(std::string text, const std::map<std::string, std::string>& props) {
  for (int guard = 0; guard < 8; ++guard) {
    const auto open = text.find("${");
    if (open == std::string::npos) break;
    const auto close = text.find('}', open);
    if (close == std::string::npos) break;
    auto it = props.find(text.substr(open + 2, close - open - 2));
    if (it == props.end()) break;
    text.replace(open, close - open + 1, it->second);
  }
  return text;
}

Project ParseMaven(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  const pt::ptree& p = tree.get_child("project");
  Project proj;
  const std::string group =
      p.get<std::string>("groupId", p.get<std::string>("parent.groupId", ""));
  proj.name = p.get<std::string>("artifactId");
  const std::string version =
      p.get<std::string>("version", p.get<std::string>("parent.version", ""));
  std::map<std::string, std::string> props;
  if (auto node = p.get_child_optional("properties")) {
    for (const auto& [k, v] : *node) props[k] = v.data();
  }
  props["project.version"] = version;
  props["project.groupId"] = group;
  if (!version.empty()) proj.version = Substitute(version, props);
  proj.extra["group"] = group;
  if (auto deps = p.get_child_optional("dependencies")) {
    for (const auto& [tag, d] : *deps) {
      if (tag != "dependency") continue;
      Dep dep;
      dep.name = d.get<std::string>("artifactId");
      const std::string g = Substitute(d.get<std::string>("groupId", ""), props);
      dep.extra["group"] = g;
      if (auto scope = d.get_optional<std::string>("scope")) dep.extra["scope"] = *scope;
      dep.spec = Substitute(d.get<std::string>("version", ""), props);
      const bool range = dep.spec.find_first_of("[](),") != std::string::npos ||
                         dep.spec.find("${") != std::string::npos;
      if (!dep.spec.empty() && !range) dep.pinned = dep.spec;
      proj.deps.push_back(std::move(dep));
    }
  }
  return proj;
}

// ---- pip ----

Project ParseRequirements(const std::string& text, const std::string& path) {
  static const std::regex line_re(R"(^([A-Za-z0-9][A-Za-z0-9._-]*)(\[[^\]]*\])?\s*(.*)$)");
  Project proj;
  proj.name = ParentName(path);
  if (proj.name.empty()) proj.name = "requirements";
  for (auto line : detail::SplitLines(text)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    if (auto semi = line.find(';'); semi != std::string::npos) line = line.substr(0, semi);
    line = detail::Trim(line);
    if (line.empty() || line[0] == '-') continue;
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) {
      throw InvalidArgumentError("unrecognized requirement line '" + line + "'");
    }
    Dep dep;
    dep.name = m[1].str();
    dep.spec = detail::Trim(m[3].str());
    std::string spec = dep.spec;
    spec.erase(std::remove_if(spec.begin(), spec.end(), [](char c) { return c == ' '; }), spec.end());
    for (const char* op : {"===", "=="}) {
      const std::string o = op;
      if (spec.rfind(o, 0) == 0) {
        const std::string v = spec.substr(o.size());
        if (!v.empty() && v.find_first_of("*,<>!=~") == std::string::npos) dep.pinned = v;
        break;
      }
    }
    proj.deps.push_back(std::move(dep));
  }
  return proj;
}

// ---- npm / composer ----

void JsonDeps(const json& doc, const char* key, const char* scope, Project& proj, bool composer) {
  if (!doc.contains(key)) return;
  const json& deps = doc.at(key);
  if (!deps.is_object()) throw InvalidArgumentError(std::string(key) + " is not an object");
  for (const auto& [name, spec] : deps.items()) {
    if (composer && (name == "php" || name.rfind("ext-", 0) == 0 || name.rfind("lib-", 0) == 0)) {
      continue;
    }
    if (!spec.is_string()) throw InvalidArgumentError("version of " + name + " is not a string");
    Dep dep;
    dep.name = name;
    dep.spec = spec.get<std::string>();
    dep.pinned = ExactSemver(dep.spec);
    dep.extra["scope"] = scope;
    proj.deps.push_back(std::move(dep));
  }
}

Project ParseJsonManifest(const std::string& text, bool composer) {
  const json doc = json::parse(text);
  if (!doc.is_object()) throw InvalidArgumentError("manifest is not a JSON object");
  Project proj;
  if (!doc.contains("name") || !doc.at("name").is_string()) {
    throw InvalidArgumentError("manifest has no name");
  }
  proj.name = doc.at("name").get<std::string>();
  if (doc.contains("version") && doc.at("version").is_string()) {
    proj.version = doc.at("version").get<std::string>();
  }
  if (composer) {
    JsonDeps(doc, "require", "runtime", proj, true);
    JsonDeps(doc, "require-dev", "dev", proj, true);
  } else {
    JsonDeps(doc, "dependencies", "runtime", proj, false);
    JsonDeps(doc, "devDependencies", "dev", proj, false);
  }
  return proj;
}

void Emit(const HostSnapshot& snapshot, const std::string& path, const std::string& ecosystem,
          const Project& proj, std::vector<EvidenceRecord>& out) {
  auto base = [&](const std::string& name) {
    EvidenceRecord r;
    r.host_id = snapshot.host_id();
    r.category = Category::kSoftwareComponent;
    r.name = name;
    r.source_path = path;
    r.occurrences = {path};
    r.attributes[std::string(attr::kEcosystem)] = ecosystem;
    return r;
  };
  auto purl = [&](const std::string& name, const std::map<std::string, std::string>& extra,
                  const std::optional<std::string>& version) {
    auto g = extra.find("group");
    std::string p = PurlName(ecosystem, name, g == extra.end() ? "" : g->second);
    if (version) p += "@" + *version;
    return p;
  };

  EvidenceRecord project = base(proj.name);
  project.version = proj.version;
  project.attributes[std::string(attr::kRole)] = "project";
  for (const auto& [k, v] : proj.extra) project.attributes[k] = v;
  project.attributes[std::string(attr::kPurl)] = purl(proj.name, proj.extra, proj.version);

  std::set<std::pair<std::string, std::optional<std::string>>> seen;
  for (const auto& d : proj.deps) {
    if (!seen.emplace(d.name, d.pinned).second) continue;
    EvidenceRecord r = base(d.name);
    r.version = d.pinned;
    r.attributes[std::string(attr::kRole)] = "dependency";
    for (const auto& [k, v] : d.extra) r.attributes[k] = v;
    if (!d.pinned && !d.spec.empty()) r.attributes[std::string(attr::kVersionRange)] = d.spec;
    r.attributes[std::string(attr::kPurl)] = purl(d.name, d.extra, d.pinned);
    project.relationships.push_back({std::string(kDependsOn), d.name, d.pinned});
    out.push_back(std::move(r));
  }
  std::sort(project.relationships.begin(), project.relationships.end());
  out.push_back(std::move(project));
}

bool Excluded(const std::string& path) {
  return path.find("node_modules/") != std::string::npos ||
         path.find("/vendor/") != std::string::npos || path.rfind("vendor/", 0) == 0;
}

}  // namespace

std::vector<EvidenceRecord> ParseProjectManifests(const HostSnapshot& snapshot,
                                                  const CollectorConfig& config,
                                                  std::vector<ScanWarning>* warnings) {
  std::vector<EvidenceRecord> out;
  for (const auto& path : snapshot.files()) {
    if (Excluded(path)) continue;
    for (const auto& [ecosystem, globs] : config.manifest_globs) {
      const bool hit = std::any_of(globs.begin(), globs.end(),
                                   [&](const std::string& g) { return detail::GlobMatch(g, path); });
      if (!hit) continue;
      auto bytes = snapshot.Read(path);
      if (!bytes) {
        if (warnings) warnings->push_back({path, "unreadable file skipped"});
        break;
      }
      try {
        Project proj;
        if (ecosystem == "maven") {
          proj = ParseMaven(*bytes);
        } else if (ecosystem == "pypi") {
          proj = ParseRequirements(*bytes, path);
        } else if (ecosystem == "npm" || ecosystem == "composer") {
          proj = ParseJsonManifest(*bytes, ecosystem == "composer");
        } else {
          break;
        }
        std::string eco = ecosystem;
        if (eco == "npm") {
          const auto slash = path.rfind('/');
          const std::string dir = slash == std::string::npos ? "" : path.substr(0, slash + 1);
          if (snapshot.Exists(dir + "yarn.lock")) proj.extra["package_manager"] = "yarn";
        }
        Emit(snapshot, path, eco, proj, out);
      } catch (const std::exception& e) {
        EvidenceRecord r;
        r.host_id = snapshot.host_id();
        r.category = Category::kSoftwareComponent;
        r.name = Basename(path);
        r.source_path = path;
        r.occurrences = {path};
        r.attributes[std::string(attr::kEcosystem)] = ecosystem;
        r.attributes[std::string(attr::kParseError)] = e.what();
        out.push_back(std::move(r));
      }
      break;
    }
  }
  std::sort(out.begin(), out.end(), RecordLess);
  return out;
}

}  // namespace twinaudit::evidence
