#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <tuple>

#include "twinaudit/evidence/collector.hpp"

namespace twinaudit::evidence {

namespace {

struct Hit {
  std::string name;
  std::string version;
  std::string path;
  std::string source;  // soname | package | manifest
};

struct SonameRule {
  std::regex re;
  std::string name;
};

const std::vector<SonameRule>& SonameRules() {
  static const std::vector<SonameRule> rules = [] {
    std::vector<SonameRule> r;
    auto add = [&](const char* pattern, const char* name) {
      r.push_back({std::regex(pattern), name});
    };
    add(R"(^lib(?:ssl|crypto)\.so\.([0-9][0-9.]*)$)", "OpenSSL");
    add(R"(^libmbed(?:tls|crypto|x509)\.so\.([0-9][0-9.]*)$)", "mbedTLS");
    add(R"(^libcrypto\+\+\.so\.([0-9][0-9.]*)$)", "Crypto++");
    add(R"(^libcryptopp\.so\.([0-9][0-9.]*)$)", "Crypto++");
    add(R"(^libgnutls\.so\.([0-9][0-9.]*)$)", "GnuTLS");
    add(R"(^libwolfssl\.so\.([0-9][0-9.]*)$)", "wolfSSL");
    add(R"(^libsodium\.so\.([0-9][0-9.]*)$)", "libsodium");
    add(R"(^bcprov-jdk[0-9a-z]+-([0-9][0-9.]*)\.jar$)", "BouncyCastle");
    return r;
  }();
  return rules;
}

bool IsLibraryDir(const std::string& path) {
  for (const char* prefix : {"lib/", "lib64/", "usr/lib/", "usr/lib64/", "usr/local/lib/",
                             "usr/share/java/", "opt/"}) {
    if (path.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

std::optional<std::string> PackageLibrary(const std::string& package) {
  static const std::vector<std::pair<std::regex, std::string>> rules = {
      {std::regex(R"(^(openssl|libssl[0-9.]*|libssl-dev)$)"), "OpenSSL"},
      {std::regex(R"(^libmbed(tls|crypto|x509)[0-9]*$)"), "mbedTLS"},
      {std::regex(R"(^libcrypto\+\+[0-9]*$)"), "Crypto++"},
      {std::regex(R"(^(libgnutls[0-9]*|gnutls)$)"), "GnuTLS"},
      {std::regex(R"(^libbcprov-java$)"), "BouncyCastle"},
      {std::regex(R"(^libwolfssl[0-9]*$)"), "wolfSSL"},
      {std::regex(R"(^libsodium[0-9]*$)"), "libsodium"},
  };
  for (const auto& [re, name] : rules) {
    if (std::regex_match(package, re)) return name;
  }
  return std::nullopt;
}

// Debian-style "1:3.0.2-0ubuntu1.10" -> "3.0.2".
std::string UpstreamVersion(std::string v) {
  if (auto colon = v.find(':'); colon != std::string::npos) v = v.substr(colon + 1);
  if (auto dash = v.find('-'); dash != std::string::npos) v = v.substr(0, dash);
  if (auto plus = v.find('+'); plus != std::string::npos) v = v.substr(0, plus);
  return v;
}

std::string Major(const std::string& v) { return v.substr(0, v.find('.')); }

// One segment-wise prefix of the other: "3" and "3.0.2" agree, "1.1" and
// "3" do not.
bool Compatible(const std::string& a, const std::string& b) {
  const std::string& s = a.size() <= b.size() ? a : b;
  const std::string& l = a.size() <= b.size() ? b : a;
  return s.empty() || (l.rfind(s, 0) == 0 && (l.size() == s.size() || l[s.size()] == '.'));
}

}  // namespace

std::vector<EvidenceRecord> DetectCryptoLibraries(const HostSnapshot& snapshot,
                                                  const CollectorConfig& config,
                                                  std::vector<ScanWarning>* warnings) {
  std::vector<Hit> hits;
  for (const auto& path : snapshot.files()) {
    if (!IsLibraryDir(path)) continue;
    const auto slash = path.rfind('/');
    const std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    for (const auto& rule : SonameRules()) {
      std::smatch m;
      if (std::regex_match(base, m, rule.re)) {
        hits.push_back({rule.name, m[1].str(), path, "soname"});
        break;
      }
    }
  }
  if (auto list = snapshot.fact("packages"); list && snapshot.Exists(*list)) {
    auto bytes = snapshot.Read(*list);
    if (!bytes) {
      if (warnings) warnings->push_back({*list, "unreadable file skipped"});
    } else {
      for (const auto& line : detail::SplitLines(*bytes)) {
        const std::string t = detail::Trim(line);
        const auto sp = t.find_first_of(" \t");
        if (t.empty() || sp == std::string::npos) continue;
        if (auto lib = PackageLibrary(t.substr(0, sp))) {
          hits.push_back({*lib, UpstreamVersion(detail::Trim(t.substr(sp))), *list, "package"});
        }
      }
    }
  }
  for (const auto& r : ParseProjectManifests(snapshot, config, nullptr)) {
    if (r.is_warning()) continue;
    const auto group = r.attribute("group");
    if (group && *group == "org.bouncycastle") {
      hits.push_back({"BouncyCastle", r.version.value_or(""), r.source_path, "manifest"});
    }
  }

  // Merge hits describing the same library line.
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return std::tie(a.name, a.version, a.path) < std::tie(b.name, b.version, b.path);
  });
  struct Group {
    std::string name;
    std::string version;
    std::set<std::string> paths;
    std::set<std::string> sources;
  };
  std::vector<Group> groups;
  for (const auto& h : hits) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.name == h.name && Compatible(g.version, h.version);
    });
    if (it == groups.end()) {
      groups.push_back({h.name, h.version, {h.path}, {h.source}});
    } else {
      if (h.version.size() > it->version.size()) it->version = h.version;
      it->paths.insert(h.path);
      it->sources.insert(h.source);
    }
  }
  std::vector<EvidenceRecord> out;
  for (const auto& g : groups) {
    EvidenceRecord r;
    r.host_id = snapshot.host_id();
    r.category = Category::kCryptoLibrary;
    r.name = g.name;
    if (!g.version.empty()) {
      r.version = g.version;
      r.attributes["major_version"] = Major(g.version);
    }
    std::string src;
    for (const auto& s : g.sources) src += (src.empty() ? "" : ",") + s;
    r.attributes["detected_by"] = src;
    r.occurrences.assign(g.paths.begin(), g.paths.end());
    r.source_path = r.occurrences.front();
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), RecordLess);
  return out;
}

}  // namespace twinaudit::evidence
