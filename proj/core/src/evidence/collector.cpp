#include "twinaudit/evidence/collector.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <tuple>

#include "twinaudit/errors.hpp"

namespace twinaudit::evidence {

namespace detail {

bool IsText(const std::string& bytes) {
  const std::size_t n = std::min<std::size_t>(bytes.size(), 8192);
  return bytes.find('\0') >= n;
}

namespace {
bool EndsWith(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}
}  // namespace

bool IsCertificatePath(const std::string& path) {
  return EndsWith(path, ".pem") || EndsWith(path, ".crt") || EndsWith(path, ".cer") ||
         EndsWith(path, ".der");
}

bool IsConfigPath(const std::string& path) {
  return path.rfind("etc/", 0) == 0 && !IsCertificatePath(path) && !EndsWith(path, ".key");
}

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    pos = end + 1;
  }
  return out;
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string StripComments(const std::string& text) {
  std::string out;
  for (const auto& line : SplitLines(text)) {
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && (line[first] == '#' || line[first] == ';')) {
      out += '\n';
      continue;
    }
    std::size_t cut = std::string::npos;
    for (std::size_t i = 1; i < line.size(); ++i) {
      if (line[i] == '#' && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        cut = i;
        break;
      }
    }
    out += line.substr(0, cut);
    out += '\n';
  }
  return out;
}

bool GlobMatch(const std::string& pattern, const std::string& path) {
  return fnmatch(pattern.c_str(), path.c_str(), 0) == 0;
}

}  // namespace detail

CollectorConfig CollectorConfig::Default() {
  CollectorConfig c;
  c.enabled_categories.insert(std::begin(kAllCategories), std::end(kAllCategories));
  c.manifest_globs = {
      {"maven", {"pom.xml", "*/pom.xml"}},
      {"pypi", {"requirements.txt", "*/requirements.txt", "*/requirements-*.txt"}},
      {"npm", {"package.json", "*/package.json"}},
      {"composer", {"composer.json", "*/composer.json"}},
  };
  c.algorithm_token_table = DefaultTokenTable();
  c.log_event_patterns = {
      {R"(failed password|authentication failure|invalid user|auth failed)", "auth_failure"},
      {R"(accepted (password|publickey))", "auth_success"},
      {R"(handshake failure|ssl_do_handshake\(\) failed|tls handshake error|no shared cipher)",
       "tls_handshake_failure"},
      {R"(decryption failed|bad record mac|decrypt error|encryption error)", "encryption_failure"},
      {R"(certificate (has )?expired|certificate verify failed)", "certificate_error"},
  };
  c.kernel_keys = {
      "crypto.fips_enabled",
      "kernel.random.entropy_avail",
      "kernel.random.poolsize",
      "kernel.random.read_wakeup_threshold",
      "kernel.random.write_wakeup_threshold",
      "kernel.randomize_va_space",
  };
  return c;
}

CollectorConfig CollectorConfig::ForCategories(std::set<Category> categories) {
  CollectorConfig c = Default();
  c.enabled_categories = std::move(categories);
  return c;
}

void CollectorConfig::Validate() const {
  if (enabled_categories.empty()) {
    throw InvalidArgumentError("collector config enables no categories");
  }
  if (enabled_categories.count(Category::kAlgorithm) && algorithm_token_table.empty()) {
    throw InvalidArgumentError("ALGORITHM enabled with an empty token table");
  }
  if (enabled_categories.count(Category::kSystemLogEvent) && log_event_patterns.empty()) {
    throw InvalidArgumentError("SYSTEM_LOG_EVENT enabled with no log patterns");
  }
}

std::vector<EvidenceRecord> DetectAlgorithms(const HostSnapshot& snapshot,
                                             const CollectorConfig& config,
                                             const std::vector<EvidenceRecord>& certificates,
                                             std::vector<ScanWarning>* warnings) {
  const TokenMatcher matcher(config.algorithm_token_table);
  std::map<std::string, std::set<std::string>> seen;  // token -> paths
  for (const auto& path : snapshot.files()) {
    if (!detail::IsConfigPath(path)) continue;
    auto bytes = snapshot.Read(path);
    if (!bytes) {
      if (warnings) warnings->push_back({path, "unreadable file skipped"});
      continue;
    }
    if (!detail::IsText(*bytes)) continue;
    for (auto& token : matcher.Scan(detail::StripComments(*bytes))) seen[token].insert(path);
  }
  for (const auto& cert : certificates) {
    if (cert.is_warning()) continue;
    for (auto key : {attr::kKeyToken, attr::kSignatureDigest}) {
      auto token = cert.attribute(key);
      if (token && !token->empty() && matcher.Find(*token)) seen[*token].insert(cert.source_path);
    }
  }
  std::vector<EvidenceRecord> out;
  for (const auto& [token, paths] : seen) {
    const AlgorithmToken* t = matcher.Find(token);
    EvidenceRecord r;
    r.host_id = snapshot.host_id();
    r.category = Category::kAlgorithm;
    r.name = token;
    r.attributes[std::string(attr::kPrimitive)] = t->primitive;
    r.attributes[std::string(attr::kFamily)] = t->family;
    if (!t->parameter_set.empty()) r.attributes[std::string(attr::kParameterSet)] = t->parameter_set;
    if (!t->mode.empty()) r.attributes[std::string(attr::kMode)] = t->mode;
    r.attributes[std::string(attr::kCount)] = std::to_string(paths.size());
    r.occurrences.assign(paths.begin(), paths.end());
    r.source_path = r.occurrences.front();
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), RecordLess);
  return out;
}

std::vector<EvidenceRecord> ParseKernelSettings(const HostSnapshot& snapshot,
                                                const CollectorConfig& config,
                                                std::vector<ScanWarning>* warnings) {
  std::vector<std::string> sources;
  if (auto dump = snapshot.fact("sysctl_dump"); dump && snapshot.Exists(*dump)) {
    sources.push_back(*dump);
  } else {
    if (snapshot.Exists("etc/sysctl.conf")) sources.push_back("etc/sysctl.conf");
    for (const auto& path : snapshot.files()) {
      if (path.rfind("etc/sysctl.d/", 0) == 0 && path.size() > 5 &&
          path.compare(path.size() - 5, 5, ".conf") == 0) {
        sources.push_back(path);
      }
    }
  }
  // Later assignments override earlier ones, as sysctl applies them.
  std::map<std::string, std::pair<std::string, std::string>> values;  // key -> (value, path)
  for (const auto& path : sources) {
    auto bytes = snapshot.Read(path);
    if (!bytes) {
      if (warnings) warnings->push_back({path, "unreadable file skipped"});
      continue;
    }
    for (const auto& line : detail::SplitLines(detail::StripComments(*bytes))) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = detail::Trim(std::string_view(line).substr(0, eq));
      std::replace(key.begin(), key.end(), '/', '.');
      if (!config.kernel_keys.count(key)) continue;
      values[key] = {detail::Trim(std::string_view(line).substr(eq + 1)), path};
    }
  }
  std::vector<EvidenceRecord> out;
  for (const auto& [key, vp] : values) {
    EvidenceRecord r;
    r.host_id = snapshot.host_id();
    r.category = Category::kKernelSetting;
    r.name = key;
    r.attributes[std::string(attr::kValue)] = vp.first;
    r.source_path = vp.second;
    r.occurrences = {vp.second};
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), RecordLess);
  return out;
}

std::vector<EvidenceRecord> ScanLogs(const HostSnapshot& snapshot, const CollectorConfig& config,
                                     std::vector<ScanWarning>* warnings) {
  std::vector<EvidenceRecord> out;
  if (config.log_event_patterns.empty()) return out;
  std::vector<std::pair<std::regex, std::string>> patterns;
  for (const auto& p : config.log_event_patterns) {
    patterns.emplace_back(std::regex(p.pattern, std::regex::ECMAScript | std::regex::icase),
                          p.event_class);
  }
  for (const auto& path : snapshot.files()) {
    if (path.rfind("var/log/", 0) != 0) continue;
    auto bytes = snapshot.Read(path);
    if (!bytes) {
      if (warnings) warnings->push_back({path, "unreadable file skipped"});
      continue;
    }
    if (!detail::IsText(*bytes)) continue;
    std::map<std::string, std::size_t> counts;
    for (const auto& line : detail::SplitLines(*bytes)) {
      for (const auto& [re, cls] : patterns) {
        if (std::regex_search(line, re)) {
          ++counts[cls];
          break;
        }
      }
    }
    for (const auto& [cls, n] : counts) {
      EvidenceRecord r;
      r.host_id = snapshot.host_id();
      r.category = Category::kSystemLogEvent;
      r.name = cls;
      r.attributes[std::string(attr::kCount)] = std::to_string(n);
      r.source_path = path;
      r.occurrences = {path};
      out.push_back(std::move(r));
    }
  }
  std::sort(out.begin(), out.end(), RecordLess);
  return out;
}

ScanResult ScanHost(const HostSnapshot& snapshot, const CollectorConfig& config) {
  config.Validate();
  const auto& on = config.enabled_categories;
  ScanResult result;
  auto* w = &result.warnings;
  auto append = [&](std::vector<EvidenceRecord> records) {
    for (auto& r : records) result.records.push_back(std::move(r));
  };

  const bool need_certs = on.count(Category::kCertificate) || on.count(Category::kAlgorithm);
  std::vector<EvidenceRecord> certs = need_certs ? ParseCertificates(snapshot, w)
                                                 : std::vector<EvidenceRecord>{};
  if (on.count(Category::kAlgorithm)) append(DetectAlgorithms(snapshot, config, certs, w));
  if (on.count(Category::kCertificate)) append(std::move(certs));
  if (on.count(Category::kCryptoLibrary)) append(DetectCryptoLibraries(snapshot, config, w));
  if (on.count(Category::kOpensslConfig)) append(ParseOpensslConfig(snapshot, config, w));
  if (on.count(Category::kKernelSetting)) append(ParseKernelSettings(snapshot, config, w));
  if (on.count(Category::kSystemLogEvent)) append(ScanLogs(snapshot, config, w));
  if (on.count(Category::kSoftwareComponent)) append(ParseProjectManifests(snapshot, config, w));

  std::set<std::pair<std::string, std::optional<std::string>>> names;
  std::set<std::string> bare_names;
  for (const auto& r : result.records) {
    names.emplace(r.name, r.version);
    bare_names.insert(r.name);
  }
  for (auto& r : result.records) {
    std::erase_if(r.relationships, [&](const Relationship& rel) {
      return rel.target_version ? names.count({rel.target_name, rel.target_version}) == 0
                                : bare_names.count(rel.target_name) == 0;
    });
  }
  std::sort(result.records.begin(), result.records.end(), RecordLess);
  std::sort(result.warnings.begin(), result.warnings.end(), [](const auto& a, const auto& b) {
    return std::tie(a.path, a.message) < std::tie(b.path, b.message);
  });
  return result;
}

}  // namespace twinaudit::evidence
