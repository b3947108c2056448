#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>

#include "twinaudit/evidence/collector.hpp"

namespace twinaudit::evidence {

namespace {

constexpr std::array<std::string_view, 6> kVersions = {"SSLv2",   "SSLv3",   "TLSv1",
                                                       "TLSv1.1", "TLSv1.2", "TLSv1.3"};
constexpr std::size_t kFirstTls = 2;

std::string Lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<std::size_t> VersionIndex(std::string_view token) {
  const std::string t = Lower(token);
  for (std::size_t i = 0; i < kVersions.size(); ++i) {
    if (Lower(kVersions[i]) == t) return i;
  }
  if (t == "tlsv1.0" || t == "tls1.0") return kFirstTls;
  if (t == "tls1.1") return 3;
  if (t == "tls1.2") return 4;
  if (t == "tls1.3") return 5;
  return std::nullopt;
}

enum class Directive { kNone, kList, kMin, kMax, kCipher };

Directive Classify(const std::string& key) {
  static const std::map<std::string, Directive> kKeys = {
      {"ssl_protocols", Directive::kList},
      {"sslprotocol", Directive::kList},
      {"smtpd_tls_protocols", Directive::kList},
      {"smtpd_tls_mandatory_protocols", Directive::kList},
      {"smtp_tls_protocols", Directive::kList},
      {"smtp_tls_mandatory_protocols", Directive::kList},
      {"minprotocol", Directive::kMin},
      {"ssl_min_protocol", Directive::kMin},
      {"maxprotocol", Directive::kMax},
      {"ssl_max_protocol", Directive::kMax},
      {"cipherstring", Directive::kCipher},
      {"ciphersuites", Directive::kCipher},
      {"ssl_ciphers", Directive::kCipher},
      {"sslciphersuite", Directive::kCipher},
      {"ssl_cipher_list", Directive::kCipher},
      {"tls_high_cipherlist", Directive::kCipher},
      {"smtpd_tls_mandatory_ciphers", Directive::kCipher},
      {"ssl_ciphersuites", Directive::kCipher},
  };
  auto it = kKeys.find(Lower(key));
  return it == kKeys.end() ? Directive::kNone : it->second;
}

// "key value;", "key = value", "key: value".
bool SplitDirective(const std::string& line, std::string& key, std::string& value) {
  const std::string t = detail::Trim(line);
  if (t.empty()) return false;
  std::size_t k = 0;
  while (k < t.size() && !std::isspace(static_cast<unsigned char>(t[k])) && t[k] != '=' &&
         t[k] != ':') {
    ++k;
  }
  key = t.substr(0, k);
  std::string rest = detail::Trim(std::string_view(t).substr(k));
  if (!rest.empty() && (rest.front() == '=' || rest.front() == ':')) {
    rest = detail::Trim(std::string_view(rest).substr(1));
  }
  while (!rest.empty() && rest.back() == ';') rest.pop_back();
  if (rest.size() >= 2 && (rest.front() == '"' || rest.front() == '\'') &&
      rest.back() == rest.front()) {
    rest = rest.substr(1, rest.size() - 2);
  }
  value = detail::Trim(rest);
  return !key.empty();
}

std::vector<std::string> ListItems(const std::string& value) {
  std::vector<std::string> items;
  std::string cur;
  for (char c : value) {
    if (c == ' ' || c == '\t' || c == ',' || c == ':') {
      if (!cur.empty()) items.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) items.push_back(std::move(cur));
  return items;
}

// nginx/apache/postfix protocol lists: additive items, +/-/! modifiers,
// "all", and postfix's ">=TLSv1.2".
std::set<std::size_t> EvaluateList(const std::string& value) {
  const auto items = ListItems(value);
  std::set<std::size_t> enabled;
  const bool only_exclusions = std::all_of(items.begin(), items.end(), [](const std::string& s) {
    return !s.empty() && (s[0] == '!' || s[0] == '-');
  });
  if (only_exclusions) {
    for (std::size_t i = kFirstTls; i < kVersions.size(); ++i) enabled.insert(i);
  }
  for (const auto& raw : items) {
    std::string item = raw;
    char op = '+';
    if (item.rfind(">=", 0) == 0) {
      if (auto v = VersionIndex(item.substr(2))) {
        for (std::size_t i = *v; i < kVersions.size(); ++i) enabled.insert(i);
      }
      continue;
    }
    if (item[0] == '+' || item[0] == '-' || item[0] == '!') {
      op = item[0];
      item = item.substr(1);
    }
    std::vector<std::size_t> targets;
    if (Lower(item) == "all") {
      for (std::size_t i = kFirstTls; i < kVersions.size(); ++i) targets.push_back(i);
    } else if (auto v = VersionIndex(item)) {
      targets.push_back(*v);
    }
    for (auto t : targets) {
      if (op == '+') {
        enabled.insert(t);
      } else {
        enabled.erase(t);
      }
    }
  }
  return enabled;
}

EvidenceRecord Base(const HostSnapshot& snapshot, const std::string& path) {
  EvidenceRecord r;
  r.host_id = snapshot.host_id();
  r.category = Category::kOpensslConfig;
  r.source_path = path;
  r.occurrences = {path};
  return r;
}

}  // namespace

std::vector<EvidenceRecord> ParseOpensslConfig(const HostSnapshot& snapshot,
                                               const CollectorConfig& config,
                                               std::vector<ScanWarning>* warnings) {
  const TokenMatcher matcher(config.algorithm_token_table);
  std::vector<EvidenceRecord> out;
  for (const auto& path : snapshot.files()) {
    if (!detail::IsConfigPath(path)) continue;
    auto bytes = snapshot.Read(path);
    if (!bytes) {
      if (warnings) warnings->push_back({path, "unreadable file skipped"});
      continue;
    }
    if (!detail::IsText(*bytes)) continue;
    const std::string text = detail::StripComments(*bytes);
    std::map<std::size_t, std::string> versions;  // index -> first directive
    std::optional<std::size_t> min_v;
    std::optional<std::size_t> max_v;
    std::string min_key;
    std::string key;
    std::string value;
    for (const auto& line : detail::SplitLines(text)) {
      if (!SplitDirective(line, key, value)) continue;
      switch (Classify(key)) {
        case Directive::kList:
          for (auto v : EvaluateList(value)) versions.emplace(v, key);
          break;
        case Directive::kMin:
          if (auto v = VersionIndex(value)) {
            min_v = *v;
            min_key = key;
          }
          break;
        case Directive::kMax:
          if (auto v = VersionIndex(value)) max_v = *v;
          break;
        case Directive::kCipher: {
          auto r = Base(snapshot, path);
          r.name = key;
          r.attributes[std::string(attr::kKind)] = "cipher_config";
          r.attributes[std::string(attr::kValue)] = value;
          r.attributes["directive"] = key;
          std::set<std::string> tokens;
          for (auto& t : matcher.Scan(value)) tokens.insert(t);
          for (const auto& t : tokens) r.relationships.push_back({std::string(kUses), t, std::nullopt});
          out.push_back(std::move(r));
          break;
        }
        case Directive::kNone:
          break;
      }
    }
    if (min_v) {
      const std::size_t hi = max_v.value_or(kVersions.size() - 1);
      for (std::size_t i = *min_v; i <= hi && i < kVersions.size(); ++i) versions.emplace(i, min_key);
    }
    if (versions.empty()) continue;
    std::set<std::string> file_tokens;
    for (auto& t : matcher.Scan(text)) file_tokens.insert(t);
    for (const auto& [idx, directive] : versions) {
      auto r = Base(snapshot, path);
      const std::string name(kVersions[idx]);
      r.name = name;
      r.version = name == "TLSv1" ? "1.0" : name.substr(4);
      r.attributes[std::string(attr::kKind)] = "protocol";
      r.attributes["protocol"] = name.substr(0, 3) == "TLS" ? "tls" : "ssl";
      r.attributes["directive"] = directive;
      for (const auto& t : file_tokens) r.relationships.push_back({std::string(kUses), t, std::nullopt});
      out.push_back(std::move(r));
    }
  }
  std::sort(out.begin(), out.end(), RecordLess);
  return out;
}

}  // namespace twinaudit::evidence
