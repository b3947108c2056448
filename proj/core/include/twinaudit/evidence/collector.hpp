#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "twinaudit/evidence/record.hpp"
#include "twinaudit/evidence/snapshot.hpp"
#include "twinaudit/evidence/tokens.hpp"

namespace twinaudit::evidence {

struct LogPattern {
  std::string pattern;  // ECMAScript regex, case-insensitive
  std::string event_class;
};

struct CollectorConfig {
  std::set<Category> enabled_categories;
  // Ecosystem (maven, pypi, npm, composer) to fnmatch patterns over relative
  // paths; '*' also matches '/'.
  std::map<std::string, std::vector<std::string>> manifest_globs;
  std::vector<AlgorithmToken> algorithm_token_table;
  std::vector<LogPattern> log_event_patterns;
  std::set<std::string> kernel_keys;

  // Every category, the default token table, patterns and key set.
  static CollectorConfig Default();
  static CollectorConfig ForCategories(std::set<Category> categories);

  // Throws InvalidArgumentError: empty category set, empty token table with
  // ALGORITHM enabled, empty pattern list with SYSTEM_LOG_EVENT enabled.
  void Validate() const;
};

struct ScanWarning {
  std::string path;
  std::string message;
};

struct ScanResult {
  std::vector<EvidenceRecord> records;
  std::vector<ScanWarning> warnings;
};

// Union of the category scanners restricted to the enabled categories, in
// RecordLess order, with relationships to records outside the output
// dropped. Never writes to the snapshot.
ScanResult ScanHost(const HostSnapshot& snapshot, const CollectorConfig& config);

// Individual scanners. Warnings (unreadable files) are appended when a sink
// is given.
std::vector<EvidenceRecord> DetectCryptoLibraries(const HostSnapshot& snapshot,
                                                  const CollectorConfig& config,
                                                  std::vector<ScanWarning>* warnings = nullptr);
std::vector<EvidenceRecord> ParseCertificates(const HostSnapshot& snapshot,
                                              std::vector<ScanWarning>* warnings = nullptr);
// OPENSSL_CONFIG records: attribute kind=protocol, one per (file, enabled TLS
// version); kind=cipher_config, one per cipher directive with the literal value.
std::vector<EvidenceRecord> ParseOpensslConfig(const HostSnapshot& snapshot,
                                               const CollectorConfig& config,
                                               std::vector<ScanWarning>* warnings = nullptr);
std::vector<EvidenceRecord> ParseKernelSettings(const HostSnapshot& snapshot,
                                                const CollectorConfig& config,
                                                std::vector<ScanWarning>* warnings = nullptr);
std::vector<EvidenceRecord> ScanLogs(const HostSnapshot& snapshot, const CollectorConfig& config,
                                     std::vector<ScanWarning>* warnings = nullptr);
std::vector<EvidenceRecord> ParseProjectManifests(const HostSnapshot& snapshot,
                                                  const CollectorConfig& config,
                                                  std::vector<ScanWarning>* warnings = nullptr);
// Tokens from configuration text under etc/ plus the key and digest tokens
// of `certificates` (normally ParseCertificates output).
std::vector<EvidenceRecord> DetectAlgorithms(const HostSnapshot& snapshot,
                                             const CollectorConfig& config,
                                             const std::vector<EvidenceRecord>& certificates,
                                             std::vector<ScanWarning>* warnings = nullptr);

// Helpers shared by the scanners.
namespace detail {
bool IsText(const std::string& bytes);
bool IsCertificatePath(const std::string& path);
bool IsConfigPath(const std::string& path);
// Text with '#' and ';' comments removed, line structure kept.
std::string StripComments(const std::string& text);
std::vector<std::string> SplitLines(const std::string& text);
std::string Trim(std::string_view s);
bool GlobMatch(const std::string& pattern, const std::string& path);
}  // namespace detail

}  // namespace twinaudit::evidence
