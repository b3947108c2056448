#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace twinaudit::sdt {

enum class Scope { kRead, kWriteRepresentation, kAdmin };

std::string_view ToString(Scope scope);
std::optional<Scope> ParseScope(std::string_view text);

struct AccessDecision {
  std::string token_fingerprint;  // sha256 prefix, never the token itself
  std::string action;
  std::string target;
  Scope required = Scope::kRead;
  bool allowed = false;
  std::int64_t timestamp_ns = 0;
};

// Token -> scopes. Unknown tokens and missing scopes are denied; ADMIN does
// not imply the other scopes.
class AccessPolicy {
 public:
  AccessPolicy() = default;
  explicit AccessPolicy(std::map<std::string, std::set<Scope>> tokens);

  // {"token": ["READ", ...]}; throws InvalidArgumentError on unknown scopes
  // or empty tokens.
  static std::map<std::string, std::set<Scope>> ParseTokens(const nlohmann::json& tokens);

  void Grant(const std::string& token, std::set<Scope> scopes);

  // Total; every call appends one AccessDecision.
  bool Authorize(std::string_view token, std::string_view action, std::string_view target,
                 Scope required);

  std::vector<AccessDecision> decisions() const;
  std::size_t decision_count() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::set<Scope>, std::less<>> tokens_;
  std::vector<AccessDecision> log_;
};

std::string TokenFingerprint(std::string_view token);

}  // namespace twinaudit::sdt
