#include "twinaudit/sdt/access.hpp"

#include <openssl/sha.h>

#include "twinaudit/errors.hpp"
#include "twinaudit/ids.hpp"

namespace twinaudit::sdt {

std::string_view ToString(Scope scope) {
  switch (scope) {
    case Scope::kRead:
      return "READ";
    case Scope::kWriteRepresentation:
      return "WRITE_REPRESENTATION";
    case Scope::kAdmin:
      return "ADMIN";
  }
  return "READ";
}

std::optional<Scope> ParseScope(std::string_view text) {
  for (auto s : {Scope::kRead, Scope::kWriteRepresentation, Scope::kAdmin}) {
    if (ToString(s) == text) return s;
  }
  return std::nullopt;
}

std::string TokenFingerprint(std::string_view token) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(token.data()), token.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 6; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

AccessPolicy::AccessPolicy(std::map<std::string, std::set<Scope>> tokens) {
  for (auto& [t, s] : tokens) tokens_.emplace(t, std::move(s));
}

std::map<std::string, std::set<Scope>> AccessPolicy::ParseTokens(const nlohmann::json& tokens) {
  if (!tokens.is_object()) throw InvalidArgumentError("tokens must be an object");
  std::map<std::string, std::set<Scope>> out;
  for (const auto& [token, scopes] : tokens.items()) {
    if (token.empty()) throw InvalidArgumentError("empty access token");
    if (!scopes.is_array()) throw InvalidArgumentError("scopes for a token must be a list");
    auto& set = out[token];
    for (const auto& s : scopes) {
      auto scope = s.is_string() ? ParseScope(s.get<std::string>()) : std::nullopt;
      if (!scope) throw InvalidArgumentError("unknown scope " + s.dump());
      set.insert(*scope);
    }
  }
  return out;
}

void AccessPolicy::Grant(const std::string& token, std::set<Scope> scopes) {
  std::lock_guard lock(mu_);
  tokens_[token] = std::move(scopes);
}

bool AccessPolicy::Authorize(std::string_view token, std::string_view action,
                             std::string_view target, Scope required) {
  std::lock_guard lock(mu_);
  bool allowed = false;
  if (!token.empty()) {
    auto it = tokens_.find(token);
    allowed = it != tokens_.end() && it->second.count(required) > 0;
  }
  log_.push_back({token.empty() ? "" : TokenFingerprint(token), std::string(action),
                  std::string(target), required, allowed, MonotonicNanos()});
  return allowed;
}

std::vector<AccessDecision> AccessPolicy::decisions() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t AccessPolicy::decision_count() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

}  // namespace twinaudit::sdt
