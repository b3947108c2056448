#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace twinaudit::evidence {

// One recognizable algorithm. `name` is the normalized token (family +
// parameters) used for deduplication; aliases are matched case-insensitively
// on word boundaries.
struct AlgorithmToken {
  std::string name;
  std::string primitive;  // cipher | hash | mac | signature | key-exchange | kdf
  std::string family;
  std::string parameter_set;
  std::string mode;
  std::vector<std::string> aliases;  // includes name
};

class TokenMatcher {
 public:
  explicit TokenMatcher(std::vector<AlgorithmToken> table);

  // Longest alias wins at each position; matched spans are consumed so an
  // alias nested in a longer match (SHA512 inside HMAC-SHA512) is not also
  // reported. Returns token names in order of appearance, with repeats.
  std::vector<std::string> Scan(std::string_view text) const;

  const AlgorithmToken* Find(std::string_view name) const;
  const std::vector<AlgorithmToken>& table() const { return table_; }
  bool empty() const { return table_.empty(); }

 private:
  std::vector<AlgorithmToken> table_;
  std::vector<std::pair<std::string, std::size_t>> aliases_;  // lowercase, longest first
};

std::vector<AlgorithmToken> DefaultTokenTable();

// Normalized token for a certificate public key, e.g. RSA-2048, ECC-P256,
// Ed25519. Empty when unknown.
std::string KeyToken(std::string_view key_algorithm, int key_bits, std::string_view curve);
// Normalized token for a signature digest name as reported by OpenSSL
// (SHA256, sha384, ...). Empty when unknown.
std::string DigestToken(std::string_view digest);

}  // namespace twinaudit::evidence
