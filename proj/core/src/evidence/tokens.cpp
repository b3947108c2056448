#include "twinaudit/evidence/tokens.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "twinaudit/errors.hpp"

namespace twinaudit::evidence {

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool IsWordChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

AlgorithmToken T(std::string name, std::string primitive, std::string family, std::string params,
                 std::string mode, std::vector<std::string> extra = {}) {
  AlgorithmToken t{name, std::move(primitive), std::move(family), std::move(params),
                   std::move(mode), {}};
  std::set<std::string> aliases{name};
  std::string underscored = name;
  std::replace(underscored.begin(), underscored.end(), '-', '_');
  aliases.insert(underscored);
  for (auto& e : extra) aliases.insert(std::move(e));
  t.aliases.assign(aliases.begin(), aliases.end());
  return t;
}

}  // namespace

TokenMatcher::TokenMatcher(std::vector<AlgorithmToken> table) : table_(std::move(table)) {
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < table_.size(); ++i) {
    for (const auto& alias : table_[i].aliases) {
      auto key = Lower(alias);
      auto [it, inserted] = seen.emplace(key, i);
      if (!inserted && it->second != i) {
        throw InvalidArgumentError("alias '" + alias + "' maps to two algorithm tokens");
      }
    }
  }
  for (auto& [alias, idx] : seen) aliases_.emplace_back(alias, idx);
  std::stable_sort(aliases_.begin(), aliases_.end(), [](const auto& a, const auto& b) {
    return a.first.size() > b.first.size();
  });
}

std::vector<std::string> TokenMatcher::Scan(std::string_view text) const {
  std::vector<std::string> out;
  const std::string lower = Lower(text);
  std::size_t i = 0;
  while (i < lower.size()) {
    if (!IsWordChar(lower[i]) || (i > 0 && IsWordChar(lower[i - 1]))) {
      ++i;
      continue;
    }
    bool matched = false;
    for (const auto& [alias, idx] : aliases_) {
      if (lower.compare(i, alias.size(), alias) != 0) continue;
      const std::size_t end = i + alias.size();
      if (end < lower.size() && IsWordChar(lower[end])) continue;
      out.push_back(table_[idx].name);
      i = end;
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  return out;
}

const AlgorithmToken* TokenMatcher::Find(std::string_view name) const {
  for (const auto& t : table_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::vector<AlgorithmToken> DefaultTokenTable() {
  std::vector<AlgorithmToken> t;
  for (const char* bits : {"128", "192", "256"}) {
    const std::string b = bits;
    t.push_back(T("AES-" + b, "cipher", "AES", b, "", {"AES" + b}));
    for (const char* mode : {"GCM", "CBC", "CCM", "CTR"}) {
      const std::string m = mode;
      t.push_back(T("AES-" + b + "-" + m, "cipher", "AES", b, m, {"AES" + b + "-" + m}));
    }
  }
  t.push_back(T("ChaCha20-Poly1305", "cipher", "ChaCha20", "256", "Poly1305",
                {"CHACHA20-POLY1305", "CHACHA20_POLY1305"}));
  t.push_back(T("3DES", "cipher", "DES", "168", "CBC",
                {"DES-EDE3", "DES-EDE3-CBC", "DES-CBC3", "TripleDES", "3DES_EDE_CBC"}));
  t.push_back(T("DES-56", "cipher", "DES", "56", "CBC", {"DES-CBC"}));
  t.push_back(T("RC4-128", "cipher", "RC4", "128", "", {"RC4", "ARCFOUR"}));
  t.push_back(T("Camellia-128-CBC", "cipher", "Camellia", "128", "CBC", {"CAMELLIA128-CBC"}));
  t.push_back(T("Camellia-256-CBC", "cipher", "Camellia", "256", "CBC", {"CAMELLIA256-CBC"}));

  t.push_back(T("MD5", "hash", "MD5", "128", ""));
  t.push_back(T("SHA-1", "hash", "SHA1", "160", "", {"SHA1"}));
  for (const char* bits : {"224", "256", "384", "512"}) {
    const std::string b = bits;
    t.push_back(T("SHA-" + b, "hash", "SHA2", b, "", {"SHA" + b, "SHA2-" + b}));
  }
  for (const char* bits : {"256", "384", "512"}) {
    const std::string b = bits;
    t.push_back(T("SHA3-" + b, "hash", "SHA3", b, ""));
  }
  t.push_back(T("BLAKE2b-512", "hash", "BLAKE2", "512", "", {"BLAKE2b512"}));
  t.push_back(T("BLAKE2s-256", "hash", "BLAKE2", "256", "", {"BLAKE2s256"}));

  t.push_back(T("HMAC-SHA1", "mac", "HMAC", "160", "", {"HMAC-SHA-1", "HmacSHA1"}));
  for (const char* bits : {"256", "384", "512"}) {
    const std::string b = bits;
    t.push_back(T("HMAC-SHA" + b, "mac", "HMAC", b, "", {"HMAC-SHA-" + b, "HmacSHA" + b}));
  }

  for (const char* bits : {"1024", "2048", "3072", "4096"}) {
    const std::string b = bits;
    t.push_back(T("RSA-" + b, "signature", "RSA", b, "", {"RSA" + b, "rsa:" + b}));
  }
  t.push_back(T("ECC-P256", "signature", "ECC", "P-256", "",
                {"P-256", "prime256v1", "secp256r1", "NIST-P256"}));
  t.push_back(T("ECC-P384", "signature", "ECC", "P-384", "", {"P-384", "secp384r1", "NIST-P384"}));
  t.push_back(T("ECC-P521", "signature", "ECC", "P-521", "", {"P-521", "secp521r1", "NIST-P521"}));
  t.push_back(T("Ed25519", "signature", "EdDSA", "Curve25519", ""));
  t.push_back(T("Ed448", "signature", "EdDSA", "Curve448", ""));

  t.push_back(T("X25519", "key-exchange", "XDH", "Curve25519", ""));
  t.push_back(T("X448", "key-exchange", "XDH", "Curve448", ""));
  for (const char* bits : {"2048", "3072", "4096"}) {
    const std::string b = bits;
    t.push_back(T("DH-" + b, "key-exchange", "DH", b, "", {"ffdhe" + b, "DH" + b}));
  }

  t.push_back(T("PBKDF2-SHA256", "kdf", "PBKDF2", "SHA-256", "", {"PBKDF2-HMAC-SHA256"}));
  t.push_back(T("HKDF-SHA256", "kdf", "HKDF", "SHA-256", ""));
  return t;
}

std::string KeyToken(std::string_view key_algorithm, int key_bits, std::string_view curve) {
  const std::string alg = Lower(key_algorithm);
  if (alg == "rsa" || alg == "rsa-pss") {
    switch (key_bits) {
      case 1024:
      case 2048:
      case 3072:
      case 4096:
        return "RSA-" + std::to_string(key_bits);
      default:
        return "";
    }
  }
  if (alg == "ec") {
    const std::string c = Lower(curve);
    if (c == "prime256v1" || c == "secp256r1" || c == "p-256") return "ECC-P256";
    if (c == "secp384r1" || c == "p-384") return "ECC-P384";
    if (c == "secp521r1" || c == "p-521") return "ECC-P521";
    return "";
  }
  if (alg == "ed25519") return "Ed25519";
  if (alg == "ed448") return "Ed448";
  return "";
}

std::string DigestToken(std::string_view digest) {
  const std::string d = Lower(digest);
  static const std::map<std::string, std::string> kMap = {
      {"md5", "MD5"},          {"sha1", "SHA-1"},       {"sha224", "SHA-224"},
      {"sha256", "SHA-256"},   {"sha384", "SHA-384"},   {"sha512", "SHA-512"},
      {"sha3-256", "SHA3-256"}, {"sha3-384", "SHA3-384"}, {"sha3-512", "SHA3-512"},
  };
  auto it = kMap.find(d);
  return it == kMap.end() ? "" : it->second;
}

}  // namespace twinaudit::evidence
