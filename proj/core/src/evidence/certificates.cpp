#include <openssl/bio.h>
#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/objects.h>
#include <openssl/pem.h>
#include <openssl/x509.h>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <memory>

#include "twinaudit/evidence/collector.hpp"

namespace twinaudit::evidence {

namespace {

struct X509Deleter {
  void operator()(X509* x) const { X509_free(x); }
};
struct BioDeleter {
  void operator()(BIO* b) const { BIO_free(b); }
};
using X509Ptr = std::unique_ptr<X509, X509Deleter>;
using BioPtr = std::unique_ptr<BIO, BioDeleter>;

std::string NameToString(const X509_NAME* name) {
  BioPtr bio(BIO_new(BIO_s_mem()));
  X509_NAME_print_ex(bio.get(), name, 0, XN_FLAG_RFC2253);
  char* data = nullptr;
  const long len = BIO_get_mem_data(bio.get(), &data);
  return std::string(data, static_cast<std::size_t>(len));
}

std::string CommonName(const X509_NAME* name) {
  const int idx = X509_NAME_get_index_by_NID(name, NID_commonName, -1);
  if (idx < 0) return "";
  const ASN1_STRING* s = X509_NAME_ENTRY_get_data(X509_NAME_get_entry(name, idx));
  unsigned char* utf8 = nullptr;
  const int len = ASN1_STRING_to_UTF8(&utf8, s);
  if (len < 0) return "";
  std::string out(reinterpret_cast<char*>(utf8), static_cast<std::size_t>(len));
  OPENSSL_free(utf8);
  return out;
}

std::string TimeToIso(const ASN1_TIME* t) {
  std::tm tm{};
  if (ASN1_TIME_to_tm(t, &tm) != 1) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

std::string KeyAlgorithmName(int base_id) {
  switch (base_id) {
    case EVP_PKEY_RSA:
      return "RSA";
    case EVP_PKEY_RSA_PSS:
      return "RSA-PSS";
    case EVP_PKEY_EC:
      return "EC";
    case EVP_PKEY_ED25519:
      return "ED25519";
    case EVP_PKEY_ED448:
      return "ED448";
    case EVP_PKEY_DSA:
      return "DSA";
    default:
      return "UNKNOWN";
  }
}

EvidenceRecord Describe(const HostSnapshot& snapshot, const std::string& path, X509* x,
                        const char* format) {
  EvidenceRecord r;
  r.host_id = snapshot.host_id();
  r.category = Category::kCertificate;
  r.source_path = path;
  r.occurrences = {path};
  auto& a = r.attributes;
  const X509_NAME* subject = X509_get_subject_name(x);
  a["subject"] = NameToString(subject);
  a["issuer"] = NameToString(X509_get_issuer_name(x));
  a["not_before"] = TimeToIso(X509_get0_notBefore(x));
  a["not_after"] = TimeToIso(X509_get0_notAfter(x));
  a["format"] = format;
  r.name = CommonName(subject);
  if (r.name.empty()) r.name = a["subject"];

  if (BIGNUM* bn = ASN1_INTEGER_to_BN(X509_get0_serialNumber(x), nullptr)) {
    char* hex = BN_bn2hex(bn);
    a["serial"] = hex;
    OPENSSL_free(hex);
    BN_free(bn);
  }

  const int sig_nid = X509_get_signature_nid(x);
  a["signature_algorithm"] = OBJ_nid2ln(sig_nid);
  int md_nid = NID_undef;
  int pk_nid = NID_undef;
  if (OBJ_find_sigid_algs(sig_nid, &md_nid, &pk_nid) == 1 && md_nid != NID_undef) {
    const std::string digest = DigestToken(OBJ_nid2sn(md_nid));
    if (!digest.empty()) a[std::string(attr::kSignatureDigest)] = digest;
  }

  if (EVP_PKEY* key = X509_get0_pubkey(x)) {
    const std::string alg = KeyAlgorithmName(EVP_PKEY_get_base_id(key));
    const int bits = EVP_PKEY_get_bits(key);
    a["key_algorithm"] = alg;
    a["key_size"] = std::to_string(bits);
    std::string curve;
    if (alg == "EC") {
      char group[64] = {};
      std::size_t glen = 0;
      if (EVP_PKEY_get_utf8_string_param(key, OSSL_PKEY_PARAM_GROUP_NAME, group, sizeof group,
                                         &glen) == 1) {
        curve.assign(group, glen);
        a["curve"] = curve;
      }
    }
    const std::string token = KeyToken(alg, bits, curve);
    if (!token.empty()) a[std::string(attr::kKeyToken)] = token;
  }

  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int md_len = 0;
  if (X509_digest(x, EVP_sha256(), md, &md_len) == 1) {
    std::string fp;
    char byte[3];
    for (unsigned i = 0; i < md_len; ++i) {
      std::snprintf(byte, sizeof byte, "%02x", md[i]);
      fp += byte;
    }
    a["fingerprint_sha256"] = fp;
  }

  for (auto key : {attr::kKeyToken, attr::kSignatureDigest}) {
    if (auto t = r.attribute(key)) r.relationships.push_back({std::string(kUses), *t, std::nullopt});
  }
  std::sort(r.relationships.begin(), r.relationships.end());
  r.relationships.erase(std::unique(r.relationships.begin(), r.relationships.end()),
                        r.relationships.end());
  return r;
}

EvidenceRecord ParseErrorRecord(const HostSnapshot& snapshot, const std::string& path,
                                const std::string& message) {
  EvidenceRecord r;
  r.host_id = snapshot.host_id();
  r.category = Category::kCertificate;
  const auto slash = path.rfind('/');
  r.name = slash == std::string::npos ? path : path.substr(slash + 1);
  r.source_path = path;
  r.occurrences = {path};
  r.attributes[std::string(attr::kParseError)] = message;
  return r;
}

std::size_t CountOccurrences(const std::string& haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

std::vector<EvidenceRecord> ParseCertificates(const HostSnapshot& snapshot,
                                              std::vector<ScanWarning>* warnings) {
  std::vector<EvidenceRecord> out;
  for (const auto& path : snapshot.files()) {
    if (!detail::IsCertificatePath(path)) continue;
    auto bytes = snapshot.Read(path);
    if (!bytes) {
      if (warnings) warnings->push_back({path, "unreadable file skipped"});
      continue;
    }
    const std::size_t pem_blocks = CountOccurrences(*bytes, "-----BEGIN CERTIFICATE-----");
    if (pem_blocks > 0) {
      BioPtr bio(BIO_new_mem_buf(bytes->data(), static_cast<int>(bytes->size())));
      std::size_t parsed = 0;
      while (parsed < pem_blocks) {
        X509Ptr x(PEM_read_bio_X509(bio.get(), nullptr, nullptr, nullptr));
        if (!x) break;
        out.push_back(Describe(snapshot, path, x.get(), "PEM"));
        ++parsed;
      }
      if (parsed < pem_blocks) {
        out.push_back(ParseErrorRecord(snapshot, path,
                                       "undecodable PEM certificate block " +
                                           std::to_string(parsed + 1) + " of " +
                                           std::to_string(pem_blocks)));
      }
      continue;
    }
    if (bytes->find("-----BEGIN") != std::string::npos) continue;  // keys, CSRs
    if (bytes->empty()) continue;
    const auto* p = reinterpret_cast<const unsigned char*>(bytes->data());
    X509Ptr x(d2i_X509(nullptr, &p, static_cast<long>(bytes->size())));
    if (x) {
      out.push_back(Describe(snapshot, path, x.get(), "DER"));
    } else if (!detail::IsText(*bytes)) {
      out.push_back(ParseErrorRecord(snapshot, path, "undecodable DER certificate"));
    }
  }
  std::sort(out.begin(), out.end(), RecordLess);
  return out;
}

}  // namespace twinaudit::evidence
