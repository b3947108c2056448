#pragma once

// Self-signed fixture certificates generated once with the openssl CLI.
namespace twinaudit::harness::certs {

extern const char* const kWebServerCertPem;              // ECC P-256, ecdsa-with-SHA256
extern const char* const kMailServerCertPem;             // RSA-2048, sha256WithRSAEncryption
extern const char* const kMailServerReplacementCertPem;  // same subject and algorithms, new serial
extern const char* const kUser1CertDerHex;               // RSA-2048, SHA-256, DER
extern const char* const kUser2CertPem;                  // ECC P-384, ecdsa-with-SHA384
extern const char* const kUser3CertPem;                  // RSA-4096, sha224WithRSAEncryption
extern const char* const kSingleServerCertPem;           // RSA-2048, SHA-256

}  // namespace twinaudit::harness::certs
