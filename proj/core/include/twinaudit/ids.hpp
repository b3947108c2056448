#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace twinaudit {

// Lowercase hex of `bytes` bytes from the OpenSSL CSPRNG.
std::string RandomHex(std::size_t bytes);

// RFC 4122 version-4 UUID, lowercase, without the urn prefix.
std::string MakeUuid();

// "urn:uuid:" + MakeUuid().
std::string MakeUrnUuid();

// 8-4-4-4-12 hex groups; any version nibble accepted, variant must be RFC 4122.
bool IsUuid(std::string_view text);
bool IsUrnUuid(std::string_view text);

// Wall-clock instant as ISO-8601 UTC with millisecond precision,
// e.g. 2025-06-04T10:11:12.345Z.
std::string NowIso8601();
std::string FormatIso8601(std::int64_t unix_millis);
std::int64_t NowUnixMillis();

// Nanoseconds on the process-wide monotonic clock.
std::int64_t MonotonicNanos();

}  // namespace twinaudit
