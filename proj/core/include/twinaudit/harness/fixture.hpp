#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twinaudit/forge/forge.hpp"

namespace twinaudit::harness {

enum class FixtureName { kMinimal, kSmb };

std::string_view ToString(FixtureName name);
std::optional<FixtureName> ParseFixtureName(std::string_view text);

struct HostGroupTarget {
  std::string group;  // report row label
  std::vector<std::string> hosts;
  forge::ArtifactCounts counts;
};

struct FixtureSpec {
  FixtureName name = FixtureName::kMinimal;
  std::uint64_t seed = 1;
  std::vector<HostGroupTarget> targets;

  static FixtureSpec Minimal(std::uint64_t seed = 1);
  // Targets are the per-row totals of the SMB topology audit table.
  static FixtureSpec Smb(std::uint64_t seed = 1);
  static FixtureSpec For(FixtureName name, std::uint64_t seed = 1);
};

struct FixtureLayout {
  std::filesystem::path root;
  std::filesystem::path inventory;
  std::filesystem::path profile;
  std::filesystem::path feed;
  std::string profile_id;
  std::vector<std::string> hosts;
};

// Relative path -> file bytes, fully determined by the FixtureSpec.
std::map<std::string, std::string> RenderFixture(const FixtureSpec& spec);

// Writes RenderFixture output under `out_dir` (created when missing).
// Throws IoError when the directory is not writable.
FixtureLayout GenerateFixture(const FixtureSpec& spec, const std::filesystem::path& out_dir);

// Replaces the SMB mail server certificate with one of the same subject and
// algorithms but a new serial and validity period.
void ApplyCertificateSwap(const std::filesystem::path& fixture_root);

inline constexpr std::string_view kSwappedCertificatePath = "etc/ssl/certs/mail.example.test.pem";

// Report row label for a host role, and the row order of known labels.
std::string GroupForRole(const std::string& role);
const std::vector<std::string>& GroupOrder();

}  // namespace twinaudit::harness
