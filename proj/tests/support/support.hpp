#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "twinaudit/ams/service.hpp"
#include "twinaudit/harness/fixture.hpp"
#include "twinaudit/sdt/manager.hpp"

namespace twinaudit::testing {

// Directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

void WriteFile(const std::filesystem::path& path, const std::string& bytes);
std::string ReadFile(const std::filesystem::path& path);

// Small deterministic generator for property suites.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  std::uint64_t Next() { return rng_(); }
  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool Bool(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::string Ident(int min_len = 3, int max_len = 10);
  std::string VersionString();
  template <typename T>
  const T& Pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(Int(0, static_cast<int>(v.size()) - 1))];
  }
  template <typename T>
  void Shuffle(std::vector<T>& v) {
    std::shuffle(v.begin(), v.end(), rng_);
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// An AMS over a memory store and an embedded manager, with a generated fixture
// already ingested.
struct AmsRig {
  std::unique_ptr<TempDir> dir;
  harness::FixtureLayout layout;
  std::shared_ptr<sdt::SdtManager> manager;
  std::shared_ptr<ams::MemoryDocumentStore> store;
  std::shared_ptr<ams::AuditManagementService> ams;
  sdt::InProcessRuntime* runtime = nullptr;

  static AmsRig Make(harness::FixtureName name, std::uint64_t seed = 7,
                     ams::AmsOptions options = {});
};

}  // namespace twinaudit::testing
