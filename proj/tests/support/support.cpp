#include "support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "twinaudit/ids.hpp"

namespace twinaudit::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  path_ = fs::temp_directory_path() / ("twinaudit-" + tag + "-" + RandomHex(6));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void WriteFile(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << bytes;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string Gen::Ident(int min_len, int max_len) {
  static constexpr char kAlpha[] = "abcdefghijklmnopqrstuvwxyz";
  const int n = Int(min_len, max_len);
  std::string out;
  for (int i = 0; i < n; ++i) out.push_back(kAlpha[Int(0, 25)]);
  return out;
}

std::string Gen::VersionString() {
  return std::to_string(Int(0, 12)) + "." + std::to_string(Int(0, 30)) + "." +
         std::to_string(Int(0, 40));
}

AmsRig AmsRig::Make(harness::FixtureName name, std::uint64_t seed, ams::AmsOptions options) {
  AmsRig rig;
  rig.dir = std::make_unique<TempDir>("rig");
  rig.layout = harness::GenerateFixture(harness::FixtureSpec::For(name, seed), rig.dir->path());
  auto runtime = std::make_shared<sdt::InProcessRuntime>();
  rig.runtime = runtime.get();
  rig.manager = std::make_shared<sdt::SdtManager>(
      std::vector<std::shared_ptr<sdt::RuntimeAdapter>>{runtime});
  rig.store = std::make_shared<ams::MemoryDocumentStore>();
  auto feed = std::make_shared<const vuln::VulnStore>(vuln::VulnStore::FromFeedFile(rig.layout.feed));
  rig.ams = std::make_shared<ams::AuditManagementService>(
      rig.store, std::make_shared<sdt::LocalSdtManagerClient>(*rig.manager), feed, options);
  rig.ams->IngestInventoryFile(rig.layout.inventory);
  rig.ams->CreateProfile(ams::ParseProfile(ReadFile(rig.layout.profile)));
  return rig;
}

}  // namespace twinaudit::testing
