#include <benchmark/benchmark.h>

#include <filesystem>
#include <memory>

#include "twinaudit/bom/codec.hpp"
#include "twinaudit/bom/diff.hpp"
#include "twinaudit/evidence/collector.hpp"
#include "twinaudit/forge/forge.hpp"
#include "twinaudit/forge/graph.hpp"
#include "twinaudit/harness/fixture.hpp"
#include "twinaudit/ids.hpp"
#include "twinaudit/sdt/manager.hpp"
#include "twinaudit/vuln/store.hpp"
#include "twinaudit/vuln/version.hpp"

namespace fs = std::filesystem;
using namespace twinaudit;

namespace {

// One SMB fixture on disk, scanned once, shared by every benchmark.
struct Smb {
  fs::path root;
  harness::FixtureLayout layout;
  std::unique_ptr<vuln::VulnStore> feed;
  evidence::HostSnapshot web = evidence::HostSnapshot::FromFiles("x", {});
  std::vector<evidence::EvidenceRecord> records;
  bom::Bom sbom;
  bom::Bom cbom;

  Smb() {
    root = fs::temp_directory_path() / ("twinaudit-bench-" + RandomHex(6));
    layout = harness::GenerateFixture(harness::FixtureSpec::For(harness::FixtureName::kSmb), root);
    feed = std::make_unique<vuln::VulnStore>(vuln::VulnStore::FromFeedFile(layout.feed));
    web = evidence::HostSnapshot::Open(root / "hosts" / "web-server", "web-server");
    records = evidence::ScanHost(web, evidence::CollectorConfig::Default()).records;
    forge::CryptoHierarchyGraph graph;
    for (const auto& r : records) graph.Insert(r);
    sbom = forge::EnrichWithVulnerabilities(forge::BuildSbom("web-server", records), *feed);
    cbom = forge::BuildCbom("web-server", graph, records);
  }
  ~Smb() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
};

Smb& Fixture() {
  static Smb smb;
  return smb;
}

void BM_CompareVersions(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(vuln::CompareVersions("1.10.2-rc1", "1.10.2"));
  }
}
BENCHMARK(BM_CompareVersions);

void BM_FeedIngest(benchmark::State& state) {
  const auto& f = Fixture();
  for (auto _ : state) benchmark::DoNotOptimize(vuln::VulnStore::FromFeedFile(f.layout.feed));
}
BENCHMARK(BM_FeedIngest);

void BM_VulnLookup(benchmark::State& state) {
  const auto& f = Fixture();
  for (auto _ : state) {
    for (const auto& c : f.sbom.components) benchmark::DoNotOptimize(f.feed->Lookup(c.name, c.version));
  }
}
BENCHMARK(BM_VulnLookup);

void BM_ScanHost(benchmark::State& state) {
  const auto& f = Fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(evidence::ScanHost(f.web, evidence::CollectorConfig::Default()));
  }
}
BENCHMARK(BM_ScanHost);

void BM_BuildGraph(benchmark::State& state) {
  const auto& f = Fixture();
  for (auto _ : state) {
    forge::CryptoHierarchyGraph graph;
    for (const auto& r : f.records) graph.Insert(r);
    benchmark::DoNotOptimize(graph.IsAcyclic());
  }
}
BENCHMARK(BM_BuildGraph);

void BM_BuildSbom(benchmark::State& state) {
  const auto& f = Fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(forge::EnrichWithVulnerabilities(forge::BuildSbom("web-server", f.records), *f.feed));
  }
}
BENCHMARK(BM_BuildSbom);

void BM_SerializeParse(benchmark::State& state) {
  const auto& f = Fixture();
  for (auto _ : state) benchmark::DoNotOptimize(bom::ParseBom(bom::SerializeBom(f.sbom)));
}
BENCHMARK(BM_SerializeParse);

void BM_DiffApply(benchmark::State& state) {
  const auto& f = Fixture();
  bom::Bom next = f.cbom;
  next.version += 1;
  if (!next.components.empty()) next.components.pop_back();
  for (auto _ : state) benchmark::DoNotOptimize(bom::ApplyDelta(f.cbom, bom::DiffBoms(f.cbom, next)));
}
BENCHMARK(BM_DiffApply);

void BM_SdtCreateDestroy(benchmark::State& state) {
  const auto& f = Fixture();
  sdt::SdtManager manager;
  sdt::CreateRequest req;
  req.profile_id = "bench";
  req.boms = {f.sbom, f.cbom};
  const std::string body = req.ToJson().dump();
  for (auto _ : state) {
    const auto r = manager.HandleCreate(body);
    if (r.status != 201) state.SkipWithError("create failed");
    manager.HandleDestroy(r.body.at("sdtId"));
  }
}
BENCHMARK(BM_SdtCreateDestroy);

}  // namespace

BENCHMARK_MAIN();
