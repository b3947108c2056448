#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "twinaudit/ams/service.hpp"
#include "twinaudit/ams/store.hpp"
#include "twinaudit/ams/topology.hpp"
#include "twinaudit/errors.hpp"
#include "twinaudit/harness/bench.hpp"
#include "twinaudit/harness/fixture.hpp"
#include "twinaudit/harness/report.hpp"
#include "twinaudit/ids.hpp"
#include "twinaudit/sdt/manager.hpp"

namespace twinaudit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

void OnSignal(int) { g_stop = true; }

std::string ReadText(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Config {
  fs::path store = ".twinaudit";
  std::string manager_url;
  fs::path feed;
  json sdt_options = json::object();
  int timeout_seconds = 30;
};

// Config file keys: store, manager_url, feed, sdt_options, timeout_seconds.
// TWINAUDIT_STORE, TWINAUDIT_MANAGER_URL and TWINAUDIT_FEED override them.
Config LoadConfig(const std::string& path) {
  Config c;
  std::string file = path;
  if (file.empty()) {
    if (const char* env = std::getenv("TWINAUDIT_CONFIG")) file = env;
  }
  if (!file.empty()) {
    const json doc = ams::YamlToJson(ReadText(file));
    if (!doc.is_null() && !doc.is_object()) throw InvalidArgumentError("config must be a mapping");
    const fs::path base = fs::absolute(file).parent_path();
    auto resolve = [&](const std::string& p) {
      fs::path v(p);
      return v.is_relative() ? base / v : v;
    };
    if (doc.is_object()) {
      if (doc.contains("store")) c.store = resolve(doc["store"].get<std::string>());
      if (doc.contains("feed")) c.feed = resolve(doc["feed"].get<std::string>());
      c.manager_url = doc.value("manager_url", c.manager_url);
      c.timeout_seconds = doc.value("timeout_seconds", c.timeout_seconds);
      if (doc.contains("sdt_options")) c.sdt_options = doc["sdt_options"];
    }
  }
  if (const char* env = std::getenv("TWINAUDIT_STORE")) c.store = env;
  if (const char* env = std::getenv("TWINAUDIT_MANAGER_URL")) c.manager_url = env;
  if (const char* env = std::getenv("TWINAUDIT_FEED")) c.feed = env;
  return c;
}

class Context {
 public:
  // `config_path` is read lazily, after argument parsing filled it in.
  Context(const std::string& config_path, std::ostream& err) : config_path_(config_path), err_(err) {}

  const Config& config() {
    if (!config_) config_ = LoadConfig(config_path_);
    return *config_;
  }

  bool embedded() { return config().manager_url.empty(); }

  std::shared_ptr<sdt::SdtManagerClient> manager() {
    if (client_) return client_;
    if (embedded()) {
      err_ << "warning: no manager_url configured; using an embedded manager whose instances end "
              "with this process\n";
      embedded_ = std::make_unique<sdt::SdtManager>();
      client_ = std::make_shared<sdt::LocalSdtManagerClient>(*embedded_);
    } else {
      client_ = std::make_shared<sdt::HttpSdtManagerClient>(config().manager_url,
                                                            config().timeout_seconds);
    }
    return client_;
  }

  ams::AuditManagementService& ams() {
    if (ams_) return *ams_;
    std::shared_ptr<const vuln::VulnStore> feed;
    if (config().feed.empty()) {
      err_ << "warning: no vulnerability feed configured; SBOMs carry no VEX entries\n";
      feed = std::make_shared<const vuln::VulnStore>();
    } else {
      vuln::IngestReport report;
      feed = std::make_shared<const vuln::VulnStore>(
          vuln::VulnStore::FromFeedFile(config().feed, &report));
      if (report.rejects > 0) {
        err_ << "warning: feed " << config().feed.string() << ": " << report.rejects
             << " malformed line(s) skipped\n";
      }
    }
    auto store = std::make_shared<ams::FileDocumentStore>(config().store);
    ams::AmsOptions options;
    options.sdt_options = config().sdt_options;
    ams_ = std::make_unique<ams::AuditManagementService>(store, manager(), feed, options);
    return *ams_;
  }

 private:
  const std::string& config_path_;
  std::ostream& err_;
  std::optional<Config> config_;
  std::unique_ptr<sdt::SdtManager> embedded_;
  std::shared_ptr<sdt::SdtManagerClient> client_;
  std::unique_ptr<ams::AuditManagementService> ams_;
};

std::vector<std::string> SplitCsv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void PrintRun(const ams::AuditRun& run, std::ostream& out) {
  out << "run_id: " << run.run_id << "\n";
  out << "profile_id: " << run.profile_id << "\n";
  out << "state: " << ams::ToString(run.state) << "\n";
  if (run.sdt_id) {
    out << "sdt_id: " << *run.sdt_id << "\n";
    out << "sdt_version: " << run.sdt_version << "\n";
  }
  for (const auto& [host, message] : run.host_errors) {
    out << "host_error: " << host << ": " << message << "\n";
  }
  if (run.error_cause) out << "error: " << *run.error_cause << ": " << run.error_message << "\n";
}

std::map<std::string, std::string> HostRoles(const ams::TopologyGraph& topology) {
  std::map<std::string, std::string> roles;
  for (const auto& h : topology.hosts) roles[h.host_id] = h.role;
  return roles;
}

struct BenchArgs {
  std::string fixture = "minimal";
  std::size_t iterations = 50;
  std::uint64_t seed = 1;
  std::string out;
  std::string manager;
  std::string work_dir;
  bool include_collection = false;
  bool keep = false;
};

int BenchDeploy(Context& ctx, const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const auto name = harness::ParseFixtureName(a.fixture);
  if (!name) throw InvalidArgumentError("unknown fixture '" + a.fixture + "' (minimal|smb)");
  const bool temp_dir = a.work_dir.empty();
  const fs::path work = temp_dir ? fs::temp_directory_path() / ("twinaudit-bench-" + RandomHex(6))
                                 : fs::path(a.work_dir);
  struct Cleanup {
    fs::path dir;
    bool active;
    ~Cleanup() {
      std::error_code ec;
      if (active) fs::remove_all(dir, ec);
    }
  } cleanup{work, temp_dir && !a.keep};

  const auto layout = harness::GenerateFixture(harness::FixtureSpec::For(*name, a.seed), work);

  // Without a manager URL the bench serves its own manager on loopback so
  // every create still goes through the HTTP API.
  std::string url = a.manager.empty() ? ctx.config().manager_url : a.manager;
  std::unique_ptr<sdt::SdtManager> local;
  std::unique_ptr<sdt::SdtManagerServer> server;
  if (url.empty()) {
    local = std::make_unique<sdt::SdtManager>();
    server = std::make_unique<sdt::SdtManagerServer>(*local);
    server->Start("127.0.0.1", 0);
    url = server->base_url();
  }
  auto client = std::make_shared<sdt::HttpSdtManagerClient>(url, ctx.config().timeout_seconds);

  auto feed = std::make_shared<const vuln::VulnStore>(vuln::VulnStore::FromFeedFile(layout.feed));
  ams::AuditManagementService service(std::make_shared<ams::MemoryDocumentStore>(), client, feed);
  service.IngestInventoryFile(layout.inventory);
  service.CreateProfile(ams::ParseProfile(ReadText(layout.profile)));
  const auto prepared = service.RunAudit(layout.profile_id);
  if (prepared.state != ams::RunState::kSdtReady) {
    err << "error: preparing the create payload failed: "
        << prepared.error_cause.value_or("unknown") << ": " << prepared.error_message << "\n";
    return 1;
  }
  const json body = service.CreateRequestBody(prepared.run_id);
  client->Destroy(*prepared.sdt_id);

  harness::DeployBenchHooks hooks = harness::ClientHooks(*client, body);
  if (a.include_collection) {
    hooks.create = [&] {
      const auto run = service.RunAudit(layout.profile_id);
      if (run.state != ams::RunState::kSdtReady) {
        throw Error(run.error_cause.value_or("failed"), run.error_message);
      }
      return *run.sdt_id;
    };
  }
  harness::DeployBenchOptions options;
  options.iterations = a.iterations;
  harness::BenchResult result;
  try {
    result = harness::RunDeployBench(hooks, options);
  } catch (const harness::BenchAborted& e) {
    err << "error: bench aborted: " << e.what() << "\n";
    return 1;
  }
  result.fixture = std::string(harness::ToString(*name));
  result.payload_bytes = body.dump().size();
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  const auto paths = harness::WriteBenchOutputs(result, a.out);

  out << std::setprecision(6) << std::fixed;
  out << "fixture: " << result.fixture << "\n";
  out << "mode: " << (a.include_collection ? "collection+deploy" : "deploy (pre-built payload)") << "\n";
  out << "iterations: " << result.iterations.size() << "\n";
  out << "failed: " << result.failed.size() << "\n";
  out << "mean_seconds: " << result.summary.mean << "\n";
  out << "median_seconds: " << result.summary.median << "\n";
  out << "min_seconds: " << result.summary.min << "\n";
  out << "max_seconds: " << result.summary.max << "\n";
  out << "coefficient_of_variation: " << result.summary.coefficient_of_variation << "\n";
  out << "payload_bytes: " << result.payload_bytes << "\n";
  out << "footprint_bytes: " << result.footprint_bytes << "\n";
  for (const auto& p : paths) out << "wrote: " << p.string() << "\n";
  return 0;
}

int Serve(const std::string& host, int port, const std::string& port_file, std::ostream& out) {
  sdt::SdtManager manager;
  sdt::SdtManagerServer server(manager);
  server.Start(host, port);
  if (!port_file.empty()) {
    std::ofstream f(port_file, std::ios::trunc);
    f << server.port() << "\n";
  }
  out << "listening: " << server.base_url() << std::endl;
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.Stop();
  out << "stopped" << std::endl;
  return 0;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"twinaudit: compliance-audit digital twins for device fleets", "twinaudit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Config file (YAML or JSON)");

  Context ctx(config_path, err);
  std::function<int()> action;

  // fixture
  auto* fixture = app.add_subcommand("fixture", "Generate fixture topologies")->require_subcommand(1);
  std::string spec = "smb", fixture_out;
  std::uint64_t seed = 1;
  auto* gen = fixture->add_subcommand("generate", "Write snapshots, inventory, profile and feed");
  gen->add_option("--spec", spec, "minimal | smb")->capture_default_str();
  gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", fixture_out, "Output directory")->required();
  gen->callback([&] {
    action = [&] {
      const auto name = harness::ParseFixtureName(spec);
      if (!name) throw InvalidArgumentError("unknown fixture spec '" + spec + "' (minimal|smb)");
      const auto layout = harness::GenerateFixture(harness::FixtureSpec::For(*name, seed), fixture_out);
      out << "root: " << layout.root.string() << "\n";
      out << "inventory: " << layout.inventory.string() << "\n";
      out << "profile: " << layout.profile.string() << "\n";
      out << "feed: " << layout.feed.string() << "\n";
      out << "profile_id: " << layout.profile_id << "\n";
      out << "hosts: " << layout.hosts.size() << "\n";
      return 0;
    };
  });

  // inventory
  auto* inventory = app.add_subcommand("inventory", "Topology inventory")->require_subcommand(1);
  std::string inventory_file;
  auto* ingest = inventory->add_subcommand("ingest", "Upsert hosts and relationships from a file");
  ingest->add_option("file", inventory_file, "Inventory YAML/JSON")->required();
  ingest->callback([&] {
    action = [&] {
      const auto topology = ctx.ams().IngestInventoryFile(inventory_file);
      out << "hosts: " << topology.hosts.size() << "\n";
      out << "relationships: " << topology.relationships.size() << "\n";
      return 0;
    };
  });
  inventory->add_subcommand("show", "Print the stored topology")->callback([&] {
    action = [&] {
      out << ctx.ams().Topology().ToJson().dump(2) << "\n";
      return 0;
    };
  });

  // profile
  auto* profile = app.add_subcommand("profile", "Audit profiles")->require_subcommand(1);
  std::string profile_file;
  auto* pcreate = profile->add_subcommand("create", "Create an audit profile");
  pcreate->add_option("-f,--file", profile_file, "Profile YAML/JSON")->required();
  pcreate->callback([&] {
    action = [&] {
      const auto p = ctx.ams().CreateProfile(ams::ParseProfile(ReadText(profile_file)));
      out << "profile_id: " << p.profile_id << "\n";
      for (const auto& hp : ctx.ams().HostProfiles(p.profile_id)) out << "host: " << hp.host_id << "\n";
      return 0;
    };
  });
  profile->add_subcommand("list", "List profiles")->callback([&] {
    action = [&] {
      for (const auto& p : ctx.ams().ListProfiles()) out << p.profile_id << "\t" << p.name << "\n";
      return 0;
    };
  });

  // audit
  auto* audit = app.add_subcommand("audit", "Audit runs")->require_subcommand(1);
  std::string audit_target, hosts_csv;
  std::size_t top_n = 10;
  bool report_json = false;
  auto* arun = audit->add_subcommand("run", "Collect, forge and deploy an SDT for a profile");
  arun->add_option("profile", audit_target, "Profile id")->required();
  arun->callback([&] {
    action = [&] {
      const auto run = ctx.ams().RunAudit(audit_target);
      PrintRun(run, out);
      return run.state == ams::RunState::kSdtReady ? 0 : 1;
    };
  });
  auto* acreate = audit->add_subcommand("create", "Create a run without executing it");
  acreate->add_option("profile", audit_target, "Profile id")->required();
  acreate->callback([&] {
    action = [&] {
      PrintRun(ctx.ams().CreateRun(audit_target), out);
      return 0;
    };
  });
  auto* astatus = audit->add_subcommand("status", "Show the state of a run");
  astatus->add_option("run", audit_target, "Run id")->required();
  astatus->callback([&] {
    action = [&] {
      const auto run = ctx.ams().GetRun(audit_target);
      PrintRun(run, out);
      for (const auto& t : run.transitions) {
        out << "transition: " << ams::ToString(t.state) << " " << FormatIso8601(t.at_millis) << "\n";
      }
      return run.state == ams::RunState::kFailed ? 1 : 0;
    };
  });
  auto* areport = audit->add_subcommand("report", "Render counts, vulnerabilities and certificates");
  areport->add_option("run", audit_target, "Run id")->required();
  areport->add_option("--top", top_n, "Number of vulnerabilities listed")->capture_default_str();
  areport->add_flag("--json", report_json, "Print counts as JSON");
  areport->callback([&] {
    action = [&] {
      auto& service = ctx.ams();
      const auto run = service.GetRun(audit_target);
      const auto report = harness::BuildRunReport(run, service.RunDocuments(audit_target),
                                                  HostRoles(service.Topology()), NowUnixMillis(), top_n);
      if (report_json) {
        json groups = json::array();
        for (const auto& g : report.groups) {
          groups.push_back({{"group", g.group},
                            {"hosts", g.hosts},
                            {"algorithms", g.counts.algorithms},
                            {"vulnerabilities", g.counts.vulnerabilities},
                            {"components", g.counts.components},
                            {"certificates", g.counts.certificates}});
        }
        out << json{{"runId", report.run_id}, {"state", report.state}, {"groups", groups}}.dump(2)
            << "\n";
      } else {
        out << harness::RenderMarkdown(report);
      }
      return 0;
    };
  });
  auto* aupdate = audit->add_subcommand("update", "Rescan hosts and push deltas to the SDT");
  aupdate->add_option("run", audit_target, "Run id")->required();
  aupdate->add_option("--hosts", hosts_csv, "Comma-separated host ids")->required();
  aupdate->callback([&] {
    action = [&] {
      const auto run = ctx.ams().UpdateAudit(audit_target, SplitCsv(hosts_csv));
      PrintRun(run, out);
      return run.state == ams::RunState::kSdtReady ? 0 : 1;
    };
  });
  audit->add_subcommand("list", "List runs")->callback([&] {
    action = [&] {
      for (const auto& r : ctx.ams().ListRuns()) {
        out << r.run_id << "\t" << r.profile_id << "\t" << ams::ToString(r.state) << "\n";
      }
      return 0;
    };
  });

  // sdt
  auto* sdt_cmd = app.add_subcommand("sdt", "SDT instances on the manager")->require_subcommand(1);
  std::string sdt_id;
  sdt_cmd->add_subcommand("list", "List SDT descriptors")->callback([&] {
    action = [&] {
      out << ctx.manager()->List().dump(2) << "\n";
      return 0;
    };
  });
  auto* sget = sdt_cmd->add_subcommand("get", "Show one descriptor");
  sget->add_option("id", sdt_id, "SDT id")->required();
  sget->callback([&] {
    action = [&] {
      out << ctx.manager()->Get(sdt_id).dump(2) << "\n";
      return 0;
    };
  });
  auto* sdestroy = sdt_cmd->add_subcommand("destroy", "Tear down an instance");
  sdestroy->add_option("id", sdt_id, "SDT id")->required();
  sdestroy->callback([&] {
    action = [&] {
      ctx.manager()->Destroy(sdt_id);
      out << "destroyed: " << sdt_id << "\n";
      return 0;
    };
  });
  auto* sfoot = sdt_cmd->add_subcommand("footprint", "Serialized representation size");
  sfoot->add_option("id", sdt_id, "SDT id")->required();
  sfoot->callback([&] {
    action = [&] {
      const json f = ctx.manager()->Footprint(sdt_id);
      out << "sdt_id: " << sdt_id << "\n";
      out << "footprint_bytes: " << f.at("footprintBytes").get<std::size_t>() << "\n";
      out << "representation_version: " << f.value("representationVersion", 0) << "\n";
      return 0;
    };
  });

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmarks")->require_subcommand(1);
  BenchArgs bench_args;
  auto* deploy = bench->add_subcommand("deploy", "Timed SDT create/destroy cycles");
  deploy->add_option("--fixture", bench_args.fixture, "minimal | smb")->capture_default_str();
  deploy->add_option("--iterations", bench_args.iterations, "Timed iterations")->capture_default_str();
  deploy->add_option("--seed", bench_args.seed, "Fixture seed")->capture_default_str();
  deploy->add_option("--out", bench_args.out, "Per-iteration CSV")->required();
  deploy->add_option("--manager", bench_args.manager, "Manager base URL (default: local server)");
  deploy->add_option("--work-dir", bench_args.work_dir, "Fixture directory (default: temporary)");
  deploy->add_flag("--include-collection", bench_args.include_collection,
                   "Time evidence collection and forging as well");
  deploy->add_flag("--keep", bench_args.keep, "Keep the temporary fixture directory");
  deploy->callback([&] { action = [&] { return BenchDeploy(ctx, bench_args, out, err); }; });

  // serve
  std::string serve_host = "127.0.0.1", port_file;
  int serve_port = 8700;
  auto* serve = app.add_subcommand("serve", "Run the SDT manager HTTP service");
  serve->add_option("--host", serve_host, "Bind address")->capture_default_str();
  serve->add_option("--port", serve_port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--port-file", port_file, "Write the bound port here");
  serve->callback([&] { action = [&] { return Serve(serve_host, serve_port, port_file, out); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  if (!action) return 2;
  try {
    return action();
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace twinaudit::cli
