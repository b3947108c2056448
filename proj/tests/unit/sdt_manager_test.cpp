#include <gtest/gtest.h>

#include <chrono>

#include "sdt_gen.hpp"
#include "twinaudit/bom/diff.hpp"
#include "twinaudit/errors.hpp"
#include "twinaudit/sdt/manager.hpp"

namespace twinaudit {
namespace {

using sdt::SdtState;
using testing::Gen;

struct ModelSdt {
  SdtState state = SdtState::kReady;
  std::uint64_t version = 1;
  bool live = true;  // serving on the runtime
  bool crashed = false;
  std::vector<bom::Bom> boms;
};

std::string CreateBody(const std::vector<bom::Bom>& boms) {
  sdt::CreateRequest req;
  req.profile_id = "p";
  req.boms = boms;
  req.options = {{"tokens", {{"reader", {"READ"}}}}};
  return req.ToJson().dump();
}

std::string UpdateBody(Gen& g, std::uint64_t expected, const std::vector<bom::Bom>& from,
                       const std::vector<bom::Bom>& to) {
  sdt::UpdateRequest req;
  req.expected_version = expected;
  const bool as_deltas = g.Bool();
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from[i] == to[i]) continue;
    if (as_deltas) {
      req.deltas.push_back(bom::DiffBoms(from[i], to[i]));
    } else {
      req.boms.push_back(to[i]);
    }
  }
  return req.ToJson().dump();
}

// Create stage -> error_cause recorded when that stage fails; a failure at
// the first Core stage happens before any record exists.
const std::vector<std::pair<std::string, std::string>> kCreateFailures = {
    {"Core", "none"},         {"LCM", "deploy"},     {"deploy", "deploy"},
    {"DataAdapter", "representation"}, {"Controller", "representation"},
    {"confirm", "internal"},      {"respond", "internal"}};

const std::vector<std::string> kUpdateFailures = {"Interface", "Core", "DataAdapter", "Controller",
                                                  "respond", "commit"};

void CheckInvariants(sdt::SdtManager& manager, sdt::InProcessRuntime& runtime,
                     const std::map<std::string, ModelSdt>& model, const std::string& where) {
  SCOPED_TRACE(where);
  const auto descriptors = manager.Descriptors();
  ASSERT_EQ(descriptors.size(), model.size());
  std::size_t expected_live = 0;
  for (const auto& d : descriptors) {
    const auto& m = model.at(d.sdt_id);
    EXPECT_EQ(d.state, m.state) << d.sdt_id;
    EXPECT_EQ(d.representation_version, m.version);
    if (m.live) ++expected_live;
    if (m.state == SdtState::kReady) {
      EXPECT_FALSE(d.endpoint.empty());
      EXPECT_FALSE(d.error_cause.has_value());
    }
    if (m.state != SdtState::kReady || m.crashed) continue;
    auto ctl = manager.Controller(d.sdt_id);
    ASSERT_TRUE(ctl);
    const std::string token = *manager.ServiceToken(d.sdt_id);
    EXPECT_EQ(ctl->CurrentVersion(token), m.version);
    std::set<std::uint64_t> versions;
    for (const auto& id : ctl->ListThings(token)) {
      const auto hist = ctl->History(token, id);
      for (std::size_t k = 0; k < hist.size(); ++k) {
        EXPECT_EQ(hist[k].revision, k + 1);
        versions.insert(hist[k].representation_version);
      }
    }
    std::set<std::uint64_t> gap_free;
    for (std::uint64_t v = 1; v <= m.version; ++v) gap_free.insert(v);
    EXPECT_EQ(versions, gap_free) << d.sdt_id;
  }
  EXPECT_EQ(runtime.LiveCount(), expected_live);
}

TEST(SdtLifecycleProperty, FailureInjectionLeavesNoOrphansAndNoGaps) {
  Gen g(71);
  for (int i = 0; i < 100; ++i) {
    SCOPED_TRACE("case " + std::to_string(i));
    auto runtime = std::make_shared<sdt::InProcessRuntime>();
    sdt::SdtManager manager({runtime});
    auto tracer = std::make_shared<sdt::RecordingTracer>();
    manager.SetTracer(tracer);
    std::map<std::string, ModelSdt> model;
    std::vector<std::string> ids;  // creation order, so picks do not depend on random ids
    for (int step = 0; step < 8; ++step) {
      const std::string where = "step " + std::to_string(step);
      const int op = ids.empty() ? 0 : g.Int(0, 9);
      if (op <= 2) {
        auto boms = testing::HostBoms(g, g.Int(1, 3));
        const int inject = g.Int(0, 9);
        std::string cause;
        if (inject == 0) {
          runtime->FailNextDeploy();
          cause = "deploy";
        } else if (inject <= 3) {
          const auto& f = g.Pick(kCreateFailures);
          tracer->FailAt("create", f.first);
          cause = f.second;
        }
        const auto r = manager.HandleCreate(CreateBody(boms));
        tracer->FailAt("", "", 0);
        if (cause.empty()) {
          ASSERT_EQ(r.status, 201) << r.body.dump();
          ids.push_back(r.body.at("sdtId"));
          model[ids.back()] = ModelSdt{SdtState::kReady, 1, true, false, boms};
        } else {
          ASSERT_EQ(r.status, 500) << r.body.dump();
          if (cause == "none") {
            EXPECT_FALSE(r.body.contains("sdtId"));
            CheckInvariants(manager, *runtime, model, where);
            continue;
          }
          const std::string id = r.body.at("sdtId");
          EXPECT_EQ(manager.Descriptor(id)->error_cause, cause);
          EXPECT_TRUE(manager.Descriptor(id)->endpoint.empty());
          ids.push_back(id);
          model[id] = ModelSdt{SdtState::kError, 0, false, false, {}};
        }
      } else if (op <= 6) {
        if (g.Bool(0.1)) {
          EXPECT_EQ(manager.HandleUpdate("unknown-" + g.Ident(), UpdateBody(g, 1, {}, {})).status, 404);
          continue;
        }
        const std::string id = g.Pick(ids);
        auto& m = model.at(id);
        std::vector<bom::Bom> next = m.boms;
        for (auto& b : next) {
          if (g.Bool(0.6)) b = testing::NextRevision(g, b);
        }
        if (!next.empty() && next == m.boms) next[0] = testing::NextRevision(g, next[0]);
        if (m.state != SdtState::kReady) {
          EXPECT_EQ(manager.HandleUpdate(id, UpdateBody(g, m.version, m.boms, next)).status, 409);
          continue;
        }
        if (g.Bool(0.2)) {
          const std::uint64_t stale = g.Bool() ? m.version - 1 : m.version + 1;
          const auto r = manager.HandleUpdate(id, UpdateBody(g, stale, m.boms, next));
          EXPECT_EQ(r.status, 409);
          EXPECT_EQ(r.body.at("code"), "conflict");
          CheckInvariants(manager, *runtime, model, where);
          continue;
        }
        if (m.crashed) {
          EXPECT_EQ(manager.HandleUpdate(id, UpdateBody(g, m.version, m.boms, next)).status, 503);
          m.state = SdtState::kError;
          CheckInvariants(manager, *runtime, model, where);
          continue;
        }
        std::string inject;
        if (g.Bool(0.4)) inject = g.Pick(kUpdateFailures);
        auto ctl = manager.Controller(id);
        if (inject == "commit") {
          ctl->SetCommitHook([] { throw IoError("commit failed"); });
        } else if (!inject.empty()) {
          tracer->FailAt("update", inject);
        }
        const auto r = manager.HandleUpdate(id, UpdateBody(g, m.version, m.boms, next));
        tracer->FailAt("", "", 0);
        ctl->SetCommitHook({});
        if (inject.empty()) {
          ASSERT_EQ(r.status, 200) << r.body.dump();
          EXPECT_EQ(r.body.at("representationVersion"), m.version + 1);
        } else {
          EXPECT_EQ(r.status, 500) << inject;
        }
        if (inject.empty() || inject == "respond") {
          m.version += 1;
          m.boms = next;
        }
      } else if (op <= 8) {
        const std::string id = g.Bool(0.1) ? "unknown-" + g.Ident() : g.Pick(ids);
        const auto r = manager.HandleDestroy(id);
        if (!model.count(id)) {
          EXPECT_EQ(r.status, 404);
        } else {
          EXPECT_EQ(r.status, 204);
          EXPECT_TRUE(r.body.is_null());
          auto& m = model.at(id);
          m.state = SdtState::kDestroyed;
          m.live = false;
        }
      } else {
        const std::string id = g.Pick(ids);
        auto& m = model.at(id);
        if (m.state == SdtState::kReady && !m.crashed) {
          runtime->Crash(manager.Descriptor(id)->endpoint);
          m.crashed = true;
          m.live = false;
        }
      }
      CheckInvariants(manager, *runtime, model, where);
    }
  }
}

TEST(SdtTrace, CreateAndUpdateFollowTheInteractionSequence) {
  const auto start = std::chrono::steady_clock::now();
  Gen g(72);
  sdt::SdtManager manager;
  auto tracer = std::make_shared<sdt::RecordingTracer>();
  manager.SetTracer(tracer);
  const auto boms = testing::HostBoms(g, 2);
  const auto created = manager.HandleCreate(CreateBody(boms));
  ASSERT_EQ(created.status, 201);
  auto next = boms;
  next[0] = testing::NextRevision(g, next[0]);
  ASSERT_EQ(manager.HandleUpdate(created.body.at("sdtId"), UpdateBody(g, 1, boms, next)).status, 200);

  auto is_subsequence = [](const std::vector<std::string>& want, const std::vector<std::string>& got) {
    std::size_t k = 0;
    for (const auto& s : got) {
      if (k < want.size() && s == want[k]) ++k;
    }
    return k == want.size();
  };
  const std::vector<std::string> create = {"Interface", "Core",       "LCM",     "deploy",
                                           "DataAdapter", "Controller", "confirm", "respond"};
  const std::vector<std::string> update = {"Interface", "Core", "DataAdapter", "Controller", "respond"};
  EXPECT_TRUE(is_subsequence(create, tracer->Stages("create")));
  EXPECT_TRUE(is_subsequence(update, tracer->Stages("update")));
  EXPECT_EQ(tracer->Stages("create").back(), "respond");
  EXPECT_EQ(tracer->Stages("update").front(), "Interface");
  auto reordered = create;
  std::swap(reordered[2], reordered[4]);
  EXPECT_FALSE(is_subsequence(reordered, tracer->Stages("create")));
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
}

TEST(SdtManagerTest, RejectsBadCreateBodies) {
  sdt::SdtManager manager;
  EXPECT_EQ(manager.HandleCreate("{not json").status, 400);
  EXPECT_EQ(manager.HandleCreate(R"({"profileId":"p","boms":[]})").status, 400);
  EXPECT_EQ(manager.HandleCreate(R"({"profileId":"p","boms":[{"bomFormat":"x"}]})").status, 400);
  Gen g(73);
  sdt::CreateRequest req;
  req.profile_id = "p";
  req.boms = testing::HostBoms(g, 1);
  req.options = {{"tokens", {{"t", {"SUPERUSER"}}}}};
  EXPECT_EQ(manager.HandleCreate(req.ToJson().dump()).status, 400);
  auto dup = testing::HostBoms(g, 1);
  dup.push_back(forge::BuildSbom("host-0", testing::PackageRecords(g, "host-0")));
  const auto r = manager.HandleCreate(CreateBody(dup));
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(manager.Descriptor(r.body.at("sdtId"))->error_cause, "representation");
  EXPECT_EQ(manager.runtimes()[0]->LiveCount(), 0u);
}

TEST(SdtManagerTest, DescriptorJsonRoundTripAndIds) {
  Gen g(74);
  sdt::SdtManager manager;
  const auto r = manager.HandleCreate(CreateBody(testing::HostBoms(g, 1)));
  ASSERT_EQ(r.status, 201);
  const auto d = *manager.Descriptor(r.body.at("sdtId"));
  EXPECT_EQ(sdt::SdtDescriptor::FromJson(d.ToJson()), d);
  std::set<std::string> ids;
  for (int i = 0; i < 200; ++i) EXPECT_TRUE(ids.insert(manager.AllocateId()).second);
  for (auto s : {SdtState::kDeploying, SdtState::kReady, SdtState::kUpdating, SdtState::kDestroyed,
                 SdtState::kError}) {
    EXPECT_EQ(sdt::ParseSdtState(sdt::ToString(s)), s);
  }
}

TEST(SdtManagerTest, UpdateRequestCarriesOneKindOfChange) {
  Gen g(76);
  const auto boms = testing::HostBoms(g, 2);
  sdt::UpdateRequest req;
  req.expected_version = 1;
  req.deltas.push_back(bom::DiffBoms(boms[0], testing::NextRevision(g, boms[0])));
  req.boms.push_back(testing::NextRevision(g, boms[1]));
  EXPECT_THROW(req.ToJson(), InvalidArgumentError);
  auto body = nlohmann::json{{"expectedVersion", 1}, {"delta", nlohmann::json::array()},
                             {"boms", nlohmann::json::array()}};
  EXPECT_THROW(sdt::UpdateRequest::FromJson(body), InvalidArgumentError);
  req.boms.clear();
  const auto back = sdt::UpdateRequest::FromJson(req.ToJson());
  EXPECT_EQ(back.deltas, req.deltas);
  EXPECT_EQ(back.expected_version, 1u);
}

TEST(SdtManagerTest, CrashedInstanceIsReportedUnreachable) {
  Gen g(75);
  auto runtime = std::make_shared<sdt::InProcessRuntime>();
  sdt::SdtManager manager({runtime});
  const auto boms = testing::HostBoms(g, 1);
  const std::string id = manager.HandleCreate(CreateBody(boms)).body.at("sdtId");
  runtime->Crash(manager.Descriptor(id)->endpoint);
  auto next = boms;
  next[0] = testing::NextRevision(g, next[0]);
  const auto r = manager.HandleUpdate(id, UpdateBody(g, 1, boms, next));
  EXPECT_EQ(r.status, 503);
  EXPECT_EQ(manager.Descriptor(id)->state, SdtState::kError);
  EXPECT_EQ(manager.Descriptor(id)->error_cause, "unreachable");
  EXPECT_EQ(manager.HandleDestroy(id).status, 204);
  EXPECT_EQ(runtime->LiveCount(), 0u);
}

}  // namespace
}  // namespace twinaudit
