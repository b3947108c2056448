#include <gtest/gtest.h>
#include <httplib.h>

#include "sdt_gen.hpp"
#include "twinaudit/bom/codec.hpp"
#include "twinaudit/bom/diff.hpp"
#include "twinaudit/errors.hpp"
#include "twinaudit/sdt/manager.hpp"

namespace twinaudit {
namespace {

using nlohmann::json;
using testing::Gen;

class ManagerHttp : public ::testing::Test {
 protected:
  void SetUp() override {
    server_ = std::make_unique<sdt::SdtManagerServer>(manager_);
    server_->Start();
    client_ = std::make_unique<httplib::Client>(server_->base_url());
    client_->set_read_timeout(30, 0);
  }
  void TearDown() override { server_->Stop(); }

  httplib::Result Create(const std::vector<bom::Bom>& boms) {
    sdt::CreateRequest req;
    req.profile_id = "p1";
    req.boms = boms;
    req.options = {{"tokens", {{"reader-token", {"READ"}}, {"admin-token", {"ADMIN"}}}}};
    return client_->Post("/sdts", req.ToJson().dump(), "application/json");
  }

  std::string CreateOk(const std::vector<bom::Bom>& boms) {
    auto res = Create(boms);
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201) << res->body;
    return json::parse(res->body).at("sdtId");
  }

  httplib::Result Put(const std::string& id, const json& body) {
    return client_->Put("/sdts/" + id, body.dump(), "application/json");
  }

  sdt::SdtManager manager_;
  std::unique_ptr<sdt::SdtManagerServer> server_;
  std::unique_ptr<httplib::Client> client_;
  Gen g_{81};
};

TEST_F(ManagerHttp, CreateGetListFootprint) {
  const auto boms = testing::HostBoms(g_, 2);
  auto res = Create(boms);
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 201);
  const json created = json::parse(res->body);
  const std::string id = created.at("sdtId");
  EXPECT_EQ(created.at("state"), "READY");
  EXPECT_EQ(created.at("endpoint").get<std::string>().rfind("http://127.0.0.1:", 0), 0u);

  res = client_->Get("/sdts/" + id);
  ASSERT_EQ(res->status, 200);
  const auto d = sdt::SdtDescriptor::FromJson(json::parse(res->body));
  EXPECT_EQ(d.sdt_id, id);
  EXPECT_EQ(d.representation_version, 1u);
  EXPECT_EQ(d.profile_id, "p1");

  CreateOk(testing::HostBoms(g_, 1));
  res = client_->Get("/sdts");
  ASSERT_EQ(res->status, 200);
  const json list = json::parse(res->body);
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0].at("sdtId"), id);

  res = client_->Get("/sdts/" + id + "/footprint");
  ASSERT_EQ(res->status, 200);
  EXPECT_GT(json::parse(res->body).at("footprintBytes").get<std::size_t>(), 0u);
}

TEST_F(ManagerHttp, UnknownIdsAre404) {
  for (const std::string id : {"nope", "0000000000000000"}) {
    EXPECT_EQ(client_->Get("/sdts/" + id)->status, 404);
    EXPECT_EQ(client_->Get("/sdts/" + id + "/footprint")->status, 404);
    EXPECT_EQ(Put(id, {{"expectedVersion", 1}, {"delta", json::array()}})->status, 404);
    EXPECT_EQ(client_->Delete("/sdts/" + id)->status, 404);
  }
  EXPECT_EQ(client_->Get("/elsewhere")->status, 404);
  EXPECT_EQ(client_->Get("/sdts/x/other")->status, 404);
  const auto body = json::parse(client_->Get("/sdts/nope")->body);
  EXPECT_EQ(body.at("code"), "not_found");
}

TEST_F(ManagerHttp, UpdateVersioning) {
  const auto boms = testing::HostBoms(g_, 2);
  const std::string id = CreateOk(boms);
  const bom::Bom next = testing::NextRevision(g_, boms[0]);
  const json delta = bom::ToJson(bom::DiffBoms(boms[0], next));

  auto res = Put(id, {{"expectedVersion", 2}, {"delta", {delta}}});
  EXPECT_EQ(res->status, 409);
  EXPECT_EQ(json::parse(res->body).at("code"), "conflict");

  res = Put(id, {{"expectedVersion", 1}, {"delta", {delta}}});
  ASSERT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(json::parse(res->body).at("representationVersion"), 2);

  res = Put(id, {{"expectedVersion", 1}, {"delta", {delta}}});
  EXPECT_EQ(res->status, 409);
  EXPECT_EQ(manager_.Descriptor(id)->representation_version, 2u);

  const bom::Bom after = testing::NextRevision(g_, next);
  res = Put(id, {{"expectedVersion", 2}, {"boms", {bom::ToJson(after)}}});
  EXPECT_EQ(res->status, 200) << res->body;

  EXPECT_EQ(client_->Put("/sdts/" + id, "{broken", "application/json")->status, 400);
  EXPECT_EQ(Put(id, {{"delta", json::array()}})->status, 400);
  EXPECT_EQ(Put(id, {{"expectedVersion", 3}, {"delta", json::array()}, {"boms", json::array()}})->status,
            400);
  bom::Bom foreign = testing::HostBoms(g_, 1)[0];
  EXPECT_EQ(Put(id, {{"expectedVersion", 3}, {"boms", {bom::ToJson(foreign)}}})->status, 400);
  EXPECT_EQ(manager_.Descriptor(id)->representation_version, 3u);
}

TEST_F(ManagerHttp, DestroyIs204AndIdempotent) {
  const std::string id = CreateOk(testing::HostBoms(g_, 1));
  const std::string endpoint = manager_.Descriptor(id)->endpoint;
  auto res = client_->Delete("/sdts/" + id);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_TRUE(res->body.empty());
  EXPECT_EQ(client_->Delete("/sdts/" + id)->status, 204);
  EXPECT_EQ(json::parse(client_->Get("/sdts/" + id)->body).at("state"), "DESTROYED");
  EXPECT_EQ(Put(id, {{"expectedVersion", 1}, {"delta", json::array()}})->status, 409);
  EXPECT_EQ(client_->Get("/sdts/" + id + "/footprint")->status, 409);
  EXPECT_EQ(manager_.runtimes()[0]->LiveCount(), 0u);
  httplib::Client instance(endpoint);
  instance.set_connection_timeout(1, 0);
  EXPECT_FALSE(instance.Get("/things"));
}

TEST_F(ManagerHttp, BadRequestsAndMethods) {
  EXPECT_EQ(client_->Post("/sdts", "not json", "application/json")->status, 400);
  EXPECT_EQ(client_->Post("/sdts", "{}", "application/json")->status, 400);
  EXPECT_EQ(client_->Put("/sdts", "{}", "application/json")->status, 405);
  EXPECT_EQ(client_->Post("/sdts/abc", "{}", "application/json")->status, 405);
  EXPECT_EQ(client_->Delete("/sdts/abc/footprint")->status, 405);
}

TEST_F(ManagerHttp, ClientMapsStatusesToErrors) {
  sdt::HttpSdtManagerClient client(server_->base_url());
  sdt::CreateRequest req;
  req.profile_id = "p";
  req.boms = testing::HostBoms(g_, 1);
  const std::string id = client.Create(req.ToJson()).at("sdtId");
  EXPECT_EQ(client.Get(id).at("state"), "READY");
  EXPECT_THROW(client.Get("missing"), NotFoundError);
  EXPECT_THROW(client.Update(id, {{"expectedVersion", 9}, {"delta", json::array()}}), ConflictError);
  EXPECT_THROW(client.Create(json::object()), InvalidArgumentError);
  EXPECT_EQ(client.List().size(), 1u);
  EXPECT_NO_THROW(client.Destroy(id));
  sdt::HttpSdtManagerClient dead("http://127.0.0.1:1", 1);
  EXPECT_THROW(dead.List(), TransportError);

  sdt::LocalSdtManagerClient local(manager_);
  EXPECT_EQ(local.List().size(), 1u);
  EXPECT_THROW(local.Footprint("missing"), NotFoundError);
}

class InstanceHttp : public ManagerHttp {
 protected:
  void SetUp() override {
    ManagerHttp::SetUp();
    boms_ = testing::HostBoms(g_, 2);
    id_ = CreateOk(boms_);
    instance_ = std::make_unique<httplib::Client>(manager_.Descriptor(id_)->endpoint);
  }

  httplib::Result Get(const std::string& path, const std::string& token) {
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    return instance_->Get(path, headers);
  }

  std::vector<bom::Bom> boms_;
  std::string id_;
  std::unique_ptr<httplib::Client> instance_;
};

TEST_F(InstanceHttp, ReadRoutes) {
  auto res = Get("/things", "reader-token");
  ASSERT_EQ(res->status, 200);
  const json ids = json::parse(res->body);
  ASSERT_EQ(ids.size(), 2u);
  const std::string thing = ids[0];

  res = Get("/things/" + thing, "reader-token");
  ASSERT_EQ(res->status, 200);
  const json rev1 = json::parse(res->body);
  EXPECT_EQ(rev1.at("revision"), 1);

  const bom::Bom next = testing::NextRevision(g_, boms_[0]);
  ASSERT_EQ(Put(id_, {{"expectedVersion", 1}, {"boms", {bom::ToJson(next)}}})->status, 200);

  res = Get("/things/" + thing + "/history", "reader-token");
  ASSERT_EQ(res->status, 200);
  const json hist = json::parse(res->body);
  ASSERT_EQ(hist.size(), 2u);
  const std::int64_t t2 = hist[1].at("timestamp");

  EXPECT_EQ(json::parse(Get("/things/" + thing + "?rev=1", "reader-token")->body), rev1);
  EXPECT_EQ(json::parse(Get("/things/" + thing + "?at=" + std::to_string(t2 - 1), "reader-token")->body),
            rev1);
  EXPECT_EQ(json::parse(Get("/things/" + thing, "reader-token")->body).at("revision"), 2);
  EXPECT_EQ(json::parse(Get("/things/" + thing + "?at=" + std::to_string(t2), "reader-token")->body)
                .at("revision"),
            2);
}

TEST_F(InstanceHttp, ErrorsOnReadRoutes) {
  const std::string thing = json::parse(Get("/things", "reader-token")->body)[0];
  EXPECT_EQ(Get("/things/no-such-thing", "reader-token")->status, 404);
  EXPECT_EQ(Get("/things/no-such-thing/history", "reader-token")->status, 404);
  EXPECT_EQ(Get("/things/" + thing + "?rev=7", "reader-token")->status, 404);
  EXPECT_EQ(Get("/things/" + thing + "?at=1", "reader-token")->status, 404);
  EXPECT_EQ(Get("/things/" + thing + "?rev=abc", "reader-token")->status, 400);
  EXPECT_EQ(Get("/things/" + thing + "?rev=0", "reader-token")->status, 400);
  EXPECT_EQ(Get("/things/" + thing + "?rev=1&at=5", "reader-token")->status, 400);
  EXPECT_EQ(Get("/nothing-here", "reader-token")->status, 404);
}

TEST_F(InstanceHttp, DefaultDeny) {
  const std::string thing = json::parse(Get("/things", "reader-token")->body)[0];
  const std::vector<std::string> routes = {"/things", "/things/" + thing,
                                           "/things/" + thing + "/history"};
  for (const auto& route : routes) {
    SCOPED_TRACE(route);
    EXPECT_EQ(Get(route, "")->status, 401);
    for (const std::string token : {"guess", "reader-tokenX", "READER-TOKEN", "admin-token"}) {
      auto res = Get(route, token);
      EXPECT_EQ(res->status, 403) << token;
      EXPECT_EQ(json::parse(res->body).count("properties"), 0u);
    }
    httplib::Headers basic = {{"Authorization", "Basic cmVhZGVyLXRva2Vu"}};
    EXPECT_EQ(instance_->Get(route, basic)->status, 403);
    EXPECT_EQ(Get(route, "reader-token")->status, 200);
  }
  auto ctl = manager_.Controller(id_);
  std::size_t denied = 0;
  for (const auto& d : ctl->policy().decisions()) denied += d.allowed ? 0 : 1;
  EXPECT_EQ(denied, routes.size() * 6);
}

}  // namespace
}  // namespace twinaudit
