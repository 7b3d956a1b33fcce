// Copyright 2026 The genhub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "genhub/digest.hpp"
#include "genhub/error.hpp"
#include "genhub/fs_util.hpp"
#include "genhub/image.hpp"
#include "genhub/service.hpp"
#include "schema_check.hpp"
#include "toy.hpp"

using namespace genhub;
namespace fs = std::filesystem;
using genhub::testing::ToySpec;
using nlohmann::json;

namespace {

json table_metrics(double rs) { return {{"FID", {{"ImageNet", {{"real-syn", rs}}}}}}; }

struct Fixture {
  TempDir tmp;
  std::unique_ptr<Hub> hub;
  std::unique_ptr<Service> service;

  Fixture() {
    ToySpec a;
    a.id = "00001_TOY";
    a.metrics = table_metrics(80.51);
    a.keywords = {"toy", "mammography"};
    ToySpec b;
    b.id = "00002_LATENT";
    b.latent_dim = 4;
    b.metrics = table_metrics(67.60);
    b.keywords = {"toy", "latent"};
    ToySpec c;
    c.id = "00003_MASK";
    c.with_mask = true;
    c.metrics = table_metrics(150.16);
    auto index = genhub::testing::toy_registry(tmp.path(), {a, b, c});
    hub = std::make_unique<Hub>(genhub::testing::test_hub_config(tmp.path() / "cache"), index);
    ServiceConfig cfg;
    cfg.port = 0;
    cfg.output_root = tmp.path() / "served";
    cfg.async_threshold = 8;
    service = std::make_unique<Service>(*hub, cfg);
  }
};

void conforms(const ApiResponse& r, const std::string& schema) {
  const auto v = genhub::testing::schema_violations(genhub::testing::load_schema(schema), r.body);
  INFO(r.body.dump());
  for (const auto& m : v) INFO(m);
  CHECK(v.empty());
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("list and get") {
    Fixture f;
    const auto list = f.service->list_models();
    CHECK(list.status == 200);
    conforms(list, "models");
    CHECK(list.body["model_ids"].size() == 3);
    const auto one = f.service->get_model("00001_TOY");
    conforms(one, "model");
    const auto missing = f.service->get_model("99999_NONE");
    CHECK(missing.status == 404);
    CHECK(missing.body["error"]["code"] == "unknown_model");
    conforms(missing, "error");
  }

  TEST_CASE("search and rank") {
    Fixture f;
    const auto s = f.service->search(R"({"values":["toy","latent"],"operator":"xor"})");
    CHECK(s.status == 200);
    conforms(s, "search");
    CHECK(s.body["model_ids"] == json::array({"00001_TOY", "00003_MASK"}));
    CHECK(s.body["operator"] == "XOR");

    const auto bad_op = f.service->search(R"({"values":["toy"],"operator":"NAND"})");
    CHECK(bad_op.status == 400);
    CHECK(bad_op.body["error"]["code"] == "bad_query");
    const auto bad_json = f.service->search("{");
    CHECK(bad_json.status == 400);
    conforms(bad_json, "error");

    const auto r = f.service->rank(R"({"metric":"FID.ImageNet.real-syn"})");
    conforms(r, "rank");
    REQUIRE(r.body["items"].size() == 3);
    CHECK(r.body["items"][0]["value"] == 67.60);
    CHECK(r.body["items"][1]["value"] == 80.51);
    CHECK(r.body["items"][2]["value"] == 150.16);
    const auto d = f.service->rank(R"({"metric":"FID.ImageNet.real-syn","order":"descending"})");
    CHECK(d.body["items"][0]["model_id"] == "00003_MASK");
    const auto m = f.service->rank(R"({"metric":"nothing.here"})");
    CHECK(m.status == 400);
    conforms(m, "error");
  }

  TEST_CASE("synchronous generate") {
    Fixture f;
    const auto r = f.service->generate("00001_TOY", R"({"num_samples":3,"seed":5})");
    CHECK(r.status == 200);
    conforms(r, "generate");
    CHECK(r.body["records"].size() == 3);
    CHECK(fs::exists(fs::path(r.body["output_dir"].get<std::string>()) / "sample_00002.png"));
    const auto bad = f.service->generate("00001_TOY", R"({"num_samples":2,"kwargs":{"behavior":"short"}})");
    CHECK(bad.status == 502);
    CHECK(bad.body["error"]["code"] == "protocol_violation");
    conforms(bad, "error");
    const auto zero = f.service->generate("00001_TOY", R"({"num_samples":0})");
    CHECK(zero.body["error"]["code"] == "validation");
  }

  TEST_CASE("asynchronous generate") {
    Fixture f;
    const auto r = f.service->generate("00001_TOY", R"({"num_samples":20,"seed":1})");
    CHECK(r.status == 202);
    conforms(r, "job");
    const std::string job = r.body["job_id"];
    f.service->wait_for_jobs();
    const auto done = f.service->job(job);
    conforms(done, "job");
    CHECK(done.body["state"] == "done");
    CHECK(done.body["result"]["records"].size() == 20);
    CHECK(f.service->job("nope").status == 400);

    const auto failing = f.service->generate("00001_TOY", R"({"num_samples":20,"kwargs":{"behavior":"exit1"}})");
    f.service->wait_for_jobs();
    const auto failed = f.service->job(failing.body["job_id"]);
    CHECK(failed.body["state"] == "failed");
    CHECK(failed.body["error"]["code"] == "protocol_violation");
  }

  TEST_CASE("explore") {
    Fixture f;
    const auto r = f.service->explore("00002_LATENT", R"({"latent_vector":[0.1,0.2,0.3,0.4]})");
    CHECK(r.status == 200);
    conforms(r, "explore");
    CHECK(r.body["seed_used"] == 0);
    const std::string png = base64_decode(r.body["outputs"]["image"]["data_base64"].get<std::string>());
    CHECK(png.substr(1, 3) == "PNG");
    const auto again = f.service->explore("00002_LATENT", R"({"latent_vector":[0.1,0.2,0.3,0.4]})");
    CHECK(again.body["outputs"] == r.body["outputs"]);
    const auto moved = f.service->explore("00002_LATENT", R"({"latent_vector":[1.1,0.2,0.3,0.4]})");
    CHECK(moved.body["outputs"] != r.body["outputs"]);

    const auto wrong = f.service->explore("00002_LATENT", R"({"latent_vector":[0.1]})");
    CHECK(wrong.status == 400);
    CHECK(wrong.body["error"]["detail"]["expected_latent_dim"] == 4);
    CHECK(wrong.body["error"]["message"].get<std::string>().find("latent_dim 4") != std::string::npos);
    const auto flat = f.service->explore("00001_TOY", R"({"latent_vector":[0.1]})");
    CHECK(flat.status == 400);
    CHECK(flat.body["error"]["message"].get<std::string>().find("not explorable") != std::string::npos);
  }

  TEST_CASE("dispatch and static assets") {
    Fixture f;
    CHECK(f.service->dispatch("GET", "/v1/models").status == 200);
    CHECK(f.service->dispatch("POST", "/v1/search", R"({"values":["toy"]})").body["model_ids"].size() == 3);
    const auto nf = f.service->dispatch("GET", "/v1/unknown");
    CHECK(nf.status == 404);
    conforms(nf, "error");
    const auto page = f.service->dispatch("GET", "/");
    CHECK(page.status == 200);
    CHECK(page.raw.find("<html") != std::string::npos);
  }

  TEST_CASE("HTTP responses equal the in-process handlers") {
    Fixture f;
    f.service->start();
    httplib::Client cli("127.0.0.1", f.service->port());
    auto list = cli.Get("/v1/models");
    REQUIRE(list);
    CHECK(list->status == 200);
    CHECK(json::parse(list->body) == f.service->list_models().body);
    auto search = cli.Post("/v1/search", R"({"values":["mammography"]})", "application/json");
    REQUIRE(search);
    CHECK(json::parse(search->body) == f.service->search(R"({"values":["mammography"]})").body);
    auto missing = cli.Get("/v1/models/99999_NONE");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    f.service->stop();
  }

  TEST_CASE("port in use") {
    Fixture f;
    f.service->start();
    ServiceConfig cfg;
    cfg.port = f.service->port();
    Service other(*f.hub, cfg);
    try {
      other.start();
      FAIL("expected bind error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kBind);
    }
    f.service->stop();
  }
}
