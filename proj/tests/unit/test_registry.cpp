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

#include <random>
#include <set>

#include "genhub/error.hpp"
#include "genhub/registry.hpp"
#include "toy.hpp"

using namespace genhub;
using genhub::testing::plain_metadata;
using nlohmann::json;

namespace {

RegistryIndex three_models() {
  RegistryIndex::Models m;
  for (auto* id : {"00003_C", "00001_A", "00002_B"}) {
    m.emplace(ModelId(id), plain_metadata(id, {"mammography"}, {{"FID", {{"raw", 10.5}}}}));
  }
  return RegistryIndex("1.0.0", m);
}

ErrorKind load_error(const std::string& doc) {
  try {
    load_index(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("load_index accepted the document");
  return ErrorKind::kInternal;
}

}  // namespace

TEST_SUITE("registry") {
  TEST_CASE("model id grammar") {
    CHECK(ModelId::is_valid("00100_YOUR_MODEL"));
    CHECK(ModelId::is_valid("00001_A"));
    CHECK(ModelId::is_valid("12345_A_1_B"));
    CHECK_FALSE(ModelId::is_valid("1_bad"));
    CHECK_FALSE(ModelId::is_valid("00001_a"));
    CHECK_FALSE(ModelId::is_valid("00001_"));
    CHECK_FALSE(ModelId::is_valid("000001_A"));
    CHECK_FALSE(ModelId::is_valid("00001-A"));
  }

  TEST_CASE("empty models map loads as an empty index") {
    const auto index = load_index(R"({"schema_version":"1.0.0","models":{}})");
    CHECK(index.size() == 0);
    CHECK(index.schema_version() == "1.0.0");
  }

  TEST_CASE("three entries load in sorted id order") {
    const auto index = load_index(serialize_index(three_models()));
    const auto ids = index.ids();
    REQUIRE(ids.size() == 3);
    CHECK(ids[0].str() == "00001_A");
    CHECK(ids[1].str() == "00002_B");
    CHECK(ids[2].str() == "00003_C");
  }

  TEST_CASE("duplicate ids are rejected and named") {
    const json body = metadata_to_json(plain_metadata("00001_A", {"x"}));
    const std::string doc = R"({"schema_version":"1.0.0","models":{"00001_A":)" + body.dump() +
                            R"(,"00001_A":)" + body.dump() + "}}";
    try {
      load_index(doc);
      FAIL("expected duplicate-id error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDuplicateId);
      CHECK(std::string(e.what()).find("00001_A") != std::string::npos);
      CHECK(e.detail()["model_id"] == "00001_A");
    }
  }

  TEST_CASE("malformed and structurally wrong documents") {
    CHECK(load_error("{not json") == ErrorKind::kParse);
    CHECK(load_error(R"({"schema_version":"1.0.0"})") == ErrorKind::kSchema);
    CHECK(load_error(R"({"schema_version":"1.0.0","models":{"bad":{}}})") == ErrorKind::kSchema);
    json body = metadata_to_json(plain_metadata("00001_A", {"x"}));
    body.erase("selection");
    CHECK(load_error(json{{"schema_version", "1.0.0"}, {"models", {{"00001_A", body}}}}.dump()) ==
          ErrorKind::kSchema);
  }

  TEST_CASE("validate_entry findings name the field") {
    auto meta = plain_metadata("00001_A", {"mammography", "patches"});
    CHECK(validate_entry(meta).ok());

    auto short_sum = meta;
    short_sum.execution.checksum_sha256.pop_back();
    const auto r1 = validate_entry(short_sum);
    REQUIRE(r1.findings.size() == 1);
    CHECK(r1.findings[0].path == "execution.checksum_sha256");

    auto no_kw = meta;
    no_kw.selection.keywords.clear();
    const auto r2 = validate_entry(no_kw);
    REQUIRE(r2.findings.size() == 1);
    CHECK(r2.findings[0].path == "selection.keywords");

    auto bad = meta;
    bad.description.title.clear();
    bad.description.license.clear();
    bad.selection.metrics = {{"FID", {{"x", "high"}}}};
    bad.description.date = "yesterday";
    bad.execution.package_size_bytes = -1;
    const auto r3 = validate_entry(bad);
    CHECK(r3.has_path("description.title"));
    CHECK(r3.has_path("description.license"));
    CHECK(r3.has_path("selection.metrics.FID.x"));
    CHECK(r3.has_path("description.date"));
    CHECK(r3.has_path("execution.package_size_bytes"));
  }

  TEST_CASE("upsert inserts, replaces and leaves the input untouched") {
    const auto index = three_models();
    const auto before = serialize_index(index);

    const auto grown = upsert_entry(index, plain_metadata("00004_D", {"x"}));
    CHECK(grown.size() == 4);
    CHECK(index.size() == 3);

    auto changed = plain_metadata("00002_B", {"mammography"});
    changed.description.title = "Renamed";
    const auto replaced = upsert_entry(index, changed);
    CHECK(replaced.size() == 3);
    CHECK(get_metadata(replaced, ModelId("00002_B")).description.title == "Renamed");
    CHECK(get_metadata(replaced, ModelId("00001_A")) == get_metadata(index, ModelId("00001_A")));

    auto invalid = plain_metadata("00005_E", {});
    CHECK_THROWS_AS(upsert_entry(index, invalid), Error);
    try {
      upsert_entry(index, invalid);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kValidation);
    }
    CHECK(serialize_index(index) == before);
  }

  TEST_CASE("upsert is idempotent") {
    const auto index = three_models();
    const auto m = plain_metadata("00009_Z", {"k"});
    const auto once = upsert_entry(index, m);
    CHECK(upsert_entry(once, m) == once);
    CHECK(serialize_index(upsert_entry(once, m)) == serialize_index(once));
  }

  TEST_CASE("get_metadata is case-sensitive") {
    const auto index = three_models();
    CHECK(get_metadata(index, ModelId("00001_A")).model_id.str() == "00001_A");
    for (auto* id : {"99999_X", "00001_a"}) {
      try {
        get_metadata(index, ModelId(id));
        FAIL("expected unknown-model error");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kUnknownModel);
        CHECK(std::string(e.what()).find(id) != std::string::npos);
      }
    }
  }

  TEST_CASE("round trip is byte-identical") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
      RegistryIndex::Models models;
      const int n = static_cast<int>(rng() % 8);
      for (int i = 0; i < n; ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "%05u_M%d", static_cast<unsigned>(rng() % 99999), i);
        auto m = plain_metadata(id, {"kw" + std::to_string(rng() % 5)},
                                {{"FID", {{"real-syn", (rng() % 10000) / 100.0}}}});
        m.execution.generate_defaults["n"] = static_cast<int>(rng() % 7);
        m.execution.dependencies = {"python3", "numpy>=1.2"};
        m.description.date = "2023-04-0" + std::to_string(1 + rng() % 9);
        models.emplace(m.model_id, m);
      }
      const RegistryIndex index("1.0.0", models);
      const std::string text = serialize_index(index);
      const RegistryIndex back = load_index(text);
      CHECK(back == index);
      CHECK(serialize_index(back) == text);
    }
  }

  TEST_CASE("field-deletion fuzz: documents with broken entries are rejected") {
    // Required leaves; removing any other field leaves a valid entry.
    const std::set<std::string> required = {
        "execution",          "selection",          "description",
        "execution.package_url", "execution.checksum_sha256",
        "execution.package_size_bytes", "selection.keywords",
        "description.title",  "description.license"};
    auto meta = plain_metadata("00001_A", {"mammography"}, {{"FID", {{"raw", 1.0}}}});
    meta.selection.modality = "mri";
    meta.description.date = "2022-01-01";
    const json body = metadata_to_json(meta);

    std::vector<std::string> paths;
    for (const auto& [sec, obj] : body.items()) {
      paths.push_back(sec);
      for (const auto& [key, _] : obj.items()) paths.push_back(sec + "." + key);
    }
    int rejected = 0;
    for (const auto& path : paths) {
      json mutated = body;
      const auto dot = path.find('.');
      if (dot == std::string::npos) {
        mutated.erase(path);
      } else {
        mutated[path.substr(0, dot)].erase(path.substr(dot + 1));
      }
      const std::string doc =
          json{{"schema_version", "1.0.0"}, {"models", {{"00001_A", mutated}}}}.dump();
      const bool expect_reject = required.count(path) != 0;
      bool threw = false;
      try {
        load_index(doc);
      } catch (const Error& e) {
        threw = true;
        CHECK(e.kind() == ErrorKind::kSchema);
      }
      INFO("deleted " << path);
      CHECK(threw == expect_reject);
      rejected += threw;
    }
    CHECK(rejected == static_cast<int>(required.size()));

    // Emptying a required list or string is also a broken entry.
    json no_kw = body;
    no_kw["selection"]["keywords"] = json::array();
    CHECK(load_error(json{{"schema_version", "1.0.0"}, {"models", {{"00001_A", no_kw}}}}.dump()) ==
          ErrorKind::kSchema);
  }

  TEST_CASE("dotted metric lookup") {
    auto m = plain_metadata("00001_A", {"x"},
                            {{"FID", {{"ImageNet", {{"real-syn", 67.6}}}}}, {"flat", 3}});
    CHECK(*m.selection.metric("FID.ImageNet.real-syn") == doctest::Approx(67.6));
    CHECK(*m.selection.metric("flat") == 3);
    CHECK_FALSE(m.selection.metric("FID.ImageNet").has_value());
    CHECK_FALSE(m.selection.metric("FID.RadImageNet.real-syn").has_value());
  }
}
