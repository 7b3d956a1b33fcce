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

#include "genhub/error.hpp"
#include "genhub/search.hpp"
#include "oracles.hpp"
#include "toy.hpp"

using namespace genhub;
using genhub::testing::plain_metadata;
using nlohmann::json;

namespace {

RegistryIndex fixture() {
  RegistryIndex::Models m;
  m.emplace(ModelId("00001_M1"), plain_metadata("00001_M1", {"mammography", "patches"},
                                                {{"FID", {{"ImageNet", {{"real-syn", 30.0}}}}}}));
  m.emplace(ModelId("00002_M2"), plain_metadata("00002_M2", {"mammography", "full-field"},
                                                {{"FID", {{"ImageNet", {{"real-syn", 20.0}}}}}}));
  m.emplace(ModelId("00003_M3"), plain_metadata("00003_M3", {"endoscopy", "patches"}));
  return RegistryIndex("1.0.0", m);
}

std::vector<std::string> ids_of(const MatchCandidates& c) {
  std::vector<std::string> out;
  for (const auto& id : c.ids()) out.push_back(id.str());
  return out;
}

std::vector<std::string> find(const RegistryIndex& index, std::vector<std::string> values,
                              const char* op) {
  return ids_of(find_models(index, SearchQuery(values, parse_operator(op))));
}

using Ids = std::vector<std::string>;

}  // namespace

TEST_SUITE("search") {
  TEST_CASE("recursive_match reports field paths") {
    const auto m = plain_metadata("00001_M1", {"mammography", "patches"});
    const auto hits = recursive_match("mammography", m);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0] == "selection.keywords[0]");
    CHECK(recursive_match("MAMMO", m) == hits);
    CHECK(recursive_match("ultrasound", m).empty());
  }

  TEST_CASE("numbers are never searched") {
    auto m = plain_metadata("00001_M1", {"x"});
    m.execution.package_size_bytes = 128;
    m.execution.image_size = json::array({128, 128});
    for (const auto& p : recursive_match("128", m)) CHECK(p.find("size") == std::string::npos);
  }

  TEST_CASE("operators on the three-model fixture") {
    const auto index = fixture();
    CHECK(find(index, {"patches", "mammography"}, "AND") == Ids{"00001_M1"});
    CHECK(find(index, {"patches", "mammography"}, "OR") ==
          Ids{"00001_M1", "00002_M2", "00003_M3"});
    // Frozen from tests/oracles/search_oracle.py.
    CHECK(find(index, {"patches", "mammography"}, "XOR") == Ids{"00002_M2", "00003_M3"});
  }

  TEST_CASE("query values are lowercased and de-duplicated") {
    SearchQuery q({"Patches", "patches", "PATCHES"}, SearchOperator::kXor);
    CHECK(q.values() == std::vector<std::string>{"patches"});
    CHECK(find(fixture(), {"Patches", "patches"}, "XOR") == Ids{"00001_M1", "00003_M3"});
    CHECK_THROWS_AS(SearchQuery({}, SearchOperator::kAnd), Error);
  }

  TEST_CASE("matched entries carry values and hit paths") {
    const auto c = find_models(fixture(), SearchQuery({"patches", "mammography"},
                                                      SearchOperator::kOr));
    REQUIRE(c.entries.size() == 3);
    CHECK(c.entries[0].matched_values == std::set<std::string>{"mammography", "patches"});
    CHECK(c.entries[2].matched_values == std::set<std::string>{"patches"});
    CHECK(c.entries[2].hit_paths == std::vector<std::string>{"selection.keywords[1]"});
  }

  TEST_CASE("unknown operator") {
    try {
      parse_operator("NAND");
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kUnknownOperator);
    }
    CHECK(parse_operator("xor") == SearchOperator::kXor);
  }

  TEST_CASE("rank by a nested FID metric") {
    RegistryIndex::Models m;
    m.emplace(ModelId("00003_C"), plain_metadata("00003_C", {"x"},
                                                 {{"FID", {{"ImageNet", {{"real-syn", 150.16}}}}}}));
    m.emplace(ModelId("00001_A"), plain_metadata("00001_A", {"x"},
                                                 {{"FID", {{"ImageNet", {{"real-syn", 67.60}}}}}}));
    m.emplace(ModelId("00002_B"), plain_metadata("00002_B", {"x"},
                                                 {{"FID", {{"ImageNet", {{"real-syn", 80.51}}}}}}));
    m.emplace(ModelId("00004_D"), plain_metadata("00004_D", {"x"}));
    const RegistryIndex index("1.0.0", m);
    const auto asc = rank_models(index, "FID.ImageNet.real-syn", SortOrder::kAscending);
    REQUIRE(asc.items.size() == 3);
    CHECK(asc.items[0].value == 67.60);
    CHECK(asc.items[1].value == 80.51);
    CHECK(asc.items[2].value == 150.16);
    CHECK(asc.excluded == std::vector<ModelId>{ModelId("00004_D")});
    const auto desc = rank_models(index, "FID.ImageNet.real-syn", SortOrder::kDescending);
    CHECK(std::equal(asc.items.begin(), asc.items.end(), desc.items.rbegin()));
  }

  TEST_CASE("ties are broken by id") {
    RegistryIndex::Models m;
    for (auto* id : {"00009_Z", "00002_B", "00005_K"}) {
      m.emplace(ModelId(id), plain_metadata(id, {"x"}, {{"fid", 68.22}}));
    }
    const RegistryIndex index("1.0.0", m);
    for (auto order : {SortOrder::kAscending, SortOrder::kDescending}) {
      const auto r = rank_models(index, "fid", order);
      CHECK(r.items[0].model_id.str() == "00002_B");
      CHECK(r.items[1].model_id.str() == "00005_K");
      CHECK(r.items[2].model_id.str() == "00009_Z");
    }
  }

  TEST_CASE("rank errors and id restriction") {
    const auto index = fixture();
    CHECK_THROWS_AS(rank_models(index, "nope", SortOrder::kAscending), Error);
    try {
      rank_models(index, "nope", SortOrder::kAscending);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kMetricMissing);
    }
    const auto only = rank_models(index, "FID.ImageNet.real-syn", SortOrder::kAscending,
                                  std::vector<ModelId>{ModelId("00001_M1")});
    REQUIRE(only.items.size() == 1);
    CHECK(only.items[0].model_id.str() == "00001_M1");
    try {
      rank_models(index, "FID.ImageNet.real-syn", SortOrder::kAscending,
                  std::vector<ModelId>{ModelId("99999_X")});
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kUnknownModel);
    }
  }

  TEST_CASE("find_rank composes search and ranking") {
    const auto index = fixture();
    const auto r = find_rank(index, SearchQuery({"mammography"}, SearchOperator::kAnd),
                             "FID.ImageNet.real-syn", SortOrder::kAscending);
    REQUIRE(r.items.size() == 2);
    CHECK(r.items[0].model_id.str() == "00002_M2");
    CHECK(r.items[1].model_id.str() == "00001_M1");

    for (auto order : {SortOrder::kAscending, SortOrder::kDescending}) {
      const auto one = find_rank(index, SearchQuery({"full-field"}, SearchOperator::kAnd),
                                 "FID.ImageNet.real-syn", order);
      REQUIRE(one.items.size() == 1);
      CHECK(one.items[0].model_id.str() == "00002_M2");
    }
    try {
      find_rank(index, SearchQuery({"ultrasound"}, SearchOperator::kOr), "FID.ImageNet.real-syn",
                SortOrder::kAscending);
      FAIL("expected empty-match error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kEmptyMatch);
    }
  }

  TEST_CASE("randomized registries agree with the brute-force oracle") {
    std::mt19937_64 rng(2024);
    const std::vector<std::string> vocab = {"mammography", "patches", "mri", "brain",
                                            "ct",          "polyp",   "endoscopy"};
    for (int trial = 0; trial < 40; ++trial) {
      const auto index = genhub::testing::random_registry(rng, 20, vocab);
      std::vector<std::string> values;
      const int nv = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < nv; ++i) values.push_back(vocab[rng() % vocab.size()]);
      for (const char* op : {"AND", "OR", "XOR"}) {
        CHECK(find(index, values, op) == genhub::testing::oracle_find(index, values, op));
      }
    }
  }
}
