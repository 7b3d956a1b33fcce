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
#include "genhub/fs_util.hpp"
#include "genhub/manifest.hpp"
#include "toy.hpp"

using namespace genhub;
using nlohmann::json;

TEST_SUITE("manifest") {
  TEST_CASE("json round trip") {
    genhub::testing::ToySpec spec;
    spec.with_mask = true;
    spec.latent_dim = 6;
    const auto m = genhub::testing::toy_manifest(spec);
    CHECK(parse_manifest(manifest_to_json(m)) == m);
    CHECK(parse_manifest_text(manifest_to_json(m).dump()) == m);
    CHECK(validate_manifest(m).ok());
  }

  TEST_CASE("parse errors name the field") {
    auto doc = manifest_to_json(genhub::testing::toy_manifest({}));
    doc.erase("entrypoint");
    try {
      parse_manifest(doc);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kManifestInvalid);
      CHECK(std::string(e.what()).find("entrypoint") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_manifest_text("{"), Error);
  }

  TEST_CASE("validation findings") {
    auto m = genhub::testing::toy_manifest({});
    m.weights.extension = "pt";
    m.outputs.clear();
    m.params.push_back({"behavior", ParamKind::kString, nullptr, false});
    const auto r = validate_manifest(m);
    CHECK(r.has_path("weights.extension"));
    CHECK(r.has_path("outputs"));
    CHECK_FALSE(r.ok());
  }

  TEST_CASE("default must match the declared kind") {
    auto m = genhub::testing::toy_manifest({});
    m.params.push_back({"steps", ParamKind::kInt, "ten", false});
    CHECK_FALSE(validate_manifest(m).ok());
  }

  TEST_CASE("weights file is checked against a package dir") {
    TempDir tmp;
    genhub::testing::ToySpec spec;
    spec.write_weights = false;
    genhub::testing::write_toy_package(tmp.path(), spec);
    const auto m = load_manifest(tmp.path());
    CHECK(validate_manifest(m).ok());
    CHECK(validate_manifest(m, tmp.path()).has_path("weights"));
  }

  TEST_CASE("missing manifest file") {
    TempDir tmp;
    try {
      load_manifest(tmp.path());
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kManifestInvalid);
    }
  }

  TEST_CASE("param text parsing") {
    CHECK(parse_param_text(ParamKind::kInt, "3") == json(3));
    CHECK(parse_param_text(ParamKind::kFloat, "0.5") == json(0.5));
    CHECK(parse_param_text(ParamKind::kBool, "true") == json(true));
    CHECK(parse_param_text(ParamKind::kFloatList, "0.1,0.2") == json({0.1, 0.2}));
    CHECK(parse_param_text(ParamKind::kString, "abc") == json("abc"));
    CHECK_THROWS_AS(parse_param_text(ParamKind::kInt, "x"), Error);
    CHECK(value_matches_kind(ParamKind::kFloat, json(1)));
    CHECK_FALSE(value_matches_kind(ParamKind::kInt, json(1.5)));
  }
}
