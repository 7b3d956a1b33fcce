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

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace genhub::testing {

// Subset of JSON Schema used by schemas/*.schema.json: type, enum,
// required, properties, additionalProperties (false only), items, minimum.
// Returns one message per violation, prefixed with the instance path.
std::vector<std::string> schema_violations(const nlohmann::json& schema,
                                           const nlohmann::json& instance);

// Loads schemas/<name>.schema.json.
nlohmann::json load_schema(const std::string& name);

}  // namespace genhub::testing
