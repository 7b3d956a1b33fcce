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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace genhub {

// Registry key such as "00100_YOUR_MODEL". Holds any string; use valid() to
// check the `^\d{5}_[A-Z0-9_]+$` grammar.
class ModelId {
 public:
  ModelId() = default;
  explicit ModelId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool valid() const { return is_valid(value_); }
  static bool is_valid(std::string_view value);

  friend auto operator<=>(const ModelId&, const ModelId&) = default;

 private:
  std::string value_;
};

struct Finding {
  std::string path;
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
  bool has_path(std::string_view path) const;
  std::string summary() const;
};

struct ExecutionSection {
  std::string package_url;
  std::string checksum_sha256;
  std::int64_t package_size_bytes = 0;
  // [height, width] or a list of such pairs, one per declared output.
  nlohmann::json image_size = nlohmann::json::array();
  std::map<std::string, nlohmann::json> generate_defaults;
  std::vector<std::string> dependencies;
  std::string extension_weights;

  friend bool operator==(const ExecutionSection&,
                         const ExecutionSection&) = default;
};

struct SelectionSection {
  std::vector<std::string> keywords;
  std::string modality;
  std::string organ;
  nlohmann::json metrics = nlohmann::json::object();

  // Resolves a dotted path such as "FID.ImageNet.real-syn" into metrics.
  std::optional<double> metric(std::string_view dotted_path) const;

  friend bool operator==(const SelectionSection&,
                         const SelectionSection&) = default;
};

struct DescriptionSection {
  std::string title;
  std::string training_dataset;
  std::string license;
  std::string date;
  std::string publication;

  friend bool operator==(const DescriptionSection&,
                         const DescriptionSection&) = default;
};

struct ModelMetadata {
  ModelId model_id;
  ExecutionSection execution;
  SelectionSection selection;
  DescriptionSection description;

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

// Immutable once built; mutation goes through upsert_entry, which returns a
// new value.
class RegistryIndex {
 public:
  using Models = std::map<ModelId, ModelMetadata>;

  RegistryIndex() = default;
  RegistryIndex(std::string schema_version, Models models)
      : schema_version_(std::move(schema_version)), models_(std::move(models)) {}

  const std::string& schema_version() const { return schema_version_; }
  const Models& models() const { return models_; }
  std::size_t size() const { return models_.size(); }
  bool contains(const ModelId& id) const { return models_.count(id) != 0; }
  std::vector<ModelId> ids() const;

  friend bool operator==(const RegistryIndex&, const RegistryIndex&) = default;

 private:
  std::string schema_version_ = "1.0.0";
  Models models_;
};

inline constexpr std::string_view kDefaultRegistryPath = "./registry/index.json";

// Parses and validates a registry document. Throws Error with kind kParse,
// kSchema or kDuplicateId.
RegistryIndex load_index(std::string_view document);

// Sorted-key, two-space indented, newline-terminated document.
std::string serialize_index(const RegistryIndex& index);

ValidationReport validate_entry(const ModelMetadata& meta);

// Throws kValidation (the input index is left untouched) when meta has
// findings.
RegistryIndex upsert_entry(const RegistryIndex& index,
                           const ModelMetadata& meta);

// Throws kUnknownModel.
const ModelMetadata& get_metadata(const RegistryIndex& index,
                                  const ModelId& id);

// Section-level conversions. model_id is not part of the entry body; it is
// the key under "models".
nlohmann::json metadata_to_json(const ModelMetadata& meta);
ModelMetadata metadata_from_json(const ModelId& id, const nlohmann::json& body);

}  // namespace genhub
