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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "genhub/registry.hpp"

namespace genhub {

enum class ParamKind { kInt, kFloat, kString, kBool, kPath, kFloatList };

std::string_view param_kind_name(ParamKind kind);
std::optional<ParamKind> parse_param_kind(std::string_view text);

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::kString;
  nlohmann::json default_value;  // null when the parameter has no default
  bool required = false;

  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

struct WeightsSpec {
  std::string name;
  std::string extension;  // e.g. ".pt"

  std::string file_name() const { return name + extension; }
  friend bool operator==(const WeightsSpec&, const WeightsSpec&) = default;
};

enum class OutputKind { kImage, kMask, kLabel, kTabular };
enum class FileFormat { kPng, kCsv };

std::string_view output_kind_name(OutputKind kind);
std::string_view file_format_name(FileFormat format);

struct OutputSpec {
  OutputKind kind = OutputKind::kImage;
  FileFormat format = FileFormat::kPng;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ConditionSpec {
  std::string name;
  std::vector<nlohmann::json> values;

  friend bool operator==(const ConditionSpec&, const ConditionSpec&) = default;
};

inline constexpr std::string_view kLatentParam = "input_latent_vector";

// In-package contract, stored as JSON in `model.manifest` at the archive
// root. `entrypoint` is a shell command template run from the unpacked
// package directory; `{request}` and `{package_dir}` are substituted.
struct ModelManifest {
  ModelId model_id;
  std::string entrypoint;
  std::string generate_method_name = "generate";
  std::vector<ParamSpec> params;
  WeightsSpec weights;
  std::vector<OutputSpec> outputs;
  std::optional<int> latent_dim;
  std::optional<ConditionSpec> condition;
  std::vector<std::string> dependencies;

  const ParamSpec* find_param(std::string_view name) const;
  friend bool operator==(const ModelManifest&, const ModelManifest&) = default;
};

// Throws Error(kManifestInvalid) naming the offending field.
ModelManifest parse_manifest(const nlohmann::json& doc);
ModelManifest parse_manifest_text(std::string_view text);
ModelManifest load_manifest(const std::filesystem::path& package_dir);
nlohmann::json manifest_to_json(const ModelManifest& manifest);

// Structural checks; with a package_dir also checks that the weights file
// exists there.
ValidationReport validate_manifest(
    const ModelManifest& manifest,
    const std::optional<std::filesystem::path>& package_dir = std::nullopt);

bool value_matches_kind(ParamKind kind, const nlohmann::json& value);

// Parses CLI text ("3", "0.5", "true", "0.1,0.2") into a value of kind.
// Throws kValidation.
nlohmann::json parse_param_text(ParamKind kind, std::string_view text);

}  // namespace genhub
