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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "genhub/executor.hpp"
#include "genhub/manifest.hpp"
#include "genhub/registry.hpp"
#include "genhub/transport.hpp"

namespace genhub {

// Everything a contributor supplies. When package_dir already holds a
// model.manifest it is used as is; otherwise one is synthesized from the
// entrypoint, weights, params and outputs fields.
struct ContributionInput {
  ModelId model_id;
  std::filesystem::path package_dir;
  std::string entrypoint;
  std::string generate_method_name = "generate";
  std::string weights_name;
  std::string weights_extension;
  std::vector<std::string> dependencies;
  std::string storage_token;
  std::string tracker_token;

  std::vector<std::string> keywords;
  std::string modality;
  std::string organ;
  nlohmann::json metrics = nlohmann::json::object();
  nlohmann::json image_size = nlohmann::json::array();
  std::string title;
  std::string training_dataset;
  std::string license;
  std::string date;
  std::string publication;

  std::vector<ParamSpec> params;
  std::vector<OutputSpec> outputs;  // empty: one png image
  std::optional<int> latent_dim;
};

// Findings at model_id, package_dir, entrypoint, weights and manifest.*.
// With require_tokens, empty tokens are findings at storage_token and
// tracker_token.
ValidationReport validate_contribution(const ContributionInput& input,
                                       bool require_tokens = false);

// The package's own manifest, or one synthesized from input.
ModelManifest resolve_manifest(const ContributionInput& input);

// Execution section from the manifest; package_url and checksum_sha256 stay
// empty until a storage receipt fills them. Throws kValidation for any
// finding outside those deferred fields.
ModelMetadata build_metadata(const ContributionInput& input,
                             const ModelManifest& manifest);

struct PackagedArchive {
  std::filesystem::path path;
  std::string checksum_sha256;
  std::int64_t size_bytes = 0;
};

// Deterministic ZIP of every file under package_dir. Throws kValidation
// when the directory is missing, empty, or lacks model.manifest.
PackagedArchive package_model(const std::filesystem::path& package_dir,
                              const std::filesystem::path& archive_path);

struct StorageReceipt {
  std::string record_id;
  std::string download_url;
  std::string checksum_sha256;
  std::int64_t size_bytes = 0;
};

class StorageClient {
 public:
  virtual ~StorageClient() = default;
  virtual StorageReceipt upload(const PackagedArchive& archive,
                                const ModelId& model_id) = 0;
};

// POST <base>/records (multipart field "archive") with a bearer token.
// 401/403 -> kAuth, 413 -> kQuota, 5xx and connection failures are retried.
class HttpStorageClient : public StorageClient {
 public:
  HttpStorageClient(std::string base_url, std::string token, RetryPolicy retry = {});
  StorageReceipt upload(const PackagedArchive& archive, const ModelId& model_id) override;

 private:
  std::string base_url_;
  std::string token_;
  RetryPolicy retry_;
};

// Uploads and checks that the receipt's checksum matches the archive
// (kChecksumMismatch otherwise).
StorageReceipt upload(const PackagedArchive& archive, const ModelId& model_id,
                      StorageClient& client);

class TrackerClient {
 public:
  virtual ~TrackerClient() = default;
  // Returns the new issue id.
  virtual std::string create_issue(const std::string& title, const std::string& body) = 0;
};

// POST <base>/issues {title, body} with a bearer token.
class HttpTrackerClient : public TrackerClient {
 public:
  HttpTrackerClient(std::string base_url, std::string token, RetryPolicy retry = {});
  std::string create_issue(const std::string& title, const std::string& body) override;

 private:
  std::string base_url_;
  std::string token_;
  RetryPolicy retry_;
};

enum class SubmissionStatus { kOpen, kMerged, kRejected };
std::string_view submission_status_name(SubmissionStatus status);

struct Submission {
  ModelId model_id;
  ModelMetadata metadata;
  StorageReceipt receipt;
  SubmissionStatus status = SubmissionStatus::kOpen;
  std::string created_at;
  std::string issue_id;
  ValidationReport findings;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

// Fills the deferred execution fields from the receipt and opens a tracker
// issue carrying the metadata document. Metadata that fails validate_entry
// comes back kRejected without any network traffic. An id already present
// in current_index is a warning only.
Submission submit(const ModelMetadata& metadata, const StorageReceipt& receipt,
                  TrackerClient& tracker,
                  const RegistryIndex* current_index = nullptr);

struct ContributeOptions {
  std::filesystem::path work_dir;  // empty: a temp dir
  bool run_test = true;
  HubConfig test_config;  // cache_root is overridden with a temp dir
  const RegistryIndex* current_index = nullptr;
};

struct ContributionResult {
  ModelManifest manifest;
  PackagedArchive archive;
  std::optional<TestReport> test;
  StorageReceipt receipt;
  Submission submission;
};

// validate -> manifest -> metadata -> package -> local test -> upload ->
// submit. Throws kValidation when validation or the local test fails.
ContributionResult contribute(const ContributionInput& input, StorageClient& storage,
                              TrackerClient& tracker, const ContributeOptions& options = {});

struct PipelineReport {
  std::vector<TestReport> rows;  // ordered by model id
  std::vector<std::string> warnings;
  std::int64_t wall_time_ms = 0;

  bool passed() const;
  std::size_t passed_count() const;
  nlohmann::json to_json() const;
};

// test_model for every registry entry, up to parallelism at a time.
PipelineReport test_all(Hub& hub, int parallelism = 4);

}  // namespace genhub
