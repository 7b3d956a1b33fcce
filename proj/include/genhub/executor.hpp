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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "genhub/manifest.hpp"
#include "genhub/package_store.hpp"
#include "genhub/registry.hpp"
#include "genhub/search.hpp"
#include "genhub/transport.hpp"

namespace genhub {

inline constexpr int kDefaultChunkSize = 32;
inline constexpr std::chrono::milliseconds kDefaultChunkTimeout{600'000};

struct HubConfig {
  std::string registry_source = std::string(kDefaultRegistryPath);
  std::filesystem::path cache_root;  // empty: default_cache_root()
  int chunk_size = kDefaultChunkSize;
  std::chrono::milliseconds chunk_timeout = kDefaultChunkTimeout;
  // When set, unresolved dependencies are handed to installer_command
  // ("{dependency}" is substituted) before failing.
  bool install_dependencies = false;
  std::string installer_command;
  RetryPolicy retry;
  bool keep_failed_runs = false;

  // Defaults overridden by GENHUB_REGISTRY, GENHUB_CACHE, GENHUB_CHUNK_SIZE.
  static HubConfig from_env();
};

// Decides whether one opaque dependency string is satisfied.
using DependencyResolver = std::function<bool(const std::string& dependency)>;

// "numpy>=1.2" -> "numpy".
std::string dependency_name(const std::string& dependency);

// Default resolver: the dependency's name is an executable on $PATH.
bool path_dependency_resolver(const std::string& dependency);

// Sizes of consecutive chunks: all equal to chunk_size except possibly the
// last. Throws kValidation unless both arguments are positive.
std::vector<std::int64_t> plan_chunks(std::int64_t num_samples,
                                      std::int64_t chunk_size);

enum class HandleState { kUninitialized, kReady, kFailed };

// Lazily created execution context of one model; the Hub hands out a single
// shared instance per model id. Generate calls on one handle are serialized.
class ExecutorHandle {
 public:
  ExecutorHandle(ModelId id, CacheEntry entry, ModelManifest manifest)
      : model_id_(std::move(id)),
        cache_entry_(std::move(entry)),
        manifest_(std::move(manifest)),
        state_(HandleState::kReady) {}

  const ModelId& model_id() const { return model_id_; }
  const CacheEntry& cache_entry() const { return cache_entry_; }
  const ModelManifest& manifest() const { return manifest_; }
  HandleState state() const { return state_; }

 private:
  friend class Hub;
  ModelId model_id_;
  CacheEntry cache_entry_;
  ModelManifest manifest_;
  HandleState state_;
  std::mutex run_mutex_;
};

struct GenerateRequest {
  ModelId model_id;
  std::int64_t num_samples = 1;
  std::filesystem::path output_path;
  bool save_images = false;
  std::optional<std::uint64_t> seed;
  // Model-specific inputs; keys must be declared manifest params.
  std::map<std::string, nlohmann::json> kwargs;
  std::optional<int> chunk_size;  // falls back to HubConfig::chunk_size
};

struct SampleRecord {
  std::int64_t index = 0;
  std::map<std::string, std::filesystem::path> file_paths;  // by output kind
  std::map<std::string, std::string> payloads;  // when not saving to disk
  std::uint64_t seed_used = 0;
  int chunk_index = 0;
};

struct GenerateResult {
  std::vector<SampleRecord> records;
  std::int64_t wall_time_ms = 0;
  // Largest number of samples staged on disk at once (one chunk).
  std::int64_t peak_staged_samples = 0;
};

// {records: [{index, files: {kind: path}, seed_used, chunk_index}],
// wall_time_ms, num_samples}. With include_payloads, in-memory samples are
// added as base64 under "payloads".
nlohmann::json generate_result_to_json(const GenerateResult& result,
                                       bool include_payloads = false);

// `sample_00042.png` for single-output models, `sample_00042_mask.png`
// otherwise.
std::string sample_file_name(std::int64_t index, const ModelManifest& manifest,
                             const OutputSpec& output);

struct StageResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::int64_t millis = 0;
  std::string message;
};

// Stages in order: resolve, manifest, dependency, generate, output-schema.
struct TestReport {
  ModelId model_id;
  std::vector<StageResult> stages;

  bool passed() const;
  const StageResult* stage(std::string_view name) const;
  nlohmann::json to_json() const;
};

class Hub;

// Per-call overrides for a GenerateCallable.
struct CallOptions {
  std::optional<std::int64_t> num_samples;
  std::optional<std::filesystem::path> output_path;
  std::optional<bool> save_images;
  std::optional<std::uint64_t> seed;
  std::optional<int> chunk_size;
  std::map<std::string, nlohmann::json> kwargs;
};

// A model's generate routine with the manifest defaults pre-bound.
class GenerateCallable {
 public:
  GenerateCallable(Hub& hub, GenerateRequest bound) : hub_(&hub), bound_(std::move(bound)) {}

  GenerateResult operator()(const CallOptions& options = {}) const;
  const GenerateRequest& bound() const { return bound_; }

 private:
  Hub* hub_;
  GenerateRequest bound_;
};

// Pull-based stream of in-memory batches. Each pull runs one generate call
// of at most batch_size samples; nothing beyond the current batch is held.
class SampleIterator {
 public:
  SampleIterator(Hub& hub, ModelId id, std::int64_t batch_size,
                 std::optional<std::int64_t> total,
                 std::optional<std::uint64_t> seed,
                 std::map<std::string, nlohmann::json> kwargs = {});

  // nullopt at end of stream.
  std::optional<std::vector<SampleRecord>> next();
  bool exhausted() const;
  std::int64_t produced() const { return produced_; }

 private:
  Hub* hub_;
  ModelId model_id_;
  std::int64_t batch_size_;
  std::optional<std::int64_t> total_;
  std::optional<std::uint64_t> seed_;
  std::map<std::string, nlohmann::json> kwargs_;
  std::int64_t produced_ = 0;
  std::uint64_t batch_index_ = 0;
};

// Facade over registry, search, package cache and execution. Thread-safe.
class Hub {
 public:
  Hub(HubConfig config, RegistryIndex index,
      std::shared_ptr<Transport> transport = nullptr);
  Hub(const Hub&) = delete;
  Hub& operator=(const Hub&) = delete;

  // Loads the registry from config.registry_source (path or URL).
  static std::unique_ptr<Hub> open(HubConfig config,
                                   std::shared_ptr<Transport> transport = nullptr);

  const HubConfig& config() const { return config_; }
  std::shared_ptr<const RegistryIndex> index() const;
  void replace_index(RegistryIndex index);
  PackageStore& store() { return store_; }
  void set_dependency_resolver(DependencyResolver resolver);

  ModelMetadata metadata(const ModelId& id) const;
  MatchCandidates find_models(const SearchQuery& query) const;
  RankedList rank_models(std::string_view metric_path, SortOrder order,
                         const std::optional<std::vector<ModelId>>& ids = {}) const;
  RankedList find_rank(const SearchQuery& query, std::string_view metric_path,
                       SortOrder order) const;

  // First call resolves the package, parses the manifest and checks
  // dependencies; later calls return the same handle.
  std::shared_ptr<ExecutorHandle> init_executor(const ModelId& id);
  bool is_initialized(const ModelId& id) const;

  GenerateResult generate(const GenerateRequest& request);
  GenerateCallable get_generate_callable(const ModelId& id);
  SampleIterator sample_iterator(const ModelId& id, std::int64_t batch_size,
                                 std::optional<std::int64_t> total = std::nullopt,
                                 std::optional<std::uint64_t> seed = std::nullopt);

  // End-to-end check: init and generate(num_samples=3, seed=0) into a temp
  // dir. Never throws for model failures; they are report content.
  TestReport test_model(const ModelId& id);

 private:
  struct ChunkOutput;

  CacheEntry resolve_package(const ModelId& id);
  void check_dependencies(const ModelMetadata& meta, const ModelManifest& manifest);
  std::map<std::string, nlohmann::json> resolve_params(
      const ModelManifest& manifest, const GenerateRequest& request) const;
  ChunkOutput run_chunk(ExecutorHandle& handle, const nlohmann::json& request_doc,
                        int chunk_index);
  void discard_run(const std::filesystem::path& run_dir, bool failed) const;

  HubConfig config_;
  std::shared_ptr<Transport> transport_;
  PackageStore store_;
  mutable std::mutex mutex_;
  std::shared_ptr<const RegistryIndex> index_;
  std::map<ModelId, std::shared_ptr<ExecutorHandle>> handles_;
  std::map<ModelId, std::shared_ptr<std::mutex>> init_locks_;
  DependencyResolver resolver_;
};

// Protocol-level findings for one chunk response: every listed file exists
// under output_dir and nothing unlisted was written.
ValidationReport check_chunk_protocol(const nlohmann::json& response,
                                      const std::filesystem::path& output_dir);

// Shape findings: sample count, index set, declared output kinds and file
// formats.
ValidationReport check_output_schema(const nlohmann::json& response,
                                     const ModelManifest& manifest,
                                     std::int64_t expected_samples);

}  // namespace genhub
