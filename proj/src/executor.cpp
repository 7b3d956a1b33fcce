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

#include "genhub/executor.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <set>

#include "genhub/digest.hpp"
#include "genhub/error.hpp"
#include "genhub/fs_util.hpp"
#include "genhub/process.hpp"

namespace genhub {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

std::int64_t millis_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start)
      .count();
}

HubConfig normalized(HubConfig config) {
  if (config.cache_root.empty()) config.cache_root = default_cache_root();
  if (config.chunk_size <= 0) config.chunk_size = kDefaultChunkSize;
  return config;
}

std::string replace_all(std::string text, const std::string& token,
                        const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string::npos) {
    text.replace(pos, token.size(), value);
    pos += value.size();
  }
  return text;
}

bool safe_relative(const std::string& rel) {
  if (rel.empty() || rel.front() == '/') return false;
  for (const auto& part : fs::path(rel)) {
    if (part == "..") return false;
  }
  return true;
}

void move_file(const fs::path& from, const fs::path& to) {
  std::error_code ec;
  fs::rename(from, to, ec);
  if (!ec) return;
  fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot move " + from.string() + " to " + to.string());
  fs::remove(from, ec);
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32 | rd()) & 0x7fffffffffffffffULL;
}

[[noreturn]] void protocol_violation(const std::string& what,
                                     const ValidationReport& report,
                                     const fs::path& log) {
  json findings = json::array();
  for (const auto& f : report.findings) {
    findings.push_back({{"path", f.path}, {"message", f.message}});
  }
  throw Error(ErrorKind::kProtocolViolation, what + ": " + report.summary(),
              json{{"findings", findings}, {"log_tail", file_tail(log)}});
}

}  // namespace

// ---------------------------------------------------------------------------
// Free helpers

HubConfig HubConfig::from_env() {
  HubConfig c;
  if (const char* v = std::getenv("GENHUB_REGISTRY"); v && *v) c.registry_source = v;
  if (const char* v = std::getenv("GENHUB_CACHE"); v && *v) c.cache_root = expand_home(v);
  if (const char* v = std::getenv("GENHUB_CHUNK_SIZE"); v && *v) {
    const int n = std::atoi(v);
    if (n > 0) c.chunk_size = n;
  }
  return c;
}

std::string dependency_name(const std::string& dependency) {
  const auto end = dependency.find_first_of("<>=!~ ;[");
  std::string name = dependency.substr(0, end);
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) {
    name.pop_back();
  }
  return name;
}

bool path_dependency_resolver(const std::string& dependency) {
  return !find_executable(dependency_name(dependency)).empty();
}

std::vector<std::int64_t> plan_chunks(std::int64_t num_samples,
                                      std::int64_t chunk_size) {
  if (num_samples <= 0 || chunk_size <= 0) {
    throw Error(ErrorKind::kValidation,
                "num_samples and chunk_size must be positive");
  }
  std::vector<std::int64_t> out(static_cast<std::size_t>(num_samples / chunk_size),
                                chunk_size);
  if (num_samples % chunk_size != 0) out.push_back(num_samples % chunk_size);
  return out;
}

std::string sample_file_name(std::int64_t index, const ModelManifest& manifest,
                             const OutputSpec& output) {
  char base[32];
  std::snprintf(base, sizeof(base), "sample_%05lld", static_cast<long long>(index));
  std::string name = base;
  if (manifest.outputs.size() > 1) {
    name += "_";
    name += output_kind_name(output.kind);
  }
  name += ".";
  name += file_format_name(output.format);
  return name;
}

json generate_result_to_json(const GenerateResult& result, bool include_payloads) {
  json records = json::array();
  for (const auto& r : result.records) {
    json files = json::object();
    for (const auto& [kind, path] : r.file_paths) files[kind] = path.string();
    json rec{{"index", r.index},
             {"files", files},
             {"seed_used", r.seed_used},
             {"chunk_index", r.chunk_index}};
    if (include_payloads) {
      json payloads = json::object();
      for (const auto& [kind, bytes] : r.payloads) payloads[kind] = base64_encode(bytes);
      rec["payloads"] = payloads;
    }
    records.push_back(std::move(rec));
  }
  return json{{"num_samples", result.records.size()},
              {"records", records},
              {"wall_time_ms", result.wall_time_ms}};
}

bool TestReport::passed() const {
  if (stages.empty()) return false;
  return std::all_of(stages.begin(), stages.end(),
                     [](const StageResult& s) { return s.passed; });
}

const StageResult* TestReport::stage(std::string_view name) const {
  for (const auto& s : stages) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

json TestReport::to_json() const {
  json stages_json = json::array();
  for (const auto& s : stages) {
    stages_json.push_back({{"name", s.name},
                           {"passed", s.passed},
                           {"skipped", s.skipped},
                           {"millis", s.millis},
                           {"message", s.message}});
  }
  return json{{"model_id", model_id.str()}, {"passed", passed()}, {"stages", stages_json}};
}

ValidationReport check_chunk_protocol(const json& response,
                                      const fs::path& output_dir) {
  ValidationReport r;
  auto& f = r.findings;
  if (!response.is_object()) {
    f.push_back({"$", "response must be an object"});
    return r;
  }
  if (response.value("status", "") != "ok") {
    f.push_back({"status", "expected \"ok\""});
  }
  auto samples = response.find("samples");
  if (samples == response.end() || !samples->is_array()) {
    f.push_back({"samples", "expected a list"});
    return r;
  }

  std::set<std::string> listed;
  for (std::size_t i = 0; i < samples->size(); ++i) {
    const json& s = (*samples)[i];
    const std::string path = "samples[" + std::to_string(i) + "]";
    if (!s.is_object() || !s.contains("index") || !s["index"].is_number_integer()) {
      f.push_back({path + ".index", "expected an integer index"});
      continue;
    }
    auto files = s.find("files");
    if (files == s.end() || !files->is_object()) {
      f.push_back({path + ".files", "expected an object"});
      continue;
    }
    for (const auto& [kind, rel] : files->items()) {
      const std::string fpath = path + ".files." + kind;
      if (!rel.is_string() || !safe_relative(rel.get<std::string>())) {
        f.push_back({fpath, "expected a relative path inside output_dir"});
        continue;
      }
      const fs::path full = output_dir / rel.get<std::string>();
      std::error_code ec;
      if (!fs::is_regular_file(full, ec)) {
        f.push_back({fpath, "listed file " + rel.get<std::string>() + " was not written"});
        continue;
      }
      listed.insert(fs::path(rel.get<std::string>()).lexically_normal().generic_string());
    }
  }

  std::error_code ec;
  if (fs::exists(output_dir, ec)) {
    for (const auto& item : fs::recursive_directory_iterator(output_dir)) {
      if (!item.is_regular_file()) continue;
      const std::string rel =
          fs::relative(item.path(), output_dir).lexically_normal().generic_string();
      if (!listed.count(rel)) f.push_back({"output_dir", "unlisted file " + rel});
    }
  }
  return r;
}

ValidationReport check_output_schema(const json& response,
                                     const ModelManifest& manifest,
                                     std::int64_t expected_samples) {
  ValidationReport r;
  auto& f = r.findings;
  const json samples = response.is_object() ? response.value("samples", json::array())
                                            : json::array();
  if (static_cast<std::int64_t>(samples.size()) != expected_samples) {
    f.push_back({"samples", "expected " + std::to_string(expected_samples) +
                                " samples, got " + std::to_string(samples.size())});
  }
  std::set<std::int64_t> indices;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const json& s = samples[i];
    const std::string path = "samples[" + std::to_string(i) + "]";
    if (!s.is_object()) continue;
    if (s.contains("index") && s["index"].is_number_integer()) {
      const auto idx = s["index"].get<std::int64_t>();
      if (idx < 0 || idx >= expected_samples || !indices.insert(idx).second) {
        f.push_back({path + ".index", "index " + std::to_string(idx) +
                                          " out of range or repeated"});
      }
    }
    const json files = s.value("files", json::object());
    if (files.size() != manifest.outputs.size()) {
      f.push_back({path + ".files", "expected " + std::to_string(manifest.outputs.size()) +
                                        " declared outputs, got " +
                                        std::to_string(files.size())});
    }
    for (const auto& out : manifest.outputs) {
      const std::string kind(output_kind_name(out.kind));
      auto it = files.find(kind);
      if (it == files.end() || !it->is_string()) {
        f.push_back({path + ".files." + kind, "declared output missing"});
        continue;
      }
      const std::string ext = fs::path(it->get<std::string>()).extension().string();
      if (ext != "." + std::string(file_format_name(out.format))) {
        f.push_back({path + ".files." + kind,
                     "expected ." + std::string(file_format_name(out.format)) +
                         " file, got '" + ext + "'"});
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Hub

struct Hub::ChunkOutput {
  fs::path run_dir;
  fs::path output_dir;
  json response;
};

Hub::Hub(HubConfig config, RegistryIndex index, std::shared_ptr<Transport> transport)
    : config_(normalized(std::move(config))),
      transport_(transport ? std::move(transport) : std::make_shared<DefaultTransport>()),
      store_(config_.cache_root, transport_, config_.retry),
      index_(std::make_shared<const RegistryIndex>(std::move(index))),
      resolver_(path_dependency_resolver) {}

std::unique_ptr<Hub> Hub::open(HubConfig config, std::shared_ptr<Transport> transport) {
  if (!transport) transport = std::make_shared<DefaultTransport>();
  RegistryIndex index = load_index(read_source(config.registry_source, *transport));
  return std::make_unique<Hub>(std::move(config), std::move(index), std::move(transport));
}

std::shared_ptr<const RegistryIndex> Hub::index() const {
  std::lock_guard lock(mutex_);
  return index_;
}

void Hub::replace_index(RegistryIndex index) {
  auto next = std::make_shared<const RegistryIndex>(std::move(index));
  std::lock_guard lock(mutex_);
  // Handles whose registry entry changed must be re-resolved.
  for (auto it = handles_.begin(); it != handles_.end();) {
    auto old_it = index_->models().find(it->first);
    auto new_it = next->models().find(it->first);
    const bool same = old_it != index_->models().end() &&
                      new_it != next->models().end() &&
                      old_it->second.execution == new_it->second.execution;
    it = same ? std::next(it) : handles_.erase(it);
  }
  index_ = std::move(next);
}

void Hub::set_dependency_resolver(DependencyResolver resolver) {
  std::lock_guard lock(mutex_);
  resolver_ = resolver ? std::move(resolver) : DependencyResolver(path_dependency_resolver);
}

ModelMetadata Hub::metadata(const ModelId& id) const {
  return get_metadata(*index(), id);
}

MatchCandidates Hub::find_models(const SearchQuery& query) const {
  return genhub::find_models(*index(), query);
}

RankedList Hub::rank_models(std::string_view metric_path, SortOrder order,
                            const std::optional<std::vector<ModelId>>& ids) const {
  return genhub::rank_models(*index(), metric_path, order, ids);
}

RankedList Hub::find_rank(const SearchQuery& query, std::string_view metric_path,
                          SortOrder order) const {
  return genhub::find_rank(*index(), query, metric_path, order);
}

CacheEntry Hub::resolve_package(const ModelId& id) {
  const ModelMetadata meta = metadata(id);
  try {
    return store_.ensure_present(PackageRef::from(meta));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kMissingManifest) {
      throw Error(ErrorKind::kManifestInvalid, e.what(), e.detail());
    }
    throw;
  }
}

void Hub::check_dependencies(const ModelMetadata& meta, const ModelManifest& manifest) {
  std::vector<std::string> deps = manifest.dependencies;
  for (const auto& d : meta.execution.dependencies) {
    if (std::find(deps.begin(), deps.end(), d) == deps.end()) deps.push_back(d);
  }
  DependencyResolver resolver;
  {
    std::lock_guard lock(mutex_);
    resolver = resolver_;
  }
  std::vector<std::string> missing;
  for (const auto& d : deps) {
    if (resolver(d)) continue;
    if (config_.install_dependencies && !config_.installer_command.empty()) {
      TempDir tmp("genhub-install");
      const std::string cmd =
          replace_all(config_.installer_command, "{dependency}", shell_quote(d));
      run_shell(cmd, tmp.path(), tmp.path() / "install.log", config_.chunk_timeout);
      if (resolver(d)) continue;
    }
    missing.push_back(d);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::kDependencyUnsatisfied,
                "unsatisfied dependencies for " + meta.model_id.str() + ": " + list,
                json{{"model_id", meta.model_id.str()}, {"missing", missing}});
  }
}

std::shared_ptr<ExecutorHandle> Hub::init_executor(const ModelId& id) {
  std::shared_ptr<std::mutex> init_lock;
  {
    std::lock_guard lock(mutex_);
    if (auto it = handles_.find(id); it != handles_.end()) return it->second;
    if (!index_->contains(id)) {
      throw Error(ErrorKind::kUnknownModel, "unknown model " + id.str(),
                  json{{"model_id", id.str()}});
    }
    auto& slot = init_locks_[id];
    if (!slot) slot = std::make_shared<std::mutex>();
    init_lock = slot;
  }
  std::lock_guard init_guard(*init_lock);
  {
    std::lock_guard lock(mutex_);
    if (auto it = handles_.find(id); it != handles_.end()) return it->second;
  }

  const ModelMetadata meta = metadata(id);
  CacheEntry entry = resolve_package(id);
  ModelManifest manifest = load_manifest(entry.unpacked_dir);
  ValidationReport report = validate_manifest(manifest, entry.unpacked_dir);
  if (manifest.model_id != id) {
    report.findings.push_back({"model_id", "manifest declares " + manifest.model_id.str()});
  }
  if (!report.ok()) {
    throw Error(ErrorKind::kManifestInvalid,
                "manifest of " + id.str() + " is invalid: " + report.summary());
  }
  check_dependencies(meta, manifest);

  auto handle = std::make_shared<ExecutorHandle>(id, std::move(entry), std::move(manifest));
  std::lock_guard lock(mutex_);
  handles_[id] = handle;
  return handle;
}

bool Hub::is_initialized(const ModelId& id) const {
  std::lock_guard lock(mutex_);
  return handles_.count(id) != 0;
}

std::map<std::string, json> Hub::resolve_params(const ModelManifest& manifest,
                                                const GenerateRequest& request) const {
  for (const auto& [name, value] : request.kwargs) {
    const ParamSpec* spec = manifest.find_param(name);
    if (!spec) {
      throw Error(ErrorKind::kValidation,
                  "model " + manifest.model_id.str() + " has no parameter '" + name + "'",
                  json{{"parameter", name}});
    }
    if (!value_matches_kind(spec->kind, value)) {
      throw Error(ErrorKind::kValidation,
                  "parameter '" + name + "' expects " +
                      std::string(param_kind_name(spec->kind)),
                  json{{"parameter", name}});
    }
  }

  std::map<std::string, json> out;
  for (const auto& p : manifest.params) {
    auto it = request.kwargs.find(p.name);
    if (it != request.kwargs.end()) {
      out[p.name] = it->second;
    } else if (!p.default_value.is_null()) {
      out[p.name] = p.default_value;
    } else if (p.required) {
      throw Error(ErrorKind::kValidation, "missing required parameter '" + p.name + "'",
                  json{{"parameter", p.name}});
    }
    if (p.kind == ParamKind::kPath && out.count(p.name)) {
      const fs::path v = out[p.name].get<std::string>();
      if (!v.empty() && v.is_relative()) out[p.name] = fs::absolute(v).string();
    }
  }

  if (manifest.latent_dim) {
    if (auto it = out.find(std::string(kLatentParam)); it != out.end()) {
      const auto len = static_cast<std::int64_t>(it->second.size());
      const std::int64_t dim = *manifest.latent_dim;
      if (len != dim && len != dim * request.num_samples) {
        throw Error(ErrorKind::kValidation,
                    "input_latent_vector has length " + std::to_string(len) +
                        "; expected " + std::to_string(dim) + " or " +
                        std::to_string(dim * request.num_samples),
                    json{{"parameter", kLatentParam}, {"latent_dim", dim}});
      }
    }
  }
  if (manifest.condition && !manifest.condition->values.empty()) {
    if (auto it = out.find(manifest.condition->name); it != out.end()) {
      const auto& allowed = manifest.condition->values;
      if (std::find(allowed.begin(), allowed.end(), it->second) == allowed.end()) {
        throw Error(ErrorKind::kValidation,
                    "condition '" + manifest.condition->name + "' value not allowed",
                    json{{"parameter", manifest.condition->name}});
      }
    }
  }
  return out;
}

void Hub::discard_run(const fs::path& run_dir, bool failed) const {
  if (failed && config_.keep_failed_runs) return;
  std::error_code ec;
  fs::remove_all(run_dir, ec);
}

Hub::ChunkOutput Hub::run_chunk(ExecutorHandle& handle, const json& request_doc,
                                int chunk_index) {
  const fs::path runs = config_.cache_root / "runs";
  ChunkOutput out;
  out.run_dir = fs::absolute(runs / ("run_" + random_hex_id()));
  out.output_dir = out.run_dir / "out";
  fs::create_directories(out.output_dir);

  json doc = request_doc;
  doc["output_dir"] = out.output_dir.string();
  doc["response_path"] = (out.run_dir / "response.json").string();
  const fs::path request_path = out.run_dir / "request.json";
  write_file_atomic(request_path, doc.dump(2) + "\n");

  const fs::path package_dir = handle.cache_entry().unpacked_dir;
  std::string command = handle.manifest().entrypoint;
  command = replace_all(command, "{request}", shell_quote(request_path.string()));
  command = replace_all(command, "{package_dir}", shell_quote(package_dir.string()));

  const fs::path log = out.run_dir / "run.log";
  const ProcessResult proc = run_shell(command, package_dir, log, config_.chunk_timeout);
  if (proc.timed_out) {
    const std::string tail = file_tail(log);
    discard_run(out.run_dir, true);
    throw Error(ErrorKind::kTimeout,
                "chunk " + std::to_string(chunk_index) + " of " +
                    handle.model_id().str() + " timed out",
                json{{"chunk_index", chunk_index}, {"log_tail", tail}});
  }
  if (proc.exit_code != 0) {
    const std::string tail = file_tail(log);
    discard_run(out.run_dir, true);
    throw Error(ErrorKind::kSubprocessFailed,
                "entrypoint of " + handle.model_id().str() + " exited with status " +
                    std::to_string(proc.exit_code) + ": " + tail,
                json{{"exit_code", proc.exit_code},
                     {"chunk_index", chunk_index},
                     {"log_tail", tail}});
  }

  const fs::path response_path = out.run_dir / "response.json";
  try {
    out.response = json::parse(read_file(response_path));
  } catch (const std::exception& e) {
    const std::string tail = file_tail(log);
    discard_run(out.run_dir, true);
    throw Error(ErrorKind::kProtocolViolation,
                "missing or malformed response.json from " + handle.model_id().str(),
                json{{"log_tail", tail}});
  }
  const ValidationReport protocol = check_chunk_protocol(out.response, out.output_dir);
  if (!protocol.ok()) {
    discard_run(out.run_dir, true);
    protocol_violation("protocol violation by " + handle.model_id().str(), protocol, log);
  }
  return out;
}

GenerateResult Hub::generate(const GenerateRequest& request) {
  const auto start = Clock::now();
  if (request.num_samples <= 0) {
    throw Error(ErrorKind::kValidation, "num_samples must be positive");
  }
  auto handle = init_executor(request.model_id);
  const ModelManifest& manifest = handle->manifest();
  const std::map<std::string, json> params = resolve_params(manifest, request);
  const int chunk_size = request.chunk_size.value_or(config_.chunk_size);
  const auto plan = plan_chunks(request.num_samples, chunk_size);
  const std::uint64_t seed = request.seed ? *request.seed : fresh_seed();

  std::optional<TempDir> scratch;
  fs::path dest;
  if (request.save_images) {
    if (request.output_path.empty()) {
      throw Error(ErrorKind::kValidation, "output_path is required when saving samples");
    }
    dest = fs::absolute(request.output_path);
    fs::create_directories(dest);
  } else {
    scratch.emplace("genhub-samples");
    dest = scratch->path();
  }

  // A latent vector covering every sample is split along chunk boundaries.
  const json* latent = nullptr;
  if (auto it = params.find(std::string(kLatentParam)); it != params.end() && manifest.latent_dim) {
    if (static_cast<std::int64_t>(it->second.size()) != *manifest.latent_dim) latent = &it->second;
  }

  fs::path weights_path = handle->cache_entry().unpacked_dir / manifest.weights.file_name();
  if (auto it = params.find("weights_path"); it != params.end() && it->second.is_string()) {
    weights_path = it->second.get<std::string>();
  }

  GenerateResult result;
  std::lock_guard run_guard(handle->run_mutex_);
  std::int64_t offset = 0;
  for (std::size_t ci = 0; ci < plan.size(); ++ci) {
    const std::int64_t n = plan[ci];
    const int chunk_index = static_cast<int>(ci);
    json chunk_params = json::object();
    for (const auto& [k, v] : params) chunk_params[k] = v;
    if (latent) {
      const std::int64_t dim = *manifest.latent_dim;
      chunk_params[std::string(kLatentParam)] =
          json(latent->begin() + offset * dim, latent->begin() + (offset + n) * dim);
    }
    const std::uint64_t chunk_seed = seed + ci;
    const json doc{{"model_id", request.model_id.str()},
                   {"num_samples", n},
                   {"seed", chunk_seed},
                   {"base_seed", seed},
                   {"chunk_index", chunk_index},
                   {"sample_offset", offset},
                   {"generate_method_name", manifest.generate_method_name},
                   {"params", chunk_params},
                   {"weights_path", weights_path.string()},
                   {"package_dir", handle->cache_entry().unpacked_dir.string()}};

    ChunkOutput out = run_chunk(*handle, doc, chunk_index);
    const ValidationReport schema = check_output_schema(out.response, manifest, n);
    if (!schema.ok()) {
      discard_run(out.run_dir, true);
      protocol_violation("output of " + request.model_id.str() + " does not match its manifest",
                         schema, out.run_dir / "run.log");
    }

    std::vector<json> samples(out.response["samples"].begin(), out.response["samples"].end());
    std::sort(samples.begin(), samples.end(), [](const json& a, const json& b) {
      return a["index"].get<std::int64_t>() < b["index"].get<std::int64_t>();
    });
    result.peak_staged_samples = std::max<std::int64_t>(result.peak_staged_samples, n);
    for (const json& s : samples) {
      SampleRecord rec;
      rec.index = offset + s["index"].get<std::int64_t>();
      rec.seed_used = chunk_seed;
      rec.chunk_index = chunk_index;
      for (const auto& spec : manifest.outputs) {
        const std::string kind(output_kind_name(spec.kind));
        const fs::path src = out.output_dir / s["files"][kind].get<std::string>();
        const fs::path target = dest / sample_file_name(rec.index, manifest, spec);
        move_file(src, target);
        if (request.save_images) {
          rec.file_paths[kind] = target;
        } else {
          rec.payloads[kind] = read_file(target);
          std::error_code ec;
          fs::remove(target, ec);
        }
      }
      result.records.push_back(std::move(rec));
    }
    discard_run(out.run_dir, false);
    offset += n;
  }
  result.wall_time_ms = millis_since(start);
  return result;
}

GenerateCallable Hub::get_generate_callable(const ModelId& id) {
  auto handle = init_executor(id);
  GenerateRequest bound;
  bound.model_id = id;
  for (const auto& p : handle->manifest().params) {
    if (!p.default_value.is_null()) bound.kwargs[p.name] = p.default_value;
  }
  return GenerateCallable(*this, std::move(bound));
}

SampleIterator Hub::sample_iterator(const ModelId& id, std::int64_t batch_size,
                                    std::optional<std::int64_t> total,
                                    std::optional<std::uint64_t> seed) {
  return SampleIterator(*this, id, batch_size, total, seed);
}

TestReport Hub::test_model(const ModelId& id) {
  TestReport report;
  report.model_id = id;
  bool blocked = false;
  auto stage = [&](const char* name, const std::function<void()>& body) {
    StageResult s;
    s.name = name;
    if (blocked) {
      s.skipped = true;
      s.message = "skipped after an earlier failure";
      report.stages.push_back(std::move(s));
      return;
    }
    const auto start = Clock::now();
    try {
      body();
      s.passed = true;
    } catch (const Error& e) {
      s.message = std::string(kind_name(e.kind())) + ": " + e.what();
    } catch (const std::exception& e) {
      s.message = std::string("internal: ") + e.what();
    }
    s.millis = millis_since(start);
    if (!s.passed) blocked = true;
    report.stages.push_back(std::move(s));
  };

  ModelMetadata meta;
  CacheEntry entry;
  ModelManifest manifest;
  json response;
  stage("resolve", [&] {
    meta = metadata(id);
    entry = store_.ensure_present(PackageRef::from(meta));
  });
  stage("manifest", [&] {
    manifest = load_manifest(entry.unpacked_dir);
    ValidationReport r = validate_manifest(manifest, entry.unpacked_dir);
    if (manifest.model_id != id) r.findings.push_back({"model_id", "mismatch"});
    if (!r.ok()) throw Error(ErrorKind::kManifestInvalid, r.summary());
  });
  stage("dependency", [&] { check_dependencies(meta, manifest); });
  stage("generate", [&] {
    GenerateRequest req;
    req.model_id = id;
    req.num_samples = 3;
    req.seed = 0;
    const auto params = resolve_params(manifest, req);
    json p = json::object();
    for (const auto& [k, v] : params) p[k] = v;
    ExecutorHandle handle(id, entry, manifest);
    const json doc{{"model_id", id.str()},
                   {"num_samples", 3},
                   {"seed", 0},
                   {"base_seed", 0},
                   {"chunk_index", 0},
                   {"sample_offset", 0},
                   {"generate_method_name", manifest.generate_method_name},
                   {"params", p},
                   {"weights_path", (entry.unpacked_dir / manifest.weights.file_name()).string()},
                   {"package_dir", entry.unpacked_dir.string()}};
    ChunkOutput out = run_chunk(handle, doc, 0);
    response = out.response;
    discard_run(out.run_dir, false);
  });
  stage("output-schema", [&] {
    const ValidationReport r = check_output_schema(response, manifest, 3);
    if (!r.ok()) throw Error(ErrorKind::kProtocolViolation, r.summary());
  });
  return report;
}

// ---------------------------------------------------------------------------
// Callable and iterator

GenerateResult GenerateCallable::operator()(const CallOptions& options) const {
  GenerateRequest req = bound_;
  if (options.num_samples) req.num_samples = *options.num_samples;
  if (options.output_path) req.output_path = *options.output_path;
  if (options.save_images) req.save_images = *options.save_images;
  if (options.seed) req.seed = options.seed;
  if (options.chunk_size) req.chunk_size = options.chunk_size;
  for (const auto& [k, v] : options.kwargs) req.kwargs[k] = v;
  return hub_->generate(req);
}

SampleIterator::SampleIterator(Hub& hub, ModelId id, std::int64_t batch_size,
                               std::optional<std::int64_t> total,
                               std::optional<std::uint64_t> seed,
                               std::map<std::string, json> kwargs)
    : hub_(&hub),
      model_id_(std::move(id)),
      batch_size_(batch_size),
      total_(total),
      seed_(seed),
      kwargs_(std::move(kwargs)) {
  if (batch_size_ <= 0) throw Error(ErrorKind::kValidation, "batch_size must be positive");
  if (total_ && *total_ < 0) throw Error(ErrorKind::kValidation, "total must be non-negative");
}

bool SampleIterator::exhausted() const { return total_ && produced_ >= *total_; }

std::optional<std::vector<SampleRecord>> SampleIterator::next() {
  if (exhausted()) return std::nullopt;
  std::int64_t n = batch_size_;
  if (total_) n = std::min(n, *total_ - produced_);
  GenerateRequest req;
  req.model_id = model_id_;
  req.num_samples = n;
  req.save_images = false;
  req.kwargs = kwargs_;
  if (seed_) req.seed = *seed_ + batch_index_;
  GenerateResult res = hub_->generate(req);
  for (auto& rec : res.records) rec.index += produced_;
  produced_ += n;
  ++batch_index_;
  return std::move(res.records);
}

}  // namespace genhub
