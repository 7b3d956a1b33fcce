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

#include "genhub/contributor.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "genhub/digest.hpp"
#include "genhub/error.hpp"
#include "genhub/fs_util.hpp"
#include "genhub/process.hpp"
#include "genhub/zip_archive.hpp"

namespace genhub {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kPendingUrl = "pending://storage";
const std::string kPendingChecksum(64, '0');

bool is_executable_file(const fs::path& p) {
  std::error_code ec;
  return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

std::string first_word(const std::string& command) {
  std::istringstream in(command);
  std::string word;
  in >> word;
  return word;
}

std::string entrypoint_problem(const std::string& entrypoint, const fs::path& package_dir) {
  const std::string prog = first_word(entrypoint);
  if (prog.empty()) return "entrypoint command is empty";
  if (prog.find('/') != std::string::npos) {
    const fs::path p = fs::path(prog).is_absolute() ? fs::path(prog) : package_dir / prog;
    return is_executable_file(p) ? "" : prog + " is not an executable file in the package";
  }
  if (!find_executable(prog).empty() || is_executable_file(package_dir / prog)) return "";
  return prog + " is neither on PATH nor an executable in the package";
}

std::string map_manifest_path(const std::string& path) {
  for (std::string_view top : {"weights", "entrypoint", "model_id"}) {
    if (path.rfind(top, 0) == 0) return std::string(top);
  }
  return "manifest." + path;
}

bool has_manifest_file(const fs::path& dir) {
  std::error_code ec;
  return fs::is_regular_file(dir / kManifestFileName, ec);
}

bool is_packaged(const zip::Entry& e) {
  return e.name.find("__pycache__/") == std::string::npos &&
         !(e.name.size() > 4 && e.name.ends_with(".pyc"));
}

Headers auth(const std::string& token) {
  return {{"Authorization", "Bearer " + token}};
}

void raise_for_status(const HttpResponse& res, const std::string& what) {
  if (res.status >= 200 && res.status < 300) return;
  const json detail{{"status", res.status}, {"body", res.body.substr(0, 512)}};
  if (res.status == 401 || res.status == 403) {
    throw Error(ErrorKind::kAuth, what + " rejected the token (HTTP " +
                                      std::to_string(res.status) + ")", detail);
  }
  if (res.status == 413) {
    throw Error(ErrorKind::kQuota, what + " refused the archive size", detail);
  }
  json d = detail;
  d["retryable"] = res.status >= 500;
  throw Error(ErrorKind::kNetwork, what + " answered HTTP " + std::to_string(res.status), d);
}

json parse_body(const HttpResponse& res, const std::string& what) {
  try {
    return json::parse(res.body);
  } catch (const json::parse_error&) {
    throw Error(ErrorKind::kProtocolViolation, what + " returned a non-JSON body");
  }
}

}  // namespace

ValidationReport validate_contribution(const ContributionInput& input, bool require_tokens) {
  ValidationReport r;
  auto& f = r.findings;
  auto add = [&f](std::string path, std::string message) {
    for (const auto& existing : f) {
      if (existing.path == path && existing.message == message) return;
    }
    f.push_back({std::move(path), std::move(message)});
  };

  if (!input.model_id.valid()) {
    add("model_id", "'" + input.model_id.str() + "' does not match ^\\d{5}_[A-Z0-9_]+$");
  }
  std::error_code ec;
  const bool dir_ok = fs::is_directory(input.package_dir, ec);
  if (!dir_ok) {
    add("package_dir", input.package_dir.string() + " is not a directory");
  } else if (fs::is_empty(input.package_dir, ec)) {
    add("package_dir", input.package_dir.string() + " is empty");
  }
  if (require_tokens) {
    if (input.storage_token.empty()) add("storage_token", "must not be empty");
    if (input.tracker_token.empty()) add("tracker_token", "must not be empty");
  }
  if (!dir_ok) return r;

  ModelManifest manifest;
  try {
    manifest = resolve_manifest(input);
  } catch (const Error& e) {
    add("manifest", e.what());
    return r;
  }
  if (manifest.model_id != input.model_id && input.model_id.valid()) {
    add("manifest.model_id", "manifest names " + manifest.model_id.str());
  }
  for (const auto& finding : validate_manifest(manifest, input.package_dir).findings) {
    add(map_manifest_path(finding.path), finding.message);
  }
  if (!manifest.entrypoint.empty()) {
    if (auto problem = entrypoint_problem(manifest.entrypoint, input.package_dir);
        !problem.empty()) {
      add("entrypoint", problem);
    }
  }
  return r;
}

ModelManifest resolve_manifest(const ContributionInput& input) {
  if (has_manifest_file(input.package_dir)) return load_manifest(input.package_dir);
  ModelManifest m;
  m.model_id = input.model_id;
  m.entrypoint = input.entrypoint;
  m.generate_method_name = input.generate_method_name;
  m.params = input.params;
  m.weights = {input.weights_name, input.weights_extension};
  m.outputs = input.outputs.empty() ? std::vector<OutputSpec>{OutputSpec{}} : input.outputs;
  m.latent_dim = input.latent_dim;
  m.dependencies = input.dependencies;
  return m;
}

ModelMetadata build_metadata(const ContributionInput& input, const ModelManifest& manifest) {
  ModelMetadata meta;
  meta.model_id = input.model_id;
  auto& ex = meta.execution;
  ex.image_size = input.image_size;
  for (const auto& p : manifest.params) {
    if (!p.default_value.is_null()) ex.generate_defaults[p.name] = p.default_value;
  }
  ex.dependencies = input.dependencies.empty() ? manifest.dependencies : input.dependencies;
  ex.extension_weights = manifest.weights.extension;

  auto& sel = meta.selection;
  for (const auto& k : input.keywords) {
    std::string lower = k;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!lower.empty() && std::find(sel.keywords.begin(), sel.keywords.end(), lower) ==
                              sel.keywords.end()) {
      sel.keywords.push_back(lower);
    }
  }
  sel.modality = input.modality;
  sel.organ = input.organ;
  sel.metrics = input.metrics.is_null() ? json::object() : input.metrics;

  meta.description = {input.title, input.training_dataset, input.license, input.date,
                      input.publication};

  ModelMetadata probe = meta;
  probe.execution.package_url = std::string(kPendingUrl);
  probe.execution.checksum_sha256 = kPendingChecksum;
  const ValidationReport report = validate_entry(probe);
  if (!report.ok()) {
    json findings = json::array();
    for (const auto& fnd : report.findings) {
      findings.push_back({{"path", fnd.path}, {"message", fnd.message}});
    }
    throw Error(ErrorKind::kValidation, "metadata is incomplete: " + report.summary(),
                {{"findings", findings}});
  }
  return meta;
}

PackagedArchive package_model(const fs::path& package_dir, const fs::path& archive_path) {
  std::error_code ec;
  if (!fs::is_directory(package_dir, ec)) {
    throw Error(ErrorKind::kValidation, package_dir.string() + " is not a directory",
                {{"findings", {{{"path", "package_dir"}, {"message", "not a directory"}}}}});
  }
  std::vector<zip::Entry> entries = zip::collect_directory(package_dir);
  std::erase_if(entries, [](const zip::Entry& e) { return !is_packaged(e); });
  if (entries.empty()) {
    throw Error(ErrorKind::kValidation, package_dir.string() + " is empty",
                {{"findings", {{{"path", "package_dir"}, {"message", "empty"}}}}});
  }
  const bool has_manifest = std::any_of(entries.begin(), entries.end(), [](const auto& e) {
    return e.name == kManifestFileName;
  });
  if (!has_manifest) {
    throw Error(ErrorKind::kValidation,
                package_dir.string() + " has no " + std::string(kManifestFileName),
                {{"findings", {{{"path", "manifest"}, {"message", "missing"}}}}});
  }
  if (archive_path.has_parent_path()) fs::create_directories(archive_path.parent_path());
  zip::write_archive_file(archive_path, std::move(entries));
  return {archive_path, sha256_file(archive_path),
          static_cast<std::int64_t>(fs::file_size(archive_path))};
}

HttpStorageClient::HttpStorageClient(std::string base_url, std::string token,
                                     RetryPolicy retry)
    : base_url_(std::move(base_url)), token_(std::move(token)), retry_(retry) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

StorageReceipt HttpStorageClient::upload(const PackagedArchive& archive, const ModelId& model_id) {
  const std::string bytes = read_file(archive.path);
  std::vector<MultipartField> fields{
      {"archive", bytes, model_id.str() + ".zip", "application/zip"},
      {"model_id", model_id.str(), "", ""},
  };
  json body;
  with_retry(retry_, [&] {
    const HttpResponse res = http_post_multipart(base_url_ + "/records", fields, auth(token_));
    raise_for_status(res, "storage backend");
    body = parse_body(res, "storage backend");
  });
  StorageReceipt receipt;
  try {
    receipt.record_id = body.at("record_id").get<std::string>();
    receipt.download_url = body.at("download_url").get<std::string>();
    receipt.checksum_sha256 = body.at("checksum").get<std::string>();
    receipt.size_bytes = body.value("size_bytes", archive.size_bytes);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kProtocolViolation,
                std::string("storage receipt is incomplete: ") + e.what());
  }
  return receipt;
}

StorageReceipt upload(const PackagedArchive& archive, const ModelId& model_id,
                      StorageClient& client) {
  StorageReceipt receipt = client.upload(archive, model_id);
  if (receipt.checksum_sha256 != archive.checksum_sha256) {
    throw Error(ErrorKind::kChecksumMismatch, "storage receipt checksum differs from the archive",
                {{"expected", archive.checksum_sha256}, {"actual", receipt.checksum_sha256}});
  }
  return receipt;
}

HttpTrackerClient::HttpTrackerClient(std::string base_url, std::string token, RetryPolicy retry)
    : base_url_(std::move(base_url)), token_(std::move(token)), retry_(retry) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string HttpTrackerClient::create_issue(const std::string& title, const std::string& body) {
  const std::string payload = json{{"title", title}, {"body", body}}.dump();
  json reply;
  with_retry(retry_, [&] {
    const HttpResponse res =
        http_post(base_url_ + "/issues", payload, "application/json", auth(token_));
    raise_for_status(res, "issue tracker");
    reply = parse_body(res, "issue tracker");
  });
  if (!reply.contains("issue_id")) {
    throw Error(ErrorKind::kProtocolViolation, "issue tracker reply lacks issue_id");
  }
  const auto& id = reply["issue_id"];
  return id.is_string() ? id.get<std::string>() : id.dump();
}

std::string_view submission_status_name(SubmissionStatus status) {
  switch (status) {
    case SubmissionStatus::kOpen: return "open";
    case SubmissionStatus::kMerged: return "merged";
    case SubmissionStatus::kRejected: return "rejected";
  }
  return "open";
}

json Submission::to_json() const {
  json f = json::array();
  for (const auto& x : findings.findings) f.push_back({{"path", x.path}, {"message", x.message}});
  return json{{"model_id", model_id.str()},
              {"status", submission_status_name(status)},
              {"created_at", created_at},
              {"issue_id", issue_id},
              {"receipt",
               {{"record_id", receipt.record_id},
                {"download_url", receipt.download_url},
                {"checksum_sha256", receipt.checksum_sha256},
                {"size_bytes", receipt.size_bytes}}},
              {"metadata", metadata_to_json(metadata)},
              {"findings", f},
              {"warnings", warnings}};
}

Submission submit(const ModelMetadata& metadata, const StorageReceipt& receipt,
                  TrackerClient& tracker, const RegistryIndex* current_index) {
  Submission s;
  s.model_id = metadata.model_id;
  s.metadata = metadata;
  s.metadata.execution.package_url = receipt.download_url;
  s.metadata.execution.checksum_sha256 = receipt.checksum_sha256;
  s.metadata.execution.package_size_bytes = receipt.size_bytes;
  s.receipt = receipt;
  s.created_at = utc_timestamp();
  s.findings = validate_entry(s.metadata);
  if (!s.findings.ok()) {
    s.status = SubmissionStatus::kRejected;
    return s;
  }
  if (current_index && current_index->contains(s.model_id)) {
    s.warnings.push_back("model id " + s.model_id.str() +
                         " already exists in the registry; maintainers decide on replacement");
  }
  const json doc{{"model_id", s.model_id.str()}, {"metadata", metadata_to_json(s.metadata)}};
  std::string body = "New model submission.\n\n```json\n" + doc.dump(2) + "\n```\n";
  for (const auto& w : s.warnings) body += "\nWarning: " + w + "\n";
  s.issue_id = tracker.create_issue("Add model " + s.model_id.str(), body);
  s.status = SubmissionStatus::kOpen;
  return s;
}

ContributionResult contribute(const ContributionInput& input, StorageClient& storage,
                              TrackerClient& tracker, const ContributeOptions& options) {
  const ValidationReport report = validate_contribution(input);
  if (!report.ok()) {
    json findings = json::array();
    for (const auto& f : report.findings) {
      findings.push_back({{"path", f.path}, {"message", f.message}});
    }
    throw Error(ErrorKind::kValidation, "contribution is invalid: " + report.summary(),
                {{"findings", findings}});
  }

  ContributionResult out;
  out.manifest = resolve_manifest(input);
  ModelMetadata meta = build_metadata(input, out.manifest);

  fs::path work = options.work_dir;
  if (work.empty()) work = TempDir("genhub-contribute").release();
  const fs::path stage = work / "stage";
  fs::remove_all(stage);
  fs::create_directories(stage);
  fs::copy(input.package_dir, stage, fs::copy_options::recursive);
  if (!has_manifest_file(stage)) {
    write_file_atomic(stage / kManifestFileName, manifest_to_json(out.manifest).dump(2) + "\n");
  }
  out.archive = package_model(stage, work / (input.model_id.str() + ".zip"));

  if (options.run_test) {
    ModelMetadata local = meta;
    local.execution.package_url = "file://" + fs::absolute(out.archive.path).string();
    local.execution.checksum_sha256 = out.archive.checksum_sha256;
    local.execution.package_size_bytes = out.archive.size_bytes;
    HubConfig cfg = options.test_config;
    cfg.cache_root = work / "cache";
    Hub hub(cfg, RegistryIndex("1.0.0", {{local.model_id, local}}));
    out.test = hub.test_model(local.model_id);
    if (!out.test->passed()) {
      throw Error(ErrorKind::kValidation, "local end-to-end test failed",
                  {{"test_report", out.test->to_json()}});
    }
  }

  out.receipt = upload(out.archive, input.model_id, storage);
  out.submission = submit(meta, out.receipt, tracker, options.current_index);
  return out;
}

bool PipelineReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const TestReport& r) { return r.passed(); });
}

std::size_t PipelineReport::passed_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const TestReport& r) { return r.passed(); }));
}

json PipelineReport::to_json() const {
  json models = json::array();
  for (const auto& r : rows) models.push_back(r.to_json());
  return json{{"passed", passed()},
              {"total", rows.size()},
              {"passed_count", passed_count()},
              {"wall_time_ms", wall_time_ms},
              {"warnings", warnings},
              {"models", models}};
}

PipelineReport test_all(Hub& hub, int parallelism) {
  const auto start = std::chrono::steady_clock::now();
  PipelineReport report;
  const std::vector<ModelId> ids = hub.index()->ids();
  if (ids.empty()) report.warnings.push_back("registry has no models; nothing was tested");
  report.rows.resize(ids.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < ids.size();) {
      report.rows[i] = hub.test_model(ids[i]);
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(ids.size(), static_cast<std::size_t>(std::max(1, parallelism)));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  report.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return report;
}

}  // namespace genhub
