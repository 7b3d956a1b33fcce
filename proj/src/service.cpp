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

#include "genhub/service.hpp"

#include <httplib.h>

#include <regex>

#include "genhub/digest.hpp"
#include "genhub/fs_util.hpp"
#include "genhub/search.hpp"

namespace genhub {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kBuiltinPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>genhub</title></head>
<body>
<h1>genhub</h1>
<p>Endpoints: GET /v1/models, GET /v1/models/{id}, POST /v1/search, POST /v1/rank,
POST /v1/models/{id}/generate, POST /v1/models/{id}/explore, GET /v1/jobs/{id}.</p>
<p>The latent explorer UI is served here when the service is started with a static directory.</p>
</body></html>
)";

ApiResponse ok(json body, int status = 200) {
  ApiResponse r;
  r.status = status;
  r.body = std::move(body);
  return r;
}

json parse_request(const std::string& body) {
  if (body.empty()) return json::object();
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorKind::kBadQuery, "request body must be a JSON object");
  }
  return doc;
}

template <typename F>
ApiResponse guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return error_response(e);
  } catch (const json::exception& e) {
    return error_response(Error(ErrorKind::kBadQuery, std::string("malformed request: ") + e.what()));
  } catch (const std::exception& e) {
    return error_response(Error(ErrorKind::kInternal, e.what()));
  }
}

std::string mime_type(const fs::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

}  // namespace

ApiResponse error_response(const Error& error) {
  ApiResponse r;
  r.status = http_status(error.kind());
  json err{{"code", api_code(error.kind())}, {"message", error.what()},
           {"kind", kind_name(error.kind())}};
  if (!error.detail().is_null()) err["detail"] = error.detail();
  r.body = json{{"error", err}};
  return r;
}

Service::Service(Hub& hub, ServiceConfig config)
    : hub_(hub), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  if (config_.output_root.empty()) config_.output_root = hub_.config().cache_root / "service-output";
  install_routes();
}

Service::~Service() { stop(); }

std::string Service::base_url() const {
  return "http://" + config_.host + ":" + std::to_string(port_);
}

ApiResponse Service::list_models() const {
  return guarded([&] {
    auto index = hub_.index();
    json ids = json::array();
    json models = json::array();
    for (const auto& [id, meta] : index->models()) {
      ids.push_back(id.str());
      models.push_back({{"model_id", id.str()},
                        {"title", meta.description.title},
                        {"modality", meta.selection.modality},
                        {"organ", meta.selection.organ},
                        {"keywords", meta.selection.keywords}});
    }
    return ok({{"schema_version", index->schema_version()},
               {"model_ids", ids},
               {"models", models}});
  });
}

ApiResponse Service::get_model(const std::string& id) const {
  return guarded([&] {
    const ModelMetadata meta = hub_.metadata(ModelId(id));
    return ok({{"model_id", id}, {"metadata", metadata_to_json(meta)}});
  });
}

ApiResponse Service::search(const std::string& body) const {
  return guarded([&] {
    const json req = parse_request(body);
    if (!req.contains("values") || !req["values"].is_array()) {
      throw Error(ErrorKind::kBadQuery, "values must be a list of strings");
    }
    const auto values = req["values"].get<std::vector<std::string>>();
    const SearchOperator op = parse_operator(req.value("operator", std::string("AND")));
    const SearchQuery query(values, op);
    const MatchCandidates found = hub_.find_models(query);
    json ids = json::array();
    json matches = json::array();
    for (const auto& e : found.entries) {
      ids.push_back(e.model_id.str());
      matches.push_back({{"model_id", e.model_id.str()},
                         {"matched_values", e.matched_values},
                         {"hit_paths", e.hit_paths}});
    }
    return ok({{"operator", operator_name(op)},
               {"values", query.values()},
               {"model_ids", ids},
               {"matches", matches}});
  });
}

ApiResponse Service::rank(const std::string& body) const {
  return guarded([&] {
    const json req = parse_request(body);
    if (!req.contains("metric") || !req["metric"].is_string()) {
      throw Error(ErrorKind::kBadQuery, "metric must be a dotted path string");
    }
    const std::string metric = req["metric"].get<std::string>();
    const SortOrder order = parse_order(req.value("order", std::string("ascending")));
    std::optional<std::vector<ModelId>> ids;
    if (req.contains("ids") && !req["ids"].is_null()) {
      ids.emplace();
      for (const auto& s : req["ids"].get<std::vector<std::string>>()) ids->emplace_back(s);
    }
    const RankedList ranked = hub_.rank_models(metric, order, ids);
    json items = json::array();
    for (const auto& item : ranked.items) {
      items.push_back({{"model_id", item.model_id.str()}, {"value", item.value}});
    }
    json excluded = json::array();
    for (const auto& id : ranked.excluded) excluded.push_back(id.str());
    return ok({{"metric", ranked.metric_path},
               {"order", order_name(ranked.order)},
               {"items", items},
               {"excluded", excluded}});
  });
}

json Service::run_generate(const std::string& id, const json& req, const std::string& out_tag) {
  GenerateRequest g;
  g.model_id = ModelId(id);
  g.num_samples = req.value("num_samples", std::int64_t{1});
  if (req.contains("seed") && !req["seed"].is_null()) g.seed = req["seed"].get<std::uint64_t>();
  if (req.contains("chunk_size") && !req["chunk_size"].is_null()) {
    g.chunk_size = req["chunk_size"].get<int>();
  }
  if (req.contains("kwargs")) {
    for (const auto& [k, v] : req["kwargs"].items()) g.kwargs[k] = v;
  }
  g.save_images = true;
  g.output_path = config_.output_root / out_tag;
  json out = generate_result_to_json(hub_.generate(g));
  out["output_dir"] = g.output_path.string();
  out["model_id"] = id;
  return out;
}

ApiResponse Service::generate(const std::string& id, const std::string& body) {
  return guarded([&] {
    const json req = parse_request(body);
    const std::int64_t n = req.value("num_samples", std::int64_t{1});
    if (n <= 0) throw Error(ErrorKind::kValidation, "num_samples must be positive");
    hub_.metadata(ModelId(id));
    const std::string tag = random_hex_id();
    if (n <= config_.async_threshold) return ok(run_generate(id, req, tag));

    auto job = std::make_shared<Job>();
    job->id = tag;
    std::lock_guard lock(jobs_mutex_);
    jobs_[job->id] = job;
    job_threads_.emplace_back([this, job, id, req] {
      {
        std::lock_guard l(jobs_mutex_);
        job->state = "running";
      }
      json result;
      json error;
      try {
        result = run_generate(id, req, job->id);
      } catch (const Error& e) {
        error = error_response(e).body["error"];
      } catch (const std::exception& e) {
        error = error_response(Error(ErrorKind::kInternal, e.what())).body["error"];
      }
      std::lock_guard l(jobs_mutex_);
      job->result = std::move(result);
      job->error = std::move(error);
      job->state = job->error.is_null() ? "done" : "failed";
    });
    return ok({{"job_id", job->id}, {"state", "queued"}, {"poll", "/v1/jobs/" + job->id}},
              202);
  });
}

ApiResponse Service::explore(const std::string& id, const std::string& body) {
  return guarded([&] {
    const json req = parse_request(body);
    auto handle = hub_.init_executor(ModelId(id));
    const ModelManifest& manifest = handle->manifest();
    if (!manifest.latent_dim) {
      throw Error(ErrorKind::kBadQuery, "model not explorable: " + id + " declares no latent_dim");
    }
    const int dim = *manifest.latent_dim;
    if (!req.contains("latent_vector") || !req["latent_vector"].is_array()) {
      throw Error(ErrorKind::kBadQuery, "latent_vector must be a list of " +
                                            std::to_string(dim) + " numbers",
                  {{"expected_latent_dim", dim}});
    }
    const json& z = req["latent_vector"];
    if (static_cast<int>(z.size()) != dim) {
      throw Error(ErrorKind::kBadQuery,
                  "latent_vector has " + std::to_string(z.size()) +
                      " values; expected latent_dim " + std::to_string(dim),
                  {{"expected_latent_dim", dim}, {"actual", z.size()}});
    }
    for (const auto& v : z) {
      if (!v.is_number()) throw Error(ErrorKind::kBadQuery, "latent_vector must hold numbers");
    }
    GenerateRequest g;
    g.model_id = ModelId(id);
    g.num_samples = 1;
    g.save_images = false;
    g.seed = req.contains("seed") && !req["seed"].is_null() ? req["seed"].get<std::uint64_t>()
                                                            : std::uint64_t{0};
    g.kwargs[std::string(kLatentParam)] = z;
    if (req.contains("condition") && !req["condition"].is_null()) {
      if (!manifest.condition) {
        throw Error(ErrorKind::kBadQuery, "model " + id + " takes no condition");
      }
      g.kwargs[manifest.condition->name] = req["condition"];
    }
    const GenerateResult result = hub_.generate(g);
    const SampleRecord& rec = result.records.at(0);
    json outputs = json::object();
    for (const auto& spec : manifest.outputs) {
      const std::string kind(output_kind_name(spec.kind));
      outputs[kind] = {{"file_format", file_format_name(spec.format)},
                       {"data_base64", base64_encode(rec.payloads.at(kind))}};
    }
    return ok({{"model_id", id},
               {"outputs", outputs},
               {"seed_used", rec.seed_used},
               {"latent_echo", z}});
  });
}

ApiResponse Service::job(const std::string& id) const {
  return guarded([&] {
    std::lock_guard lock(jobs_mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) {
      throw Error(ErrorKind::kBadQuery, "unknown job " + id, {{"job_id", id}});
    }
    const Job& j = *it->second;
    json body{{"job_id", j.id}, {"state", j.state}};
    if (!j.result.is_null()) body["result"] = j.result;
    if (!j.error.is_null()) body["error"] = j.error;
    return ok(body);
  });
}

ApiResponse Service::static_asset(const std::string& path) const {
  ApiResponse r;
  std::string rel = path == "/" || path.empty() ? "index.html" : path.substr(1);
  if (!config_.static_dir.empty() && rel.find("..") == std::string::npos) {
    const fs::path file = config_.static_dir / rel;
    std::error_code ec;
    if (fs::is_regular_file(file, ec)) {
      r.raw = read_file(file);
      r.content_type = mime_type(file);
      return r;
    }
  }
  if (rel == "index.html") {
    r.raw = std::string(kBuiltinPage);
    r.content_type = "text/html; charset=utf-8";
    return r;
  }
  r.status = 404;
  r.body = json{{"error", {{"code", "bad_query"}, {"message", "no such path " + path}}}};
  return r;
}

ApiResponse Service::dispatch(const std::string& method, const std::string& path,
                              const std::string& body) {
  static const std::regex model_re(R"(^/v1/models/([^/]+)$)");
  static const std::regex generate_re(R"(^/v1/models/([^/]+)/generate$)");
  static const std::regex explore_re(R"(^/v1/models/([^/]+)/explore$)");
  static const std::regex job_re(R"(^/v1/jobs/([^/]+)$)");
  std::smatch m;
  if (method == "GET") {
    if (path == "/v1/models") return list_models();
    if (std::regex_match(path, m, model_re)) return get_model(m[1]);
    if (std::regex_match(path, m, job_re)) return job(m[1]);
    if (path.rfind("/v1/", 0) != 0) return static_asset(path);
  } else if (method == "POST") {
    if (path == "/v1/search") return search(body);
    if (path == "/v1/rank") return rank(body);
    if (std::regex_match(path, m, generate_re)) return generate(m[1], body);
    if (std::regex_match(path, m, explore_re)) return explore(m[1], body);
  }
  ApiResponse r;
  r.status = 404;
  r.body = json{{"error", {{"code", "bad_query"}, {"message", method + " " + path + " is not an endpoint"}}}};
  return r;
}

void Service::install_routes() {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = dispatch(req.method, req.path, req.body);
    res.status = r.status;
    if (!r.raw.empty()) {
      res.set_content(r.raw, r.content_type);
    } else {
      res.set_content(r.body.dump(), r.content_type);
    }
  };
  server_->Get(R"(/.*)", handler);
  server_->Post(R"(/.*)", handler);
}

void Service::bind() {
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  if (config_.port == 0) {
    port_ = server_->bind_to_any_port(config_.host);
  } else {
    port_ = server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (port_ <= 0) {
    throw Error(ErrorKind::kBind,
                "cannot bind " + config_.host + ":" + std::to_string(config_.port),
                {{"host", config_.host}, {"port", config_.port}});
  }
}

void Service::start() {
  bind();
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void Service::run() {
  bind();
  server_->listen_after_bind();
  wait_for_jobs();
}

void Service::stop() {
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
  wait_for_jobs();
}

void Service::wait_for_jobs() {
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(jobs_mutex_);
    threads.swap(job_threads_);
  }
  for (auto& t : threads) {
    if (t.joinable()) t.join();
  }
}

}  // namespace genhub
