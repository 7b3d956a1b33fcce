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

#include "cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "genhub/contributor.hpp"
#include "genhub/error.hpp"
#include "genhub/executor.hpp"
#include "genhub/features.hpp"
#include "genhub/frechet.hpp"
#include "genhub/fs_util.hpp"
#include "genhub/image.hpp"
#include "genhub/process.hpp"
#include "genhub/registry.hpp"
#include "genhub/search.hpp"
#include "genhub/service.hpp"
#include "genhub/stub_server.hpp"

namespace genhub::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliConfig {
  std::string registry;
  std::string cache;
  int chunk_size = 0;
  std::string format = "text";

  bool as_json() const { return format == "json"; }
};

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

HubConfig hub_config(const CliConfig& c) {
  HubConfig h = HubConfig::from_env();
  if (!c.registry.empty()) h.registry_source = c.registry;
  if (!c.cache.empty()) h.cache_root = expand_home(c.cache);
  if (c.chunk_size > 0) h.chunk_size = c.chunk_size;
  return h;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

json matches_json(const MatchCandidates& found) {
  json ids = json::array();
  json matches = json::array();
  for (const auto& e : found.entries) {
    ids.push_back(e.model_id.str());
    matches.push_back({{"model_id", e.model_id.str()},
                       {"matched_values", e.matched_values},
                       {"hit_paths", e.hit_paths}});
  }
  return {{"operator", operator_name(found.query.op())},
          {"values", found.query.values()},
          {"model_ids", ids},
          {"matches", matches}};
}

json ranked_json(const RankedList& ranked) {
  json items = json::array();
  for (const auto& item : ranked.items) {
    items.push_back({{"model_id", item.model_id.str()}, {"value", item.value}});
  }
  json excluded = json::array();
  for (const auto& id : ranked.excluded) excluded.push_back(id.str());
  return {{"metric", ranked.metric_path},
          {"order", order_name(ranked.order)},
          {"items", items},
          {"excluded", excluded}};
}

// "k=v" pairs typed by the model's manifest.
std::map<std::string, json> parse_kwargs(Hub& hub, const ModelId& id,
                                         const std::vector<std::string>& pairs) {
  std::map<std::string, json> out;
  if (pairs.empty()) return out;
  const ModelManifest manifest = hub.init_executor(id)->manifest();
  for (const auto& pair : pairs) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::kValidation, "--kwarg expects key=value, got '" + pair + "'");
    }
    const std::string key = pair.substr(0, eq);
    const ParamSpec* spec = manifest.find_param(key);
    if (!spec) {
      throw Error(ErrorKind::kValidation,
                  "model " + id.str() + " has no parameter '" + key + "'", {{"param", key}});
    }
    out[key] = parse_param_text(spec->kind, std::string_view(pair).substr(eq + 1));
  }
  return out;
}

struct GenerateArgs {
  std::int64_t num_samples = 1;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> kwargs;
};

void add_generate_flags(CLI::App* cmd, GenerateArgs& a) {
  cmd->add_option("-n,--num-samples", a.num_samples, "Number of samples")
      ->check(CLI::PositiveNumber);
  cmd->add_option("-o,--output", a.output, "Output directory")->required();
  cmd->add_option("--seed", a.seed, "Base seed; chunk k uses seed + k");
  cmd->add_option("--kwarg", a.kwargs, "Model parameter as key=value (repeatable)");
}

GenerateResult run_generate(Hub& hub, const ModelId& id, const GenerateArgs& a) {
  GenerateRequest req;
  req.model_id = id;
  req.num_samples = a.num_samples;
  req.output_path = a.output;
  req.save_images = true;
  req.seed = a.seed;
  req.kwargs = parse_kwargs(hub, id, a.kwargs);
  return hub.generate(req);
}

void print_generated(std::ostream& out, const CliConfig& c, const ModelId& id,
                     const GenerateResult& r, const std::string& dir) {
  if (c.as_json()) {
    json j = generate_result_to_json(r);
    j["model_id"] = id.str();
    j["output_dir"] = dir;
    out << j.dump(2) << "\n";
  } else {
    out << "generated " << r.records.size() << " samples in " << dir << "\n";
  }
}

metrics::FeatureMatrix features_for(const std::string& dir, const std::string& file,
                                    const std::string& which, const std::string& normalize,
                                    const std::string& extractor,
                                    const std::string& extractor_cmd) {
  if (!file.empty()) return metrics::read_feature_file(file);
  if (dir.empty()) {
    throw Error(ErrorKind::kBadQuery, "--" + which + " or --" + which + "-features is required");
  }
  auto images = metrics::load_image_dir(dir);
  const auto mode = metrics::parse_normalization(normalize);
  if (extractor == "command") {
    if (extractor_cmd.empty()) {
      throw Error(ErrorKind::kBadQuery, "--extractor command needs --extractor-command");
    }
    metrics::CommandExtractor ex("command", extractor_cmd, normalize);
    return metrics::extract_features(images, ex);
  }
  std::vector<metrics::Image> raw;
  raw.reserve(images.size());
  for (auto& [id, img] : images) raw.push_back(std::move(img));
  auto normalized = metrics::normalize_images(raw, mode);
  for (std::size_t i = 0; i < images.size(); ++i) images[i].second = std::move(normalized[i]);
  return metrics::extract_features(images, metrics::IdentityPoolExtractor());
}

int wait_for_signal() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  int sig = 0;
  sigwait(&set, &sig);
  return sig;
}

void block_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
}

int fail(std::ostream& err, const Error& e, bool as_json) {
  if (as_json) {
    json body{{"code", api_code(e.kind())}, {"kind", kind_name(e.kind())}, {"message", e.what()}};
    if (!e.detail().is_null()) body["detail"] = e.detail();
    err << json{{"error", body}}.dump(2) << "\n";
  } else {
    err << "error [" << api_code(e.kind()) << "]: " << e.what() << "\n";
    if (e.detail().is_object() && e.detail().contains("findings")) {
      for (const auto& f : e.detail()["findings"]) {
        err << "  " << f.value("path", "") << ": " << f.value("message", "") << "\n";
      }
    }
  }
  return kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::shared_ptr<Transport> transport) {
  CLI::App app{"genhub: find, rank, run and evaluate generative model packages", "genhub"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");
  CliConfig cfg;
  app.add_option("--registry", cfg.registry, "Registry index path or URL (env GENHUB_REGISTRY)");
  app.add_option("--cache", cfg.cache, "Package cache root (env GENHUB_CACHE)");
  app.add_option("--chunk-size", cfg.chunk_size, "Samples per chunk (env GENHUB_CHUNK_SIZE)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));

  auto open_hub = [&] { return Hub::open(hub_config(cfg), transport); };
  std::function<int()> action;

  // find
  std::vector<std::string> values;
  std::string op = "AND";
  auto* find = app.add_subcommand("find", "Search model metadata for keywords");
  find->add_option("values", values, "Search values")->required();
  find->add_option("--operator", op, "AND, OR or XOR")
      ->check(CLI::IsMember({"AND", "OR", "XOR"}, CLI::ignore_case));
  find->callback([&] {
    action = [&] {
      auto hub = open_hub();
      const auto found = hub->find_models(SearchQuery(values, parse_operator(op)));
      if (cfg.as_json()) {
        out << matches_json(found).dump(2) << "\n";
      } else {
        for (const auto& e : found.entries) {
          out << e.model_id.str() << "\t"
              << join({e.matched_values.begin(), e.matched_values.end()}, ",") << "\n";
        }
        if (found.entries.empty()) err << "no models match\n";
      }
      return found.entries.empty() ? kExitFailure : kExitOk;
    };
  });

  // rank
  std::string metric;
  std::string order = "ascending";
  std::vector<std::string> rank_ids;
  auto* rank = app.add_subcommand("rank", "Rank models by a metric");
  rank->add_option("--metric", metric, "Dotted metric path, e.g. FID.ImageNet.real-syn")
      ->required();
  rank->add_option("--order", order, "ascending or descending")
      ->check(CLI::IsMember({"ascending", "descending", "asc", "desc"}, CLI::ignore_case));
  rank->add_option("--ids", rank_ids, "Restrict to these model ids");
  rank->callback([&] {
    action = [&] {
      auto hub = open_hub();
      std::optional<std::vector<ModelId>> ids;
      if (!rank_ids.empty()) {
        ids.emplace();
        for (const auto& s : rank_ids) ids->emplace_back(s);
      }
      const auto ranked = hub->rank_models(metric, parse_order(order), ids);
      if (cfg.as_json()) {
        out << ranked_json(ranked).dump(2) << "\n";
      } else {
        for (const auto& item : ranked.items) {
          out << item.model_id.str() << "\t" << item.value << "\n";
        }
        for (const auto& id : ranked.excluded) {
          err << "excluded " << id.str() << " (no " << metric << ")\n";
        }
      }
      return kExitOk;
    };
  });

  // generate
  std::string model_id;
  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate samples with a model");
  generate->add_option("model_id", model_id, "Model id")->required();
  add_generate_flags(generate, gen);
  generate->callback([&] {
    action = [&] {
      auto hub = open_hub();
      const ModelId id(model_id);
      const auto r = run_generate(*hub, id, gen);
      print_generated(out, cfg, id, r, gen.output);
      return kExitOk;
    };
  });

  // rank-generate
  GenerateArgs rg;
  std::vector<std::string> rg_values;
  std::string rg_op = "AND";
  std::string rg_metric;
  std::string rg_order = "ascending";
  auto* rank_generate =
      app.add_subcommand("rank-generate", "Search, rank and generate with the best model");
  rank_generate->add_option("values", rg_values, "Search values")->required();
  rank_generate->add_option("--operator", rg_op, "AND, OR or XOR")
      ->check(CLI::IsMember({"AND", "OR", "XOR"}, CLI::ignore_case));
  rank_generate->add_option("--metric", rg_metric, "Dotted metric path")->required();
  rank_generate->add_option("--order", rg_order, "ascending or descending")
      ->check(CLI::IsMember({"ascending", "descending", "asc", "desc"}, CLI::ignore_case));
  add_generate_flags(rank_generate, rg);
  rank_generate->callback([&] {
    action = [&] {
      auto hub = open_hub();
      const auto ranked = hub->find_rank(SearchQuery(rg_values, parse_operator(rg_op)),
                                         rg_metric, parse_order(rg_order));
      const ModelId chosen = ranked.items.front().model_id;
      out << "selected " << chosen.str() << "\n";
      const auto r = run_generate(*hub, chosen, rg);
      print_generated(out, cfg, chosen, r, rg.output);
      return kExitOk;
    };
  });

  // explore
  std::string ex_model;
  int grouper = 10;
  bool no_launch = false;
  int ex_port = 0;
  std::string static_dir;
  auto* explore = app.add_subcommand("explore", "Open the latent explorer for a model");
  explore->add_option("model_id", ex_model, "Model id")->required();
  explore->add_option("--slider-grouper", grouper, "Latent dimensions per slider")
      ->check(CLI::PositiveNumber);
  explore->add_flag("--no-launch", no_launch, "Print the explorer URL without serving");
  explore->add_option("--port", ex_port, "Service port (env GENHUB_PORT)");
  explore->add_option("--static", static_dir, "Explorer UI asset directory");
  explore->callback([&] {
    action = [&] {
      auto hub = open_hub();
      const ModelId id(ex_model);
      const ModelManifest manifest = hub->init_executor(id)->manifest();
      if (!manifest.latent_dim) {
        throw Error(ErrorKind::kBadQuery, "model not explorable: " + id.str() +
                                              " declares no latent_dim");
      }
      const int dim = *manifest.latent_dim;
      const int sliders = (dim + grouper - 1) / grouper;
      ServiceConfig sc;
      sc.port = ex_port ? ex_port : std::stoi(env_or("GENHUB_PORT", std::to_string(kDefaultServicePort)));
      if (!static_dir.empty()) sc.static_dir = static_dir;
      const std::string query = "/?model_id=" + id.str() + "&latent_dim=" + std::to_string(dim) +
                                "&slider_grouper=" + std::to_string(grouper);
      if (cfg.as_json()) {
        out << json{{"model_id", id.str()}, {"latent_dim", dim}, {"slider_grouper", grouper},
                    {"sliders", sliders},
                    {"url", "http://" + sc.host + ":" + std::to_string(sc.port) + query}}
                   .dump(2)
            << "\n";
      } else {
        out << "explorer: http://" << sc.host << ":" << sc.port << query << "\n";
        out << "sliders: " << sliders << " (latent_dim " << dim << ", " << grouper
            << " per slider)\n";
      }
      if (no_launch) return kExitOk;
      block_signals();
      Service service(*hub, sc);
      service.start();
      out << "serving on " << service.base_url() << " (Ctrl-C to stop)\n" << std::flush;
      wait_for_signal();
      service.stop();
      return kExitOk;
    };
  });

  // contribute
  ContributionInput ci;
  std::string ci_id;
  std::string ci_dir;
  std::string storage_url = env_or("GENHUB_STORAGE_URL", "");
  std::string tracker_url = env_or("GENHUB_TRACKER_URL", "");
  std::string metrics_json;
  std::string work_dir;
  bool skip_test = false;
  ci.storage_token = env_or("GENHUB_STORAGE_TOKEN", "");
  ci.tracker_token = env_or("GENHUB_TRACKER_TOKEN", "");
  auto* contribute_cmd = app.add_subcommand("contribute", "Package, test, upload and submit a model");
  contribute_cmd->add_option("--model-id", ci_id, "New model id, e.g. 00100_YOUR_MODEL")->required();
  contribute_cmd->add_option("--package-dir", ci_dir, "Directory with entrypoint and weights")
      ->required();
  contribute_cmd->add_option("--entrypoint", ci.entrypoint, "Command template with {request}");
  contribute_cmd->add_option("--generate-method", ci.generate_method_name, "Generate method name");
  contribute_cmd->add_option("--weights-name", ci.weights_name, "Weights file stem");
  contribute_cmd->add_option("--weights-ext", ci.weights_extension, "Weights extension, e.g. .pt");
  contribute_cmd->add_option("--dependency", ci.dependencies, "Dependency (repeatable)");
  contribute_cmd->add_option("--keyword", ci.keywords, "Search keyword (repeatable)");
  contribute_cmd->add_option("--modality", ci.modality, "Imaging modality");
  contribute_cmd->add_option("--organ", ci.organ, "Organ");
  contribute_cmd->add_option("--title", ci.title, "Title");
  contribute_cmd->add_option("--training-dataset", ci.training_dataset, "Training dataset");
  contribute_cmd->add_option("--license", ci.license, "License");
  contribute_cmd->add_option("--date", ci.date, "Release date (ISO-8601)");
  contribute_cmd->add_option("--publication", ci.publication, "Publication");
  contribute_cmd->add_option("--metrics-json", metrics_json, "Metrics as a JSON object");
  contribute_cmd->add_option("--storage-url", storage_url, "Storage backend (env GENHUB_STORAGE_URL)");
  contribute_cmd->add_option("--tracker-url", tracker_url, "Issue tracker (env GENHUB_TRACKER_URL)");
  contribute_cmd->add_option("--storage-token", ci.storage_token, "(env GENHUB_STORAGE_TOKEN)");
  contribute_cmd->add_option("--tracker-token", ci.tracker_token, "(env GENHUB_TRACKER_TOKEN)");
  contribute_cmd->add_option("--work-dir", work_dir, "Keep staging files here");
  contribute_cmd->add_flag("--skip-test", skip_test, "Skip the local end-to-end test");
  contribute_cmd->callback([&] {
    action = [&] {
      ci.model_id = ModelId(ci_id);
      ci.package_dir = ci_dir;
      if (!metrics_json.empty()) {
        ci.metrics = json::parse(metrics_json, nullptr, false);
        if (!ci.metrics.is_object()) {
          throw Error(ErrorKind::kValidation, "--metrics-json must be a JSON object");
        }
      }
      if (storage_url.empty() || tracker_url.empty()) {
        throw Error(ErrorKind::kValidation,
                    "--storage-url and --tracker-url (or GENHUB_STORAGE_URL/GENHUB_TRACKER_URL) "
                    "are required");
      }
      const ValidationReport tokens = validate_contribution(ci, true);
      if (tokens.has_path("storage_token") || tokens.has_path("tracker_token")) {
        throw Error(ErrorKind::kValidation, "storage and tracker tokens are required");
      }
      HttpStorageClient storage(storage_url, ci.storage_token);
      HttpTrackerClient tracker(tracker_url, ci.tracker_token);
      ContributeOptions opts;
      opts.work_dir = work_dir;
      opts.run_test = !skip_test;
      opts.test_config = hub_config(cfg);
      std::optional<RegistryIndex> current;
      try {
        current = *open_hub()->index();
        opts.current_index = &*current;
      } catch (const Error&) {
      }
      const ContributionResult r = contribute(ci, storage, tracker, opts);
      if (cfg.as_json()) {
        json j = r.submission.to_json();
        j["archive"] = {{"path", r.archive.path.string()},
                        {"checksum_sha256", r.archive.checksum_sha256},
                        {"size_bytes", r.archive.size_bytes}};
        if (r.test) j["test"] = r.test->to_json();
        out << j.dump(2) << "\n";
      } else {
        out << "packaged " << r.archive.path.string() << " (sha256 " << r.archive.checksum_sha256
            << ", " << r.archive.size_bytes << " bytes)\n";
        if (r.test) out << "local test passed\n";
        out << "uploaded record " << r.receipt.record_id << " -> " << r.receipt.download_url << "\n";
        out << "submission " << submission_status_name(r.submission.status) << ", issue "
            << r.submission.issue_id << "\n";
        for (const auto& w : r.submission.warnings) err << "warning: " << w << "\n";
      }
      return r.submission.status == SubmissionStatus::kRejected ? kExitFailure : kExitOk;
    };
  });

  // test
  std::string test_id;
  bool test_every = false;
  int parallelism = 4;
  auto* test = app.add_subcommand("test", "End-to-end test of one model or the whole registry");
  test->add_option("model_id", test_id, "Model id");
  test->add_flag("--all", test_every, "Test every registry entry");
  test->add_option("--parallelism", parallelism, "Models tested at once")
      ->check(CLI::PositiveNumber);
  test->callback([&] {
    if (test_id.empty() == !test_every) {
      throw CLI::ValidationError("test", "give exactly one of MODEL_ID or --all");
    }
    action = [&] {
      auto hub = open_hub();
      PipelineReport report;
      if (test_every) {
        report = test_all(*hub, parallelism);
      } else {
        report.rows.push_back(hub->test_model(ModelId(test_id)));
      }
      if (cfg.as_json()) {
        out << report.to_json().dump(2) << "\n";
      } else {
        for (const auto& w : report.warnings) err << "warning: " << w << "\n";
        out << std::left << std::setw(24) << "model";
        for (const char* s : {"resolve", "manifest", "dependency", "generate", "output-schema"}) {
          out << std::setw(15) << s;
        }
        out << "\n";
        for (const auto& row : report.rows) {
          out << std::setw(24) << row.model_id.str();
          for (const auto& s : row.stages) {
            out << std::setw(15)
                << (s.skipped ? "skip" : (s.passed ? "pass" : "FAIL")) + std::string(" ") +
                       std::to_string(s.millis) + "ms";
          }
          out << "\n";
          for (const auto& s : row.stages) {
            if (!s.passed && !s.skipped) out << "  " << s.name << ": " << s.message << "\n";
          }
        }
        out << report.passed_count() << "/" << report.rows.size() << " passed\n";
      }
      return report.passed() ? kExitOk : kExitFailure;
    };
  });

  // fid
  std::string real_dir, real_file, syn_dir, syn_file, normalize = "none",
                                                     extractor = "identity-pool", extractor_cmd;
  std::uint64_t split_seed = 0;
  auto* fid = app.add_subcommand("fid", "Compute real-real, real-syn FID and r_FID");
  fid->add_option("--real", real_dir, "Directory of real PNG images");
  fid->add_option("--real-features", real_file, "Feature file of the real set");
  fid->add_option("--syn", syn_dir, "Directory of synthetic PNG images");
  fid->add_option("--syn-features", syn_file, "Feature file of the synthetic set");
  fid->add_option("--normalize", normalize, "none or unit_range")
      ->check(CLI::IsMember({"none", "unit_range"}));
  fid->add_option("--extractor", extractor, "identity-pool or command")
      ->check(CLI::IsMember({"identity-pool", "command"}));
  fid->add_option("--extractor-command", extractor_cmd, "Command template with {request}");
  fid->add_option("--split-seed", split_seed, "Seed of the real-real split");
  fid->callback([&] {
    if (real_dir.empty() == real_file.empty()) {
      throw CLI::ValidationError("fid", "give exactly one of --real or --real-features");
    }
    if (syn_dir.empty() == syn_file.empty()) {
      throw CLI::ValidationError("fid", "give exactly one of --syn or --syn-features");
    }
    action = [&] {
      const auto real =
          features_for(real_dir, real_file, "real", normalize, extractor, extractor_cmd);
      const auto syn = features_for(syn_dir, syn_file, "syn", normalize, extractor, extractor_cmd);
      if (real.extractor_id != syn.extractor_id) {
        err << "warning: real features from " << real.extractor_id << ", synthetic from "
            << syn.extractor_id << "\n";
      }
      auto report = metrics::compute_fid_report(real.rows, syn.rows, split_seed);
      report.extractor_id = real.extractor_id;
      report.normalization_mode = real_file.empty() ? normalize : "external";
      if (cfg.as_json()) {
        out << report.to_json().dump(2) << "\n";
      } else {
        out << std::left << std::setw(8) << "#imgs" << std::setw(12) << "real-real"
            << std::setw(12) << "real-syn" << "r_FID\n";
        out << std::setw(8) << report.n_real << std::setw(12) << fixed(report.fid_rr, 2)
            << std::setw(12) << fixed(report.fid_rs, 2)
            << (report.r_fid ? fixed(*report.r_fid, 3) : std::string("n/a")) << "\n";
        out << "in_bounds: " << (report.in_bounds ? "yes" : "no")
            << "  extractor: " << report.extractor_id
            << "  normalization: " << report.normalization_mode
            << "  n_syn: " << report.n_syn << "  split_seed: " << report.split_seed << "\n";
      }
      return kExitOk;
    };
  });

  // serve
  ServiceConfig serve_cfg;
  int serve_port = 0;
  std::string serve_static;
  auto* serve = app.add_subcommand("serve", "Run the local HTTP service");
  serve->add_option("--host", serve_cfg.host, "Bind address");
  serve->add_option("--port", serve_port, "Port (env GENHUB_PORT, default 8490)");
  serve->add_option("--static", serve_static, "UI asset directory served at /");
  serve->callback([&] {
    action = [&] {
      auto hub = open_hub();
      serve_cfg.port = serve_port ? serve_port
                                  : std::stoi(env_or("GENHUB_PORT",
                                                     std::to_string(kDefaultServicePort)));
      if (!serve_static.empty()) serve_cfg.static_dir = serve_static;
      block_signals();
      Service service(*hub, serve_cfg);
      service.start();
      out << "serving " << hub->index()->size() << " models on " << service.base_url() << "\n"
          << std::flush;
      wait_for_signal();
      service.stop();
      return kExitOk;
    };
  });

  // stub-server
  StubServerOptions stub_opts;
  auto* stub = app.add_subcommand("stub-server", "Run the offline storage and tracker backend");
  stub->add_option("--host", stub_opts.host, "Bind address");
  stub->add_option("--port", stub_opts.port, "Port (0 picks a free one)");
  stub->add_option("--storage-token", stub_opts.storage_token, "Accepted storage token");
  stub->add_option("--tracker-token", stub_opts.tracker_token, "Accepted tracker token");
  stub->add_option("--drop-first", stub_opts.drop_first_requests, "Answer 503 to the first N requests");
  stub->callback([&] {
    action = [&] {
      block_signals();
      StubServer server(stub_opts);
      server.start();
      out << "stub storage and tracker on " << server.base_url() << "\n" << std::flush;
      wait_for_signal();
      server.stop();
      return kExitOk;
    };
  });

  // validate
  std::string validate_target;
  bool validate_manifest_dir = false;
  auto* validate = app.add_subcommand("validate", "Validate a registry document or package directory");
  validate->add_option("target", validate_target, "Registry file, or package dir with --manifest")
      ->required();
  validate->add_flag("--manifest", validate_manifest_dir, "Target is a package directory");
  validate->callback([&] {
    action = [&] {
      if (validate_manifest_dir) {
        const ModelManifest m = load_manifest(validate_target);
        const ValidationReport r = validate_manifest(m, fs::path(validate_target));
        if (!r.ok()) {
          json findings = json::array();
          for (const auto& f : r.findings) findings.push_back({{"path", f.path}, {"message", f.message}});
          throw Error(ErrorKind::kManifestInvalid, "manifest has findings: " + r.summary(),
                      {{"findings", findings}});
        }
        out << "manifest ok: " << m.model_id.str() << "\n";
        return kExitOk;
      }
      DefaultTransport local;
      const RegistryIndex index = load_index(read_source(validate_target, local));
      if (cfg.as_json()) {
        out << json{{"ok", true}, {"models", index.size()},
                    {"schema_version", index.schema_version()}}.dump(2) << "\n";
      } else {
        out << "registry ok: " << index.size() << " models, schema " << index.schema_version()
            << "\n";
      }
      return kExitOk;
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    out << sub->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << "run 'genhub --help' for usage\n";
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const Error& e) {
    return fail(err, e, cfg.as_json());
  } catch (const std::exception& e) {
    return fail(err, Error(ErrorKind::kInternal, e.what()), cfg.as_json());
  }
}

}  // namespace genhub::cli
