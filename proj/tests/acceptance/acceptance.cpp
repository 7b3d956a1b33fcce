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

// Acceptance criteria 1-8. One PASS/FAIL line per criterion; exit status is
// the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "genhub/contributor.hpp"
#include "genhub/digest.hpp"
#include "genhub/error.hpp"
#include "genhub/executor.hpp"
#include "genhub/frechet.hpp"
#include "genhub/fs_util.hpp"
#include "genhub/package_store.hpp"
#include "genhub/search.hpp"
#include "genhub/service.hpp"
#include "genhub/stub_server.hpp"
#include "oracles.hpp"
#include "schema_check.hpp"
#include "toy.hpp"

#include <httplib.h>

namespace {

using namespace genhub;
using genhub::testing::ToySpec;
using nlohmann::json;
using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace fs = std::filesystem;

// Tolerances.
constexpr double kRatioTol = 1e-3;
constexpr double kIdentityTol = 1e-8;
constexpr double kSymmetryRelTol = 1e-7;
constexpr double kDiagonalTol = 1e-9;
constexpr double kSqrtResidualTol = 1e-8;
constexpr int kSpdInstances = 200;
constexpr int kMaxDim = 16;
constexpr double kShiftRelTol = 0.10;
constexpr int kRandomRegistries = 100;

// Runtime limits in seconds.
constexpr double kLimit[9] = {0, 1, 30, 60, 10, 30, 10, 60, 30};

struct Outcome {
  bool pass = true;
  std::ostringstream notes;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (pass) notes << what;
      else notes << "; " << what;
      pass = false;
    }
  }
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------

void criterion1(Outcome& o) {
  struct Row { double rr, rs, expected; };
  const Row rows[] = {{33.61, 67.60, 0.497}, {28.85, 80.51, 0.358},
                      {43.31, 63.99, 0.677}, {41.61, 73.77, 0.564}};
  for (const auto& r : rows) {
    const auto got = metrics::fid_ratio(r.rs, r.rr);
    o.expect(std::abs(got.value - r.expected) <= kRatioTol,
             "r_FID(" + num(r.rr) + ", " + num(r.rs) + ") = " + num(got.value));
    o.expect(got.in_bounds, "row out of bounds");
    if (o.pass) o.notes << (&r == rows ? "" : ", ") << num(got.value, 4);
  }
}

MatrixXd random_spd(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> nd;
  MatrixXd b(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b(i, j) = nd(rng);
  return b * b.transpose() + 0.05 * MatrixXd::Identity(d, d);
}

VectorXd random_vec(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> nd;
  VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = nd(rng) * 3.0;
  return v;
}

void criterion2(Outcome& o) {
  std::mt19937_64 rng(20240601);
  double worst_identity = 0, worst_sym = 0, worst_diag = 0, worst_sqrt = 0;
  for (int t = 0; t < kSpdInstances; ++t) {
    const int d = 1 + static_cast<int>(rng() % kMaxDim);
    const metrics::GaussianStats x{random_vec(rng, d), random_spd(rng, d), 100};
    const metrics::GaussianStats y{random_vec(rng, d), random_spd(rng, d), 100};

    worst_identity = std::max(worst_identity, std::abs(metrics::frechet_distance(x, x)));
    const double xy = metrics::frechet_distance(x, y);
    const double yx = metrics::frechet_distance(y, x);
    worst_sym = std::max(worst_sym, std::abs(xy - yx) / std::max(1.0, std::abs(xy)));

    const MatrixXd s = metrics::psd_sqrt(x.cov);
    worst_sqrt = std::max(worst_sqrt, (s * s - x.cov).norm() / x.cov.norm());

    VectorXd a(d), b(d);
    std::uniform_real_distribution<double> ud(0.01, 5.0);
    for (int i = 0; i < d; ++i) {
      a(i) = ud(rng);
      b(i) = ud(rng);
    }
    const metrics::GaussianStats dx{x.mean, a.asDiagonal().toDenseMatrix(), 100};
    const metrics::GaussianStats dy{y.mean, b.asDiagonal().toDenseMatrix(), 100};
    const double closed = (x.mean - y.mean).squaredNorm() +
                          (a.cwiseSqrt() - b.cwiseSqrt()).squaredNorm();
    const double got = metrics::frechet_distance(dx, dy);
    worst_diag = std::max(worst_diag, std::abs(got - closed) / std::max(1.0, closed));
  }
  o.expect(worst_identity <= kIdentityTol, "identity " + num(worst_identity));
  o.expect(worst_sym <= kSymmetryRelTol, "symmetry " + num(worst_sym));
  o.expect(worst_diag <= kDiagonalTol, "diagonal " + num(worst_diag));
  o.expect(worst_sqrt <= kSqrtResidualTol, "sqrt residual " + num(worst_sqrt));
  if (o.pass) {
    o.notes << "identity " << num(worst_identity, 2) << ", symmetry " << num(worst_sym, 2)
            << ", diagonal " << num(worst_diag, 2) << ", sqrt " << num(worst_sqrt, 2);
  }
}

MatrixXd gaussian_rows(std::mt19937_64& rng, int n, int d, double shift) {
  std::normal_distribution<double> nd;
  MatrixXd m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = nd(rng) + shift;
  return m;
}

void criterion3(Outcome& o) {
  std::vector<double> medians;
  for (int n : {50, 200, 1000}) {
    std::vector<double> v;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      std::mt19937_64 rng(1000 + seed);
      const MatrixXd real = gaussian_rows(rng, n, 4, 0.0);
      const auto perm = metrics::split_permutation(static_cast<std::size_t>(n), seed);
      MatrixXd a(n / 2, 4), b(n - n / 2, 4);
      for (int i = 0; i < n; ++i) {
        if (i < n / 2) a.row(i) = real.row(static_cast<Eigen::Index>(perm[i]));
        else b.row(i - n / 2) = real.row(static_cast<Eigen::Index>(perm[i]));
      }
      v.push_back(metrics::frechet_distance(metrics::fit_gaussian(a), metrics::fit_gaussian(b)));
    }
    std::sort(v.begin(), v.end());
    medians.push_back((v[4] + v[5]) / 2);
  }
  o.expect(medians[0] > medians[1] && medians[1] > medians[2],
           "medians not decreasing: " + num(medians[0]) + ", " + num(medians[1]) + ", " +
               num(medians[2]));

  double lo = 1e300, hi = -1e300;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const MatrixXd a = gaussian_rows(rng, 2000, 2, 0.0);
    const MatrixXd b = gaussian_rows(rng, 2000, 2, 5.0);
    const double fd = metrics::frechet_distance(metrics::fit_gaussian(a), metrics::fit_gaussian(b));
    lo = std::min(lo, fd);
    hi = std::max(hi, fd);
  }
  o.expect(lo >= 50.0 * (1 - kShiftRelTol) && hi <= 50.0 * (1 + kShiftRelTol),
           "shift FD range [" + num(lo) + ", " + num(hi) + "]");
  if (o.pass) {
    o.notes << "medians " << num(medians[0], 3) << " > " << num(medians[1], 3) << " > "
            << num(medians[2], 3) << "; shift FD in [" << num(lo, 4) << ", " << num(hi, 4) << "]";
  }
}

std::vector<std::string> found_ids(const RegistryIndex& index, const std::vector<std::string>& v,
                                   SearchOperator op) {
  std::vector<std::string> out;
  for (const auto& id : find_models(index, SearchQuery(v, op)).ids()) out.push_back(id.str());
  return out;
}

bool subset(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

void criterion4(Outcome& o) {
  std::mt19937_64 rng(77);
  const std::vector<std::string> vocab = {"mammography", "patches", "mri", "brain",
                                          "ct",          "polyp",   "endoscopy", "lung"};
  int queries = 0;
  for (int t = 0; t < kRandomRegistries && o.pass; ++t) {
    const RegistryIndex index = genhub::testing::random_registry(rng, 20, vocab);
    for (int q = 0; q < 5; ++q) {
      std::vector<std::string> values;
      const int nv = 1 + static_cast<int>(rng() % 4);
      for (int i = 0; i < nv; ++i) values.push_back(vocab[rng() % vocab.size()]);
      const auto a = found_ids(index, values, SearchOperator::kAnd);
      const auto r = found_ids(index, values, SearchOperator::kOr);
      const auto x = found_ids(index, values, SearchOperator::kXor);
      o.expect(a == genhub::testing::oracle_find(index, values, "AND"), "AND differs");
      o.expect(r == genhub::testing::oracle_find(index, values, "OR"), "OR differs");
      o.expect(x == genhub::testing::oracle_find(index, values, "XOR"), "XOR differs");
      o.expect(subset(a, r), "AND not within OR");
      o.expect(subset(x, r), "XOR not within OR");
      const std::vector<std::string> one = {values[0]};
      const auto single = found_ids(index, one, SearchOperator::kAnd);
      o.expect(single == found_ids(index, one, SearchOperator::kOr) &&
                   single == found_ids(index, one, SearchOperator::kXor),
               "single-value operators disagree");
      ++queries;
    }
    for (bool asc : {true, false}) {
      const auto expected = genhub::testing::oracle_rank(index, "FID.ImageNet.real-syn", asc);
      if (expected.empty()) continue;
      const auto got = rank_models(index, "FID.ImageNet.real-syn",
                                   asc ? SortOrder::kAscending : SortOrder::kDescending);
      std::vector<std::pair<std::string, double>> items;
      for (const auto& it : got.items) items.emplace_back(it.model_id.str(), it.value);
      o.expect(items == expected, "rank differs from stable-sort oracle");
    }
  }
  if (o.pass) o.notes << kRandomRegistries << " registries, " << queries << " queries x 3 operators";
}

struct ToyHub {
  genhub::TempDir tmp;
  std::shared_ptr<genhub::testing::CountingTransport> transport =
      std::make_shared<genhub::testing::CountingTransport>();
  std::unique_ptr<Hub> hub;

  explicit ToyHub(const std::vector<ToySpec>& specs) {
    hub = std::make_unique<Hub>(genhub::testing::test_hub_config(tmp.path() / "cache"),
                                genhub::testing::toy_registry(tmp.path(), specs), transport);
  }
};

std::map<std::int64_t, std::string> record_bytes(const GenerateResult& r) {
  std::map<std::int64_t, std::string> out;
  for (const auto& rec : r.records) {
    std::string all;
    for (const auto& [kind, path] : rec.file_paths) all += kind + ":" + path.filename().string() + ":" + sha256_file(path) + ";";
    out[rec.index] = all;
  }
  return out;
}

void criterion5(Outcome& o) {
  ToyHub t({ToySpec{}});
  auto run = [&](const std::string& dir, int chunk) {
    GenerateRequest req;
    req.model_id = ModelId("00001_TOY");
    req.num_samples = 100;
    req.seed = 7;
    req.save_images = true;
    req.output_path = t.tmp.path() / dir;
    req.chunk_size = chunk;
    return t.hub->generate(req);
  };
  const auto a = run("a", 32);
  const auto b = run("b", 32);
  const auto c = run("c", 128);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(t.tmp.path() / "a")) files += e.is_regular_file();
  o.expect(files == 100, "expected 100 files, found " + std::to_string(files));
  o.expect(genhub::testing::tree_digest(t.tmp.path() / "a") ==
               genhub::testing::tree_digest(t.tmp.path() / "b"),
           "two runs differ");
  o.expect(record_bytes(a) == record_bytes(c) && a.records.size() == 100,
           "chunk_size 32 and 128 records differ");

  std::mt19937_64 rng(5);
  auto sample = [&] {
    // Log-uniform over [1, 1e6] so small and large values are both covered.
    std::uniform_real_distribution<double> ud(0.0, 6.0);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::pow(10.0, ud(rng))));
  };
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t n = sample();
    const std::int64_t c = sample();
    const auto plan = plan_chunks(n, c);
    std::int64_t sum = 0;
    bool shape = !plan.empty();
    for (std::size_t k = 0; k < plan.size(); ++k) {
      sum += plan[k];
      if (k + 1 < plan.size() ? plan[k] != c : (plan[k] < 1 || plan[k] > c)) shape = false;
    }
    o.expect(sum == n && shape && plan.size() == static_cast<std::size_t>((n + c - 1) / c),
             "plan_chunks(" + std::to_string(n) + ", " + std::to_string(c) + ")");
    if (!o.pass) break;
  }
  if (o.pass) o.notes << "100 files, byte-identical reruns, chunk 32 == 128, 2000 plan samples";
}

void criterion6(Outcome& o) {
  genhub::TempDir tmp;
  const auto toy = genhub::testing::build_toy_model(tmp.path(), ToySpec{});
  auto transport = std::make_shared<genhub::testing::CountingTransport>();
  PackageStore store(tmp.path() / "cache", transport, {3, std::chrono::milliseconds(1)});
  const PackageRef ref = PackageRef::from(toy.meta);

  transport->corrupt = true;
  bool mismatch = false;
  try {
    store.ensure_present(ref);
  } catch (const Error& e) {
    mismatch = e.kind() == ErrorKind::kChecksumMismatch;
  }
  o.expect(mismatch, "flipped byte not reported as checksum mismatch");
  o.expect(!store.lookup(ref).has_value() && !fs::exists(store.slot_dir(ref) / "unpacked"),
           "cache entry left after mismatch");

  transport->corrupt = false;
  store.ensure_present(ref);
  const int after_first = transport->fetches;
  for (int i = 0; i < 5; ++i) store.ensure_present(ref);
  o.expect(transport->fetches == after_first,
           "repeated ensure_present fetched " + std::to_string(transport->fetches - after_first));

  genhub::testing::write_toy_package(tmp.path() / "pkg", ToySpec{});
  const auto p1 = package_model(tmp.path() / "pkg", tmp.path() / "p1.zip");
  const auto p2 = package_model(tmp.path() / "pkg", tmp.path() / "p2.zip");
  o.expect(p1.checksum_sha256 == p2.checksum_sha256, "packaging not deterministic");
  if (o.pass) o.notes << "mismatch rejected, 0 refetches, checksum " << p1.checksum_sha256.substr(0, 12);
}

void criterion7(Outcome& o) {
  genhub::TempDir tmp;
  StubServer server;
  server.start();

  ToySpec spec;
  spec.id = "00100_CONTRIB";
  genhub::testing::write_toy_package(tmp.path() / "pkg", spec);
  ContributionInput in;
  in.model_id = ModelId(spec.id);
  in.package_dir = tmp.path() / "pkg";
  in.keywords = {"contributed", "toy"};
  in.title = "Contributed toy";
  in.license = "MIT";
  in.storage_token = "storage-token";
  in.tracker_token = "tracker-token";
  HttpStorageClient storage(server.base_url(), in.storage_token, {3, std::chrono::milliseconds(1)});
  HttpTrackerClient tracker(server.base_url(), in.tracker_token, {3, std::chrono::milliseconds(1)});
  ContributeOptions opts;
  opts.work_dir = tmp.path() / "work";
  opts.test_config = genhub::testing::test_hub_config(tmp.path() / "unused");
  const auto result = contribute(in, storage, tracker, opts);
  o.expect(result.receipt.checksum_sha256 == result.archive.checksum_sha256,
           "receipt checksum differs from archive");
  o.expect(result.submission.status == SubmissionStatus::kOpen, "submission not open");

  const RegistryIndex base = genhub::testing::toy_registry(tmp.path(), {ToySpec{}});
  const RegistryIndex merged = upsert_entry(base, result.submission.metadata);
  Hub hub(genhub::testing::test_hub_config(tmp.path() / "cache"), merged);
  const auto found = hub.find_models(SearchQuery({"contributed"}, SearchOperator::kAnd)).ids();
  o.expect(found.size() == 1 && found[0] == in.model_id, "contributed model not found");
  GenerateRequest req;
  req.model_id = in.model_id;
  req.num_samples = 4;
  req.seed = 1;
  o.expect(hub.generate(req).records.size() == 4, "generate on contributed model failed");

  ToySpec a, b, c;
  a.id = "00001_A";
  b.id = "00002_B";
  c.id = "00003_C";
  {
    Hub three(genhub::testing::test_hub_config(tmp.path() / "cache3"),
              genhub::testing::toy_registry(tmp.path() / "three", {a, b, c}));
    const auto report = test_all(three, 3);
    o.expect(report.passed_count() == 3 && report.rows.size() == 3,
             "fixture registry: " + std::to_string(report.passed_count()) + "/3 passed");
  }
  b.entrypoint = "python3 missing_entrypoint.py --request {request}";
  Hub broken(genhub::testing::test_hub_config(tmp.path() / "cache4"),
             genhub::testing::toy_registry(tmp.path() / "broken", {a, b, c}));
  const auto report = test_all(broken, 3);
  bool isolated = report.rows.size() == 3 && report.passed_count() == 2;
  for (const auto& row : report.rows) {
    if ((row.model_id.str() == "00002_B") == row.passed()) isolated = false;
  }
  o.expect(isolated, "broken entrypoint not isolated");
  if (o.pass) o.notes << "receipt matches, upsert/find/generate ok, 3/3 then 2/3 with 00002_B isolated";
  server.stop();
}

void conforms(Outcome& o, const std::string& schema, const json& body) {
  const auto v = genhub::testing::schema_violations(genhub::testing::load_schema(schema), body);
  o.expect(v.empty(), schema + ": " + (v.empty() ? "" : v.front()));
}

void criterion8(Outcome& o) {
  genhub::TempDir tmp;
  auto metric = [](double v) { return json{{"FID", {{"ImageNet", {{"real-syn", v}}}}}}; };
  ToySpec r1, r2, r3;
  r1.id = "00001_ROW1";
  r1.metrics = metric(80.51);
  r2.id = "00002_ROW2";
  r2.metrics = metric(67.60);
  r2.latent_dim = 4;
  r3.id = "00003_ROW3";
  r3.metrics = metric(150.16);
  r3.keywords = {"toy", "mask"};
  r3.with_mask = true;
  Hub hub(genhub::testing::test_hub_config(tmp.path() / "cache"),
          genhub::testing::toy_registry(tmp.path(), {r1, r2, r3}));
  ServiceConfig cfg;
  cfg.port = 0;
  cfg.output_root = tmp.path() / "served";
  cfg.async_threshold = 8;
  Service service(hub, cfg);
  service.start();
  httplib::Client cli("127.0.0.1", service.port());
  cli.set_read_timeout(60, 0);

  auto get = [&](const std::string& path) {
    auto res = cli.Get(path);
    return res ? std::make_pair(res->status, json::parse(res->body)) : std::make_pair(0, json());
  };
  auto post = [&](const std::string& path, const json& body) {
    auto res = cli.Post(path, body.dump(), "application/json");
    return res ? std::make_pair(res->status, json::parse(res->body)) : std::make_pair(0, json());
  };

  const auto models = get("/v1/models");
  conforms(o, "models", models.second);
  std::vector<std::string> lib_ids;
  for (const auto& id : hub.index()->ids()) lib_ids.push_back(id.str());
  o.expect(models.second["model_ids"].get<std::vector<std::string>>() == lib_ids, "models parity");

  const auto model = get("/v1/models/00001_ROW1");
  conforms(o, "model", model.second);
  o.expect(model.second["metadata"] == metadata_to_json(hub.metadata(ModelId("00001_ROW1"))),
           "model parity");

  const auto search = post("/v1/search", {{"values", {"mask", "toy"}}, {"operator", "XOR"}});
  conforms(o, "search", search.second);
  std::vector<std::string> lib_found;
  for (const auto& id : hub.find_models(SearchQuery({"mask", "toy"}, SearchOperator::kXor)).ids()) {
    lib_found.push_back(id.str());
  }
  o.expect(search.second["model_ids"].get<std::vector<std::string>>() == lib_found, "search parity");

  const auto rank = post("/v1/rank", {{"metric", "FID.ImageNet.real-syn"}, {"order", "ascending"}});
  conforms(o, "rank", rank.second);
  const auto lib_rank = hub.rank_models("FID.ImageNet.real-syn", SortOrder::kAscending);
  std::vector<double> values;
  for (const auto& item : rank.second["items"]) values.push_back(item["value"].get<double>());
  o.expect(values == std::vector<double>{67.60, 80.51, 150.16}, "rank order");
  for (std::size_t i = 0; i < lib_rank.items.size() && i < values.size(); ++i) {
    o.expect(rank.second["items"][i]["model_id"] == lib_rank.items[i].model_id.str(),
             "rank parity");
  }

  const auto gen = post("/v1/models/00001_ROW1/generate", {{"num_samples", 3}, {"seed", 9}});
  conforms(o, "generate", gen.second);
  GenerateRequest req;
  req.model_id = ModelId("00001_ROW1");
  req.num_samples = 3;
  req.seed = 9;
  req.save_images = true;
  req.output_path = tmp.path() / "direct";
  const auto direct = hub.generate(req);
  o.expect(gen.second["records"].size() == 3, "generate record count");
  for (std::size_t i = 0; i < direct.records.size(); ++i) {
    const fs::path served = gen.second["records"][i]["files"]["image"].get<std::string>();
    o.expect(sha256_file(served) == sha256_file(direct.records[i].file_paths.at("image")),
             "generate parity");
  }

  const auto queued = post("/v1/models/00001_ROW1/generate", {{"num_samples", 12}, {"seed", 2}});
  conforms(o, "job", queued.second);
  o.expect(queued.first == 202, "large generate not queued");
  service.wait_for_jobs();
  const auto job = get("/v1/jobs/" + queued.second.value("job_id", std::string("none")));
  conforms(o, "job", job.second);
  o.expect(job.second["state"] == "done", "job not done");

  const auto explore = post("/v1/models/00002_ROW2/explore", {{"latent_vector", {0.1, 0.2, 0.3, 0.4}}});
  conforms(o, "explore", explore.second);
  GenerateRequest z;
  z.model_id = ModelId("00002_ROW2");
  z.seed = 0;
  z.kwargs[std::string(kLatentParam)] = json{0.1, 0.2, 0.3, 0.4};
  const auto zres = hub.generate(z);
  o.expect(explore.second["outputs"]["image"]["data_base64"] ==
               base64_encode(zres.records[0].payloads.at("image")),
           "explore parity");

  for (const auto& [status, body] :
       {get("/v1/models/99999_NONE"), post("/v1/search", {{"values", {"x"}}, {"operator", "NAND"}}),
        post("/v1/models/00002_ROW2/explore", {{"latent_vector", {1.0}}}), get("/v1/nothing")}) {
    conforms(o, "error", body);
    o.expect(status >= 400, "error status");
  }
  service.stop();
  if (o.pass) o.notes << "8 schemas, HTTP == library, ascending 67.60 < 80.51 < 150.16";
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
      {"r_FID arithmetic on published table rows", criterion1},
      {"Frechet engine oracle suite", criterion2},
      {"real-real lower bound and mean-shift Monte Carlo", criterion3},
      {"search/rank oracle equivalence", criterion4},
      {"generate determinism and chunking", criterion5},
      {"package integrity", criterion6},
      {"offline contribution loop", criterion7},
      {"service contract", criterion8},
  };
  int failures = 0;
  for (int i = 0; i < 8; ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("threw: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.expect(secs < kLimit[i + 1], "runtime " + num(secs, 3) + " s over limit");
    failures += !o.pass;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs/%.0fs", secs, kLimit[i + 1]);
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << " [" << timing
              << "] " << criteria[i].first << ": " << o.notes.str() << std::endl;
  }
  return failures;
}
