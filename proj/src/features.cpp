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

#include "genhub/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "genhub/error.hpp"
#include "genhub/fs_util.hpp"
#include "genhub/process.hpp"

namespace genhub::metrics {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Tap {
  int lo = 0;
  int hi = 0;
  double w = 0.0;  // weight of hi
};

std::vector<Tap> taps(int src, int dst) {
  std::vector<Tap> out(dst);
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double x = (i + 0.5) * scale - 0.5;
    x = std::clamp(x, 0.0, static_cast<double>(src - 1));
    const int lo = static_cast<int>(std::floor(x));
    out[i] = {lo, std::min(lo + 1, src - 1), x - lo};
  }
  return out;
}

}  // namespace

FeatureMatrix IdentityPoolExtractor::extract(const std::vector<NamedImage>& images) const {
  FeatureMatrix out;
  out.extractor_id = id();
  if (images.empty()) return out;
  const int channels = images.front().second.channels;
  out.rows.resize(static_cast<Eigen::Index>(images.size()), kPoolSize * kPoolSize * channels);
  for (std::size_t r = 0; r < images.size(); ++r) {
    const Image& img = images[r].second;
    if (img.channels != channels || img.width <= 0 || img.height <= 0) {
      throw Error(ErrorKind::kShapeMismatch,
                  "image " + images[r].first + " does not match the extractor input shape",
                  {{"sample_id", images[r].first}, {"channels", img.channels},
                   {"expected_channels", channels}});
    }
    const auto tx = taps(img.width, kPoolSize);
    const auto ty = taps(img.height, kPoolSize);
    Eigen::Index col = 0;
    for (int c = 0; c < channels; ++c) {
      for (int y = 0; y < kPoolSize; ++y) {
        for (int x = 0; x < kPoolSize; ++x) {
          const Tap& h = tx[x];
          const Tap& v = ty[y];
          const double top = img.at(h.lo, v.lo, c) * (1 - h.w) + img.at(h.hi, v.lo, c) * h.w;
          const double bot = img.at(h.lo, v.hi, c) * (1 - h.w) + img.at(h.hi, v.hi, c) * h.w;
          out.rows(static_cast<Eigen::Index>(r), col++) = top * (1 - v.w) + bot * v.w;
        }
      }
    }
    out.sample_ids.push_back(images[r].first);
  }
  return out;
}

ExternalFileExtractor::ExternalFileExtractor(const fs::path& path)
    : all_(read_feature_file(path)) {
  id_ = all_.extractor_id;
  for (std::size_t i = 0; i < all_.sample_ids.size(); ++i) {
    by_id_.emplace(all_.sample_ids[i], static_cast<Eigen::Index>(i));
  }
}

FeatureMatrix ExternalFileExtractor::extract(const std::vector<NamedImage>& images) const {
  FeatureMatrix out;
  out.extractor_id = id_;
  out.rows.resize(static_cast<Eigen::Index>(images.size()), all_.dim());
  json missing = json::array();
  for (std::size_t r = 0; r < images.size(); ++r) {
    auto it = by_id_.find(images[r].first);
    if (it == by_id_.end()) {
      missing.push_back(images[r].first);
      continue;
    }
    out.rows.row(static_cast<Eigen::Index>(r)) = all_.rows.row(it->second);
    out.sample_ids.push_back(images[r].first);
  }
  if (!missing.empty()) {
    throw Error(ErrorKind::kMissingFeatures,
                std::to_string(missing.size()) + " sample(s) have no row in the feature file",
                {{"missing", missing}});
  }
  return out;
}

CommandExtractor::CommandExtractor(std::string extractor_id, std::string command,
                                   std::string normalization,
                                   std::chrono::milliseconds timeout)
    : id_(std::move(extractor_id)),
      command_(std::move(command)),
      normalization_(std::move(normalization)),
      timeout_(timeout) {}

FeatureMatrix CommandExtractor::extract(const std::vector<NamedImage>& images) const {
  TempDir run("genhub-extract");
  const fs::path in_dir = run.path() / "in";
  fs::create_directories(in_dir);
  json list = json::array();
  for (std::size_t i = 0; i < images.size(); ++i) {
    const fs::path p = in_dir / ("img_" + std::to_string(i) + ".png");
    save_png(p, images[i].second);
    list.push_back({{"sample_id", images[i].first}, {"path", p.string()}});
  }
  const fs::path out_path = run.path() / "features.json";
  const fs::path req_path = run.path() / "request.json";
  write_file_atomic(req_path, json{{"images", list},
                                   {"normalization", normalization_},
                                   {"output_path", out_path.string()}}
                                  .dump(2));
  std::string cmd = command_;
  for (std::size_t pos; (pos = cmd.find("{request}")) != std::string::npos;) {
    cmd.replace(pos, 9, shell_quote(req_path.string()));
  }
  const fs::path log = run.path() / "run.log";
  const ProcessResult res = run_shell(cmd, run.path(), log, timeout_);
  if (res.timed_out) {
    throw Error(ErrorKind::kTimeout, "feature extractor timed out");
  }
  if (res.exit_code != 0) {
    throw Error(ErrorKind::kSubprocessFailed,
                "feature extractor exited with " + std::to_string(res.exit_code),
                {{"log_tail", file_tail(log)}});
  }
  FeatureMatrix got = read_feature_file(out_path);
  got.extractor_id = id_;
  std::map<std::string, Eigen::Index> by_id;
  for (std::size_t i = 0; i < got.sample_ids.size(); ++i) {
    by_id.emplace(got.sample_ids[i], static_cast<Eigen::Index>(i));
  }
  FeatureMatrix out;
  out.extractor_id = id_;
  out.rows.resize(static_cast<Eigen::Index>(images.size()), got.dim());
  for (std::size_t r = 0; r < images.size(); ++r) {
    auto it = by_id.find(images[r].first);
    if (it == by_id.end()) {
      throw Error(ErrorKind::kMissingFeatures,
                  "feature extractor returned no row for " + images[r].first);
    }
    out.rows.row(static_cast<Eigen::Index>(r)) = got.rows.row(it->second);
    out.sample_ids.push_back(images[r].first);
  }
  return out;
}

FeatureMatrix extract_features(const std::vector<NamedImage>& images,
                               const FeatureExtractor& extractor) {
  FeatureMatrix m = extractor.extract(images);
  if (!m.rows.allFinite()) {
    throw Error(ErrorKind::kNonFinite, "extractor " + extractor.id() + " produced NaN or Inf");
  }
  return m;
}

FeatureMatrix read_feature_file(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array()) {
    throw Error(ErrorKind::kParse, path.string() + ": expected an object with a rows array");
  }
  FeatureMatrix m;
  m.extractor_id = doc.value("extractor_id", std::string("external-file"));
  const auto& rows = doc["rows"];
  Eigen::Index dim = doc.contains("dim") ? doc["dim"].get<Eigen::Index>()
                     : rows.empty()      ? 0
                                         : static_cast<Eigen::Index>(rows[0]["features"].size());
  m.rows.resize(static_cast<Eigen::Index>(rows.size()), dim);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto& feats = row.at("features");
    if (!feats.is_array() || static_cast<Eigen::Index>(feats.size()) != dim) {
      throw Error(ErrorKind::kShapeMismatch,
                  path.string() + ": row " + std::to_string(i) + " does not have " +
                      std::to_string(dim) + " features");
    }
    std::string sid = row.at("sample_id").get<std::string>();
    if (!seen.insert(sid).second) {
      throw Error(ErrorKind::kParse, path.string() + ": duplicate sample_id " + sid);
    }
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (!feats[j].is_number()) {
        throw Error(ErrorKind::kNonFinite, path.string() + ": non-numeric feature in row " +
                                               std::to_string(i));
      }
      m.rows(static_cast<Eigen::Index>(i), j) = feats[j].get<double>();
    }
    m.sample_ids.push_back(std::move(sid));
  }
  if (!m.rows.allFinite()) {
    throw Error(ErrorKind::kNonFinite, path.string() + " contains NaN or Inf");
  }
  return m;
}

void write_feature_file(const fs::path& path, const FeatureMatrix& features) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < features.n(); ++i) {
    json feats = json::array();
    for (Eigen::Index j = 0; j < features.dim(); ++j) feats.push_back(features.rows(i, j));
    const std::string sid = static_cast<std::size_t>(i) < features.sample_ids.size()
                                ? features.sample_ids[static_cast<std::size_t>(i)]
                                : std::to_string(i);
    rows.push_back({{"sample_id", sid}, {"features", feats}});
  }
  write_file_atomic(path, json{{"extractor_id", features.extractor_id},
                               {"dim", features.dim()},
                               {"rows", rows}}
                              .dump(2) +
                              "\n");
}

}  // namespace genhub::metrics
