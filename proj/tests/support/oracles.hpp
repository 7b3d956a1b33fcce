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

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "genhub/registry.hpp"
#include "genhub/search.hpp"

namespace genhub::testing {

// Independent re-statement of the search semantics: enumerate every
// (model, value) pair by scanning each string leaf, then apply set logic.
inline std::vector<std::string> oracle_find(const RegistryIndex& index,
                                            std::vector<std::string> values,
                                            const std::string& op) {
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  std::set<std::string> uniq;
  for (auto& v : values) uniq.insert(lower(v));
  std::vector<std::string> out;
  for (const auto& [id, meta] : index.models()) {
    std::vector<std::string> leaves = meta.selection.keywords;
    for (const auto& s : {meta.execution.package_url, meta.execution.checksum_sha256,
                          meta.execution.extension_weights, meta.selection.modality,
                          meta.selection.organ, meta.description.title,
                          meta.description.training_dataset, meta.description.license,
                          meta.description.date, meta.description.publication}) {
      leaves.push_back(s);
    }
    for (const auto& d : meta.execution.dependencies) leaves.push_back(d);
    std::size_t hit = 0;
    for (const auto& v : uniq) {
      const bool any = std::any_of(leaves.begin(), leaves.end(), [&](const std::string& leaf) {
        return lower(leaf).find(v) != std::string::npos;
      });
      hit += any;
    }
    const bool keep = (op == "AND" && hit == uniq.size()) || (op == "OR" && hit > 0) ||
                      (op == "XOR" && hit == 1);
    if (keep) out.push_back(id.str());
  }
  return out;
}

// Stable sort on (value, id) over models carrying the metric.
inline std::vector<std::pair<std::string, double>> oracle_rank(const RegistryIndex& index,
                                                               const std::string& metric,
                                                               bool ascending) {
  std::vector<std::pair<std::string, double>> rows;
  for (const auto& [id, meta] : index.models()) {
    if (auto v = meta.selection.metric(metric)) rows.emplace_back(id.str(), *v);
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return ascending ? a.second < b.second : a.second > b.second;
    return a.first < b.first;
  });
  return rows;
}

// Models drawing keywords from a small vocabulary so that queries overlap.
// Numeric metric values are drawn from a coarse grid to force ties.
inline RegistryIndex random_registry(std::mt19937_64& rng, int max_models,
                                     const std::vector<std::string>& vocab) {
  RegistryIndex::Models models;
  const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_models));
  for (int i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "%05d_R%d", static_cast<int>(rng() % 100000), i);
    ModelMetadata m;
    m.model_id = ModelId(id);
    m.execution.package_url = "https://example.org/p.zip";
    m.execution.checksum_sha256 = std::string(64, 'a');
    const int k = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < k; ++j) {
      auto w = vocab[rng() % vocab.size()];
      if (std::find(m.selection.keywords.begin(), m.selection.keywords.end(), w) ==
          m.selection.keywords.end()) {
        m.selection.keywords.push_back(w);
      }
    }
    m.selection.modality = rng() % 2 ? vocab[rng() % vocab.size()] : "";
    if (rng() % 4 != 0) {
      m.selection.metrics = {{"FID", {{"ImageNet", {{"real-syn", (rng() % 20) * 5.0}}}}}};
    }
    m.description.title = "Title " + std::to_string(i);
    m.description.license = "MIT";
    models.emplace(m.model_id, m);
  }
  return RegistryIndex("1.0.0", std::move(models));
}

}  // namespace genhub::testing
