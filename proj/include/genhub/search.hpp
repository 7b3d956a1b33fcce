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

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "genhub/registry.hpp"

namespace genhub {

enum class SearchOperator { kAnd, kOr, kXor };

// Accepts "AND", "OR", "XOR" in any case; throws kUnknownOperator.
SearchOperator parse_operator(std::string_view text);
std::string_view operator_name(SearchOperator op);

// Values are lowercased and de-duplicated on construction.
class SearchQuery {
 public:
  // Throws kBadQuery when no non-empty value remains.
  SearchQuery(const std::vector<std::string>& values, SearchOperator op);

  const std::vector<std::string>& values() const { return values_; }
  SearchOperator op() const { return op_; }

 private:
  std::vector<std::string> values_;
  SearchOperator op_;
};

struct MatchedEntry {
  ModelId model_id;
  std::set<std::string> matched_values;
  std::vector<std::string> hit_paths;
};

struct MatchCandidates {
  SearchQuery query;
  std::vector<MatchedEntry> entries;  // ordered by model id

  std::vector<ModelId> ids() const;
};

enum class SortOrder { kAscending, kDescending };

SortOrder parse_order(std::string_view text);
std::string_view order_name(SortOrder order);

struct RankedItem {
  ModelId model_id;
  double value = 0.0;

  friend bool operator==(const RankedItem&, const RankedItem&) = default;
};

struct RankedList {
  std::string metric_path;
  SortOrder order = SortOrder::kAscending;
  std::vector<RankedItem> items;
  std::vector<ModelId> excluded;  // considered models lacking the metric
};

// Field paths (e.g. "selection.keywords[0]") of every string leaf whose
// lowercase text contains lowercase(value). Numbers are never searched.
std::vector<std::string> recursive_match(std::string_view value,
                                         const ModelMetadata& meta);

MatchCandidates find_models(const RegistryIndex& index,
                            const SearchQuery& query);

// Ties are broken by ascending model id regardless of order. Throws
// kMetricMissing when no considered model carries the metric and
// kUnknownModel for ids not in the index.
RankedList rank_models(const RegistryIndex& index, std::string_view metric_path,
                       SortOrder order,
                       const std::optional<std::vector<ModelId>>& ids = {});

// rank_models over the true matches of find_models. Throws kEmptyMatch when
// the search finds nothing.
RankedList find_rank(const RegistryIndex& index, const SearchQuery& query,
                     std::string_view metric_path, SortOrder order);

}  // namespace genhub
