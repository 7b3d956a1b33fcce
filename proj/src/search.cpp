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

#include "genhub/search.hpp"

#include <algorithm>
#include <cctype>

#include "genhub/error.hpp"

namespace genhub {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

void walk_strings(const json& node, const std::string& path,
                  const std::string& needle, std::vector<std::string>& hits) {
  if (node.is_string()) {
    if (lower(node.get_ref<const std::string&>()).find(needle) !=
        std::string::npos) {
      hits.push_back(path);
    }
  } else if (node.is_object()) {
    for (const auto& [key, child] : node.items()) {
      walk_strings(child, path + "." + key, needle, hits);
    }
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      walk_strings(node[i], path + "[" + std::to_string(i) + "]", needle,
                   hits);
    }
  }
}

bool accepts(SearchOperator op, std::size_t matched, std::size_t total) {
  switch (op) {
    case SearchOperator::kAnd: return matched == total;
    case SearchOperator::kOr: return matched >= 1;
    case SearchOperator::kXor: return matched == 1;
  }
  return false;
}

}  // namespace

SearchOperator parse_operator(std::string_view text) {
  const std::string t = lower(text);
  if (t == "and") return SearchOperator::kAnd;
  if (t == "or") return SearchOperator::kOr;
  if (t == "xor") return SearchOperator::kXor;
  throw Error(ErrorKind::kUnknownOperator,
              "unknown search operator '" + std::string(text) +
                  "' (expected AND, OR or XOR)");
}

std::string_view operator_name(SearchOperator op) {
  switch (op) {
    case SearchOperator::kAnd: return "AND";
    case SearchOperator::kOr: return "OR";
    case SearchOperator::kXor: return "XOR";
  }
  return "OR";
}

SearchQuery::SearchQuery(const std::vector<std::string>& values,
                         SearchOperator op)
    : op_(op) {
  for (const auto& v : values) {
    std::string l = lower(v);
    if (l.empty()) continue;
    if (std::find(values_.begin(), values_.end(), l) == values_.end()) {
      values_.push_back(std::move(l));
    }
  }
  if (values_.empty()) {
    throw Error(ErrorKind::kBadQuery, "search query needs at least one value");
  }
}

std::vector<ModelId> MatchCandidates::ids() const {
  std::vector<ModelId> out;
  for (const auto& e : entries) out.push_back(e.model_id);
  return out;
}

SortOrder parse_order(std::string_view text) {
  const std::string t = lower(text);
  if (t == "ascending" || t == "asc") return SortOrder::kAscending;
  if (t == "descending" || t == "desc") return SortOrder::kDescending;
  throw Error(ErrorKind::kBadQuery, "unknown order '" + std::string(text) +
                                        "' (expected ascending or descending)");
}

std::string_view order_name(SortOrder order) {
  return order == SortOrder::kAscending ? "ascending" : "descending";
}

std::vector<std::string> recursive_match(std::string_view value,
                                         const ModelMetadata& meta) {
  std::vector<std::string> hits;
  const std::string needle = lower(value);
  const json doc = metadata_to_json(meta);
  for (const char* key : {"execution", "selection", "description"}) {
    walk_strings(doc.at(key), key, needle, hits);
  }
  return hits;
}

MatchCandidates find_models(const RegistryIndex& index,
                            const SearchQuery& query) {
  MatchCandidates result{query, {}};
  const std::size_t total = query.values().size();
  for (const auto& [id, meta] : index.models()) {
    MatchedEntry entry{id, {}, {}};
    for (const auto& value : query.values()) {
      auto hits = recursive_match(value, meta);
      if (hits.empty()) continue;
      entry.matched_values.insert(value);
      for (auto& h : hits) {
        if (std::find(entry.hit_paths.begin(), entry.hit_paths.end(), h) ==
            entry.hit_paths.end()) {
          entry.hit_paths.push_back(std::move(h));
        }
      }
    }
    if (accepts(query.op(), entry.matched_values.size(), total)) {
      result.entries.push_back(std::move(entry));
    }
  }
  return result;
}

RankedList rank_models(const RegistryIndex& index, std::string_view metric_path,
                       SortOrder order,
                       const std::optional<std::vector<ModelId>>& ids) {
  RankedList list;
  list.metric_path = std::string(metric_path);
  list.order = order;

  std::vector<const ModelMetadata*> considered;
  if (ids) {
    std::vector<ModelId> unique = *ids;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (const auto& id : unique) considered.push_back(&get_metadata(index, id));
  } else {
    for (const auto& [_, meta] : index.models()) considered.push_back(&meta);
  }

  for (const ModelMetadata* meta : considered) {
    if (auto v = meta->selection.metric(metric_path)) {
      list.items.push_back({meta->model_id, *v});
    } else {
      list.excluded.push_back(meta->model_id);
    }
  }
  if (list.items.empty()) {
    throw Error(ErrorKind::kMetricMissing,
                "no considered model carries metric '" + list.metric_path + "'",
                json{{"metric", list.metric_path}});
  }

  std::sort(list.items.begin(), list.items.end(),
            [order](const RankedItem& a, const RankedItem& b) {
              if (a.value != b.value) {
                return order == SortOrder::kAscending ? a.value < b.value
                                                      : a.value > b.value;
              }
              return a.model_id < b.model_id;
            });
  return list;
}

RankedList find_rank(const RegistryIndex& index, const SearchQuery& query,
                     std::string_view metric_path, SortOrder order) {
  MatchCandidates matches = find_models(index, query);
  if (matches.entries.empty()) {
    json values = query.values();
    throw Error(ErrorKind::kEmptyMatch, "search matched no models",
                json{{"values", values},
                     {"operator", std::string(operator_name(query.op()))}});
  }
  return rank_models(index, metric_path, order, matches.ids());
}

}  // namespace genhub
