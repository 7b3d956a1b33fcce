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

#include "genhub/registry.hpp"

#include <cctype>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include "genhub/error.hpp"

namespace genhub {

using nlohmann::json;

namespace {

const std::regex& model_id_pattern() {
  static const std::regex re(R"(^\d{5}_[A-Z0-9_]+$)");
  return re;
}

const std::regex& date_pattern() {
  // Calendar date, optionally followed by a time and zone designator.
  static const std::regex re(
      R"(^\d{4}-\d{2}-\d{2}([T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?$)");
  return re;
}

bool is_hex64(const std::string& s) {
  if (s.size() != 64) return false;
  for (char c : s) {
    const bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') ||
                     (c >= 'A' && c <= 'F');
    if (!hex) return false;
  }
  return true;
}

bool has_url_scheme(const std::string& url) {
  const auto pos = url.find("://");
  return pos != std::string::npos && pos > 0 && pos + 3 < url.size();
}

void collect_metric_findings(const json& node, const std::string& path,
                             std::vector<Finding>& out) {
  if (node.is_object()) {
    for (const auto& [key, child] : node.items()) {
      collect_metric_findings(child, path + "." + key, out);
    }
    return;
  }
  if (node.is_number()) {
    if (!std::isfinite(node.get<double>())) {
      out.push_back({path, "metric must be finite"});
    }
    return;
  }
  out.push_back({path, "metric leaves must be numbers"});
}

[[noreturn]] void schema_error(const std::string& path,
                               const std::string& what) {
  throw Error(ErrorKind::kSchema, path + ": " + what, json{{"path", path}});
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing field");
  return *it;
}

std::string string_field(const json& obj, const char* key,
                         const std::string& path, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) schema_error(path + "." + key, "missing field");
    return {};
  }
  if (!it->is_string()) schema_error(path + "." + key, "expected a string");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& obj, const char* key,
                                     const std::string& path, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) schema_error(path + "." + key, "missing field");
    return {};
  }
  if (!it->is_array()) schema_error(path + "." + key, "expected a list");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& v = (*it)[i];
    if (!v.is_string()) {
      schema_error(path + "." + key + "[" + std::to_string(i) + "]",
                   "expected a string");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

const json& section(const json& body, const char* key,
                    const std::string& prefix) {
  const json& s = require(body, key, prefix);
  if (!s.is_object()) schema_error(prefix + "." + key, "expected an object");
  return s;
}

}  // namespace

bool ModelId::is_valid(std::string_view value) {
  return std::regex_match(value.begin(), value.end(), model_id_pattern());
}

bool ValidationReport::has_path(std::string_view path) const {
  for (const auto& f : findings) {
    if (f.path == path) return true;
  }
  return false;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < findings.size(); ++i) {
    if (i) os << "; ";
    os << findings[i].path << ": " << findings[i].message;
  }
  return os.str();
}

std::optional<double> SelectionSection::metric(
    std::string_view dotted_path) const {
  const json* node = &metrics;
  std::size_t start = 0;
  while (start <= dotted_path.size()) {
    const auto dot = dotted_path.find('.', start);
    const auto end = dot == std::string_view::npos ? dotted_path.size() : dot;
    const std::string key(dotted_path.substr(start, end - start));
    if (!node->is_object()) return std::nullopt;
    auto it = node->find(key);
    if (it == node->end()) return std::nullopt;
    node = &*it;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  if (!node->is_number()) return std::nullopt;
  return node->get<double>();
}

std::vector<ModelId> RegistryIndex::ids() const {
  std::vector<ModelId> out;
  out.reserve(models_.size());
  for (const auto& [id, _] : models_) out.push_back(id);
  return out;
}

json metadata_to_json(const ModelMetadata& meta) {
  const auto& e = meta.execution;
  json defaults = json::object();
  for (const auto& [k, v] : e.generate_defaults) defaults[k] = v;
  const auto& s = meta.selection;
  const auto& d = meta.description;
  return json{
      {"execution",
       {{"package_url", e.package_url},
        {"checksum_sha256", e.checksum_sha256},
        {"package_size_bytes", e.package_size_bytes},
        {"image_size", e.image_size},
        {"generate_defaults", defaults},
        {"dependencies", e.dependencies},
        {"extension_weights", e.extension_weights}}},
      {"selection",
       {{"keywords", s.keywords},
        {"modality", s.modality},
        {"organ", s.organ},
        {"metrics", s.metrics}}},
      {"description",
       {{"title", d.title},
        {"training_dataset", d.training_dataset},
        {"license", d.license},
        {"date", d.date},
        {"publication", d.publication}}},
  };
}

ModelMetadata metadata_from_json(const ModelId& id, const json& body) {
  const std::string prefix = "models." + id.str();
  if (!body.is_object()) schema_error(prefix, "expected an object");

  ModelMetadata meta;
  meta.model_id = id;

  const json& ex = section(body, "execution", prefix);
  const std::string ep = prefix + ".execution";
  auto& e = meta.execution;
  e.package_url = string_field(ex, "package_url", ep, true);
  e.checksum_sha256 = string_field(ex, "checksum_sha256", ep, true);
  const json& size = require(ex, "package_size_bytes", ep);
  if (!size.is_number_integer()) {
    schema_error(ep + ".package_size_bytes", "expected an integer");
  }
  e.package_size_bytes = size.get<std::int64_t>();
  if (auto it = ex.find("image_size"); it != ex.end()) {
    if (!it->is_array()) schema_error(ep + ".image_size", "expected a list");
    e.image_size = *it;
  }
  if (auto it = ex.find("generate_defaults"); it != ex.end()) {
    if (!it->is_object()) {
      schema_error(ep + ".generate_defaults", "expected an object");
    }
    for (const auto& [k, v] : it->items()) e.generate_defaults[k] = v;
  }
  e.dependencies = string_list(ex, "dependencies", ep, false);
  e.extension_weights = string_field(ex, "extension_weights", ep, false);

  const json& se = section(body, "selection", prefix);
  const std::string sp = prefix + ".selection";
  auto& s = meta.selection;
  s.keywords = string_list(se, "keywords", sp, true);
  s.modality = string_field(se, "modality", sp, false);
  s.organ = string_field(se, "organ", sp, false);
  if (auto it = se.find("metrics"); it != se.end()) {
    if (!it->is_object()) schema_error(sp + ".metrics", "expected an object");
    s.metrics = *it;
  }

  const json& de = section(body, "description", prefix);
  const std::string dp = prefix + ".description";
  auto& d = meta.description;
  d.title = string_field(de, "title", dp, true);
  d.training_dataset = string_field(de, "training_dataset", dp, false);
  d.license = string_field(de, "license", dp, true);
  d.date = string_field(de, "date", dp, false);
  d.publication = string_field(de, "publication", dp, false);
  return meta;
}

ValidationReport validate_entry(const ModelMetadata& meta) {
  ValidationReport report;
  auto& f = report.findings;
  if (!meta.model_id.valid()) {
    f.push_back({"model_id", "'" + meta.model_id.str() +
                                 "' does not match ^\\d{5}_[A-Z0-9_]+$"});
  }

  const auto& e = meta.execution;
  if (!has_url_scheme(e.package_url)) {
    f.push_back({"execution.package_url", "expected an absolute URL"});
  }
  if (!is_hex64(e.checksum_sha256)) {
    f.push_back({"execution.checksum_sha256",
                 "expected 64 hex characters, got " +
                     std::to_string(e.checksum_sha256.size())});
  }
  if (e.package_size_bytes < 0) {
    f.push_back({"execution.package_size_bytes", "must be non-negative"});
  }

  const auto& s = meta.selection;
  if (s.keywords.empty()) {
    f.push_back({"selection.keywords", "must not be empty"});
  }
  for (std::size_t i = 0; i < s.keywords.size(); ++i) {
    const auto& k = s.keywords[i];
    bool lower = !k.empty();
    for (unsigned char c : k) {
      if (std::isupper(c)) lower = false;
    }
    if (!lower) {
      f.push_back({"selection.keywords[" + std::to_string(i) + "]",
                   "keywords must be non-empty lowercase strings"});
    }
  }
  if (!s.metrics.is_object()) {
    f.push_back({"selection.metrics", "expected an object"});
  } else {
    for (const auto& [key, child] : s.metrics.items()) {
      collect_metric_findings(child, "selection.metrics." + key, f);
    }
  }

  const auto& d = meta.description;
  if (d.title.empty()) f.push_back({"description.title", "must not be empty"});
  if (d.license.empty()) {
    f.push_back({"description.license", "must not be empty"});
  }
  if (!d.date.empty() && !std::regex_match(d.date, date_pattern())) {
    f.push_back({"description.date", "expected an ISO-8601 date"});
  }
  return report;
}

RegistryIndex load_index(std::string_view document) {
  // nlohmann keeps the last of two equal keys, so duplicates under "models"
  // are caught while parsing.
  std::set<std::string> seen;
  std::optional<std::string> duplicate;
  bool in_models = false;
  auto callback = [&](int depth, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::key) {
      if (depth == 1) {
        in_models = parsed == "models";
      } else if (depth == 2 && in_models) {
        const auto key = parsed.get<std::string>();
        if (!seen.insert(key).second && !duplicate) duplicate = key;
      }
    }
    return true;
  };

  json doc;
  try {
    doc = json::parse(document.begin(), document.end(), callback);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse,
                std::string("malformed registry document: ") + e.what());
  }
  if (duplicate) {
    throw Error(ErrorKind::kDuplicateId, "duplicate model id " + *duplicate,
                json{{"model_id", *duplicate}});
  }
  if (!doc.is_object()) schema_error("$", "expected an object");
  const std::string version = string_field(doc, "schema_version", "$", true);
  const json& models = require(doc, "models", "$");
  if (!models.is_object()) schema_error("models", "expected an object");

  RegistryIndex::Models out;
  for (const auto& [key, body] : models.items()) {
    ModelId id(key);
    ModelMetadata meta = metadata_from_json(id, body);
    ValidationReport report = validate_entry(meta);
    if (!report.ok()) {
      json findings = json::array();
      for (const auto& fnd : report.findings) {
        findings.push_back({{"path", fnd.path}, {"message", fnd.message}});
      }
      throw Error(ErrorKind::kSchema,
                  "invalid entry " + key + ": " + report.summary(),
                  json{{"model_id", key}, {"findings", findings}});
    }
    out.emplace(std::move(id), std::move(meta));
  }
  return RegistryIndex(version, std::move(out));
}

std::string serialize_index(const RegistryIndex& index) {
  json models = json::object();
  for (const auto& [id, meta] : index.models()) {
    models[id.str()] = metadata_to_json(meta);
  }
  json doc{{"schema_version", index.schema_version()}, {"models", models}};
  return doc.dump(2) + "\n";
}

RegistryIndex upsert_entry(const RegistryIndex& index,
                           const ModelMetadata& meta) {
  ValidationReport report = validate_entry(meta);
  if (!report.ok()) {
    throw Error(ErrorKind::kValidation,
                "cannot upsert " + meta.model_id.str() + ": " +
                    report.summary());
  }
  RegistryIndex::Models models = index.models();
  models.insert_or_assign(meta.model_id, meta);
  return RegistryIndex(index.schema_version(), std::move(models));
}

const ModelMetadata& get_metadata(const RegistryIndex& index,
                                  const ModelId& id) {
  auto it = index.models().find(id);
  if (it == index.models().end()) {
    throw Error(ErrorKind::kUnknownModel, "unknown model " + id.str(),
                json{{"model_id", id.str()}});
  }
  return it->second;
}

}  // namespace genhub
