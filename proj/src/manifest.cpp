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

#include "genhub/manifest.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "genhub/error.hpp"
#include "genhub/fs_util.hpp"
#include "genhub/package_store.hpp"

namespace genhub {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kManifestInvalid, "manifest " + path + ": " + what,
              json{{"path", path}});
}

std::string get_string(const json& obj, const char* key, bool required,
                       const std::string& fallback = {}) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) invalid(key, "missing field");
    return fallback;
  }
  if (!it->is_string()) invalid(key, "expected a string");
  return it->get<std::string>();
}

std::optional<OutputKind> parse_output_kind(std::string_view s) {
  if (s == "image") return OutputKind::kImage;
  if (s == "mask") return OutputKind::kMask;
  if (s == "label") return OutputKind::kLabel;
  if (s == "tabular") return OutputKind::kTabular;
  return std::nullopt;
}

std::optional<FileFormat> parse_file_format(std::string_view s) {
  if (s == "png") return FileFormat::kPng;
  if (s == "csv") return FileFormat::kCsv;
  return std::nullopt;
}

double parse_double(std::string_view text) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::kValidation, "'" + s + "' is not a finite number");
  }
  return v;
}

}  // namespace

std::string_view param_kind_name(ParamKind kind) {
  switch (kind) {
    case ParamKind::kInt: return "int";
    case ParamKind::kFloat: return "float";
    case ParamKind::kString: return "string";
    case ParamKind::kBool: return "bool";
    case ParamKind::kPath: return "path";
    case ParamKind::kFloatList: return "float_list";
  }
  return "string";
}

std::optional<ParamKind> parse_param_kind(std::string_view text) {
  for (ParamKind k : {ParamKind::kInt, ParamKind::kFloat, ParamKind::kString,
                      ParamKind::kBool, ParamKind::kPath, ParamKind::kFloatList}) {
    if (param_kind_name(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view output_kind_name(OutputKind kind) {
  switch (kind) {
    case OutputKind::kImage: return "image";
    case OutputKind::kMask: return "mask";
    case OutputKind::kLabel: return "label";
    case OutputKind::kTabular: return "tabular";
  }
  return "image";
}

std::string_view file_format_name(FileFormat format) {
  return format == FileFormat::kPng ? "png" : "csv";
}

const ParamSpec* ModelManifest::find_param(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

bool value_matches_kind(ParamKind kind, const json& value) {
  switch (kind) {
    case ParamKind::kInt:
      return value.is_number_integer();
    case ParamKind::kFloat:
      return value.is_number() && std::isfinite(value.get<double>());
    case ParamKind::kString:
    case ParamKind::kPath:
      return value.is_string();
    case ParamKind::kBool:
      return value.is_boolean();
    case ParamKind::kFloatList:
      if (!value.is_array()) return false;
      for (const auto& v : value) {
        if (!v.is_number() || !std::isfinite(v.get<double>())) return false;
      }
      return true;
  }
  return false;
}

json parse_param_text(ParamKind kind, std::string_view text) {
  const std::string s(text);
  switch (kind) {
    case ParamKind::kInt: {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::kValidation, "'" + s + "' is not an integer");
      }
      return v;
    }
    case ParamKind::kFloat:
      return parse_double(s);
    case ParamKind::kString:
    case ParamKind::kPath:
      return s;
    case ParamKind::kBool:
      if (s == "true" || s == "1" || s == "yes") return true;
      if (s == "false" || s == "0" || s == "no") return false;
      throw Error(ErrorKind::kValidation, "'" + s + "' is not a boolean");
    case ParamKind::kFloatList: {
      json out = json::array();
      if (s.empty()) return out;
      std::size_t start = 0;
      while (true) {
        const auto comma = s.find(',', start);
        out.push_back(parse_double(s.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      return out;
    }
  }
  return s;
}

ModelManifest parse_manifest(const json& doc) {
  if (!doc.is_object()) invalid("$", "expected an object");
  ModelManifest m;
  m.model_id = ModelId(get_string(doc, "model_id", true));
  m.entrypoint = get_string(doc, "entrypoint", true);
  m.generate_method_name = get_string(doc, "generate_method_name", false, "generate");

  if (auto it = doc.find("params"); it != doc.end()) {
    if (!it->is_array()) invalid("params", "expected a list");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& p = (*it)[i];
      const std::string path = "params[" + std::to_string(i) + "]";
      if (!p.is_object()) invalid(path, "expected an object");
      ParamSpec spec;
      auto name = p.find("name");
      if (name == p.end() || !name->is_string()) invalid(path + ".name", "expected a string");
      spec.name = name->get<std::string>();
      auto kind = p.find("kind");
      if (kind == p.end() || !kind->is_string()) invalid(path + ".kind", "expected a string");
      auto parsed = parse_param_kind(kind->get<std::string>());
      if (!parsed) invalid(path + ".kind", "unknown kind " + kind->get<std::string>());
      spec.kind = *parsed;
      spec.default_value = p.value("default", json());
      if (auto r = p.find("required"); r != p.end()) {
        if (!r->is_boolean()) invalid(path + ".required", "expected a boolean");
        spec.required = r->get<bool>();
      }
      m.params.push_back(std::move(spec));
    }
  }

  auto weights = doc.find("weights");
  if (weights == doc.end() || !weights->is_object()) invalid("weights", "expected an object");
  m.weights.name = get_string(*weights, "name", true);
  m.weights.extension = get_string(*weights, "extension", true);

  auto outputs = doc.find("outputs");
  if (outputs == doc.end() || !outputs->is_array()) invalid("outputs", "expected a list");
  for (std::size_t i = 0; i < outputs->size(); ++i) {
    const json& o = (*outputs)[i];
    const std::string path = "outputs[" + std::to_string(i) + "]";
    if (!o.is_object()) invalid(path, "expected an object");
    auto kind = parse_output_kind(o.value("kind", ""));
    if (!kind) invalid(path + ".kind", "expected image, mask, label or tabular");
    auto format = parse_file_format(o.value("file_format", ""));
    if (!format) invalid(path + ".file_format", "expected png or csv");
    m.outputs.push_back({*kind, *format});
  }

  if (auto it = doc.find("latent_dim"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer()) invalid("latent_dim", "expected an integer");
    m.latent_dim = it->get<int>();
  }
  if (auto it = doc.find("condition"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) invalid("condition", "expected an object");
    ConditionSpec c;
    c.name = get_string(*it, "name", true);
    if (auto v = it->find("values"); v != it->end()) {
      if (!v->is_array()) invalid("condition.values", "expected a list");
      for (const auto& x : *v) c.values.push_back(x);
    }
    m.condition = std::move(c);
  }
  if (auto it = doc.find("dependencies"); it != doc.end()) {
    if (!it->is_array()) invalid("dependencies", "expected a list");
    for (const auto& d : *it) {
      if (!d.is_string()) invalid("dependencies", "expected strings");
      m.dependencies.push_back(d.get<std::string>());
    }
  }
  return m;
}

ModelManifest parse_manifest_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kManifestInvalid,
                std::string("manifest is not valid JSON: ") + e.what());
  }
  return parse_manifest(doc);
}

ModelManifest load_manifest(const fs::path& package_dir) {
  const fs::path path = package_dir / kManifestFileName;
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw Error(ErrorKind::kManifestInvalid,
                "no " + std::string(kManifestFileName) + " in " + package_dir.string());
  }
  return parse_manifest_text(read_file(path));
}

json manifest_to_json(const ModelManifest& m) {
  json params = json::array();
  for (const auto& p : m.params) {
    params.push_back({{"name", p.name},
                      {"kind", std::string(param_kind_name(p.kind))},
                      {"default", p.default_value},
                      {"required", p.required}});
  }
  json outputs = json::array();
  for (const auto& o : m.outputs) {
    outputs.push_back({{"kind", std::string(output_kind_name(o.kind))},
                       {"file_format", std::string(file_format_name(o.format))}});
  }
  json doc{{"model_id", m.model_id.str()},
           {"entrypoint", m.entrypoint},
           {"generate_method_name", m.generate_method_name},
           {"params", params},
           {"weights", {{"name", m.weights.name}, {"extension", m.weights.extension}}},
           {"outputs", outputs},
           {"dependencies", m.dependencies},
           {"latent_dim", m.latent_dim ? json(*m.latent_dim) : json()}};
  if (m.condition) {
    doc["condition"] = {{"name", m.condition->name}, {"values", m.condition->values}};
  }
  return doc;
}

ValidationReport validate_manifest(const ModelManifest& m,
                                   const std::optional<fs::path>& package_dir) {
  ValidationReport r;
  auto& f = r.findings;
  if (!m.model_id.valid()) f.push_back({"model_id", "invalid model id"});
  if (m.entrypoint.empty()) f.push_back({"entrypoint", "must not be empty"});
  if (m.entrypoint.find("{request}") == std::string::npos) {
    f.push_back({"entrypoint", "must contain the {request} token"});
  }

  std::set<std::string> names;
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    const auto& p = m.params[i];
    const std::string path = "params[" + std::to_string(i) + "]";
    if (p.name.empty()) f.push_back({path + ".name", "must not be empty"});
    if (!names.insert(p.name).second) f.push_back({path + ".name", "duplicate parameter " + p.name});
    if (!p.default_value.is_null() && !value_matches_kind(p.kind, p.default_value)) {
      f.push_back({path + ".default", "default does not match kind " +
                                          std::string(param_kind_name(p.kind))});
    }
  }

  if (m.weights.name.empty()) f.push_back({"weights.name", "must not be empty"});
  if (m.weights.extension.empty() || m.weights.extension.front() != '.') {
    f.push_back({"weights.extension", "must start with '.'"});
  }
  if (package_dir && !m.weights.name.empty()) {
    std::error_code ec;
    if (!fs::is_regular_file(*package_dir / m.weights.file_name(), ec)) {
      f.push_back({"weights", "weights file " + m.weights.file_name() + " not found"});
    }
  }

  if (m.outputs.empty()) f.push_back({"outputs", "at least one output is required"});
  std::set<OutputKind> kinds;
  for (std::size_t i = 0; i < m.outputs.size(); ++i) {
    if (!kinds.insert(m.outputs[i].kind).second) {
      f.push_back({"outputs[" + std::to_string(i) + "]", "duplicate output kind"});
    }
  }

  if (m.latent_dim) {
    if (*m.latent_dim <= 0) f.push_back({"latent_dim", "must be positive"});
    const ParamSpec* z = m.find_param(kLatentParam);
    if (!z || z->kind != ParamKind::kFloatList) {
      f.push_back({"params", "latent models must declare input_latent_vector of kind float_list"});
    }
  }
  return r;
}

}  // namespace genhub
