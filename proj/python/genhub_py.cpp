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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "genhub/digest.hpp"
#include "genhub/error.hpp"
#include "genhub/executor.hpp"
#include "genhub/frechet.hpp"
#include "genhub/registry.hpp"
#include "genhub/search.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python package decodes it.
std::string dump(const json& j) { return j.dump(); }

std::map<std::string, json> parse_kwargs(const std::string& text) {
  std::map<std::string, json> out;
  if (text.empty()) return out;
  for (auto& [k, v] : json::parse(text).items()) out[k] = v;
  return out;
}

std::optional<std::vector<genhub::ModelId>> to_ids(
    const std::optional<std::vector<std::string>>& ids) {
  if (!ids) return std::nullopt;
  std::vector<genhub::ModelId> out;
  for (const auto& s : *ids) out.emplace_back(s);
  return out;
}

json ranked_to_json(const genhub::RankedList& r) {
  json items = json::array();
  for (const auto& it : r.items) items.push_back({{"model_id", it.model_id.str()}, {"value", it.value}});
  json excluded = json::array();
  for (const auto& id : r.excluded) excluded.push_back(id.str());
  return {{"metric", r.metric_path},
          {"order", std::string(genhub::order_name(r.order))},
          {"items", items},
          {"excluded", excluded}};
}

class PyHub {
 public:
  PyHub(const std::string& registry, const std::string& cache, int chunk_size) {
    auto cfg = genhub::HubConfig::from_env();
    if (!registry.empty()) cfg.registry_source = registry;
    if (!cache.empty()) cfg.cache_root = cache;
    if (chunk_size > 0) cfg.chunk_size = chunk_size;
    hub_ = genhub::Hub::open(cfg);
  }

  std::vector<std::string> model_ids() const {
    std::vector<std::string> out;
    for (const auto& id : hub_->index()->ids()) out.push_back(id.str());
    return out;
  }

  std::string metadata(const std::string& id) const {
    return dump(genhub::metadata_to_json(hub_->metadata(genhub::ModelId(id))));
  }

  std::vector<std::string> find_models(const std::vector<std::string>& values,
                                       const std::string& op) const {
    const auto c = hub_->find_models(genhub::SearchQuery(values, genhub::parse_operator(op)));
    std::vector<std::string> out;
    for (const auto& id : c.ids()) out.push_back(id.str());
    return out;
  }

  std::string rank_models(const std::string& metric, const std::string& order,
                          const std::optional<std::vector<std::string>>& ids) const {
    return dump(ranked_to_json(hub_->rank_models(metric, genhub::parse_order(order), to_ids(ids))));
  }

  std::string find_rank(const std::vector<std::string>& values, const std::string& op,
                        const std::string& metric, const std::string& order) const {
    return dump(ranked_to_json(
        hub_->find_rank(genhub::SearchQuery(values, genhub::parse_operator(op)), metric,
                        genhub::parse_order(order))));
  }

  std::string generate(const std::string& id, std::int64_t num_samples,
                       const std::string& output_path, std::optional<std::uint64_t> seed,
                       const std::string& kwargs_json, std::optional<int> chunk_size) {
    genhub::GenerateRequest req;
    req.model_id = genhub::ModelId(id);
    req.num_samples = num_samples;
    req.output_path = output_path;
    req.save_images = !output_path.empty();
    req.seed = seed;
    req.kwargs = parse_kwargs(kwargs_json);
    req.chunk_size = chunk_size;
    genhub::GenerateResult r;
    {
      py::gil_scoped_release release;
      r = hub_->generate(req);
    }
    return dump(genhub::generate_result_to_json(r, !req.save_images));
  }

  std::string test_model(const std::string& id) {
    py::gil_scoped_release release;
    return dump(hub_->test_model(genhub::ModelId(id)).to_json());
  }

 private:
  std::unique_ptr<genhub::Hub> hub_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the genhub model hub";

  static py::exception<genhub::Error> hub_error(m, "HubError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const genhub::Error& e) {
      py::object err = hub_error;
      py::object exc = err(e.what());
      exc.attr("code") = std::string(genhub::api_code(e.kind()));
      exc.attr("kind") = std::string(genhub::kind_name(e.kind()));
      exc.attr("detail_json") = e.detail().dump();
      PyErr_SetObject(hub_error.ptr(), exc.ptr());
    }
  });

  py::class_<PyHub>(m, "Hub")
      .def(py::init<const std::string&, const std::string&, int>(), py::arg("registry") = "",
           py::arg("cache") = "", py::arg("chunk_size") = 0)
      .def("model_ids", &PyHub::model_ids)
      .def("metadata_json", &PyHub::metadata, py::arg("model_id"))
      .def("find_models", &PyHub::find_models, py::arg("values"), py::arg("operator") = "AND")
      .def("rank_models_json", &PyHub::rank_models, py::arg("metric"),
           py::arg("order") = "ascending", py::arg("ids") = py::none())
      .def("find_rank_json", &PyHub::find_rank, py::arg("values"), py::arg("operator"),
           py::arg("metric"), py::arg("order") = "ascending")
      .def("generate_json", &PyHub::generate, py::arg("model_id"), py::arg("num_samples") = 1,
           py::arg("output_path") = "", py::arg("seed") = py::none(),
           py::arg("kwargs_json") = "", py::arg("chunk_size") = py::none())
      .def("test_model_json", &PyHub::test_model, py::arg("model_id"));

  m.def("validate_registry", [](const std::string& text) {
    const auto index = genhub::load_index(text);
    json ids = json::array();
    for (const auto& id : index.ids()) ids.push_back(id.str());
    return json{{"schema_version", index.schema_version()}, {"model_ids", ids}}.dump();
  });

  m.def("sha256_hex", [](py::bytes b) { return genhub::sha256_hex(std::string(b)); });

  m.def("fid_ratio", [](double rs, double rr) {
    const auto r = genhub::metrics::fid_ratio(rs, rr);
    return py::make_tuple(r.value, r.in_bounds);
  }, py::arg("fid_rs"), py::arg("fid_rr"));

  m.def("frechet_distance", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return genhub::metrics::frechet_distance(genhub::metrics::fit_gaussian(a),
                                             genhub::metrics::fit_gaussian(b));
  });

  m.def("fid_report_json", [](const Eigen::MatrixXd& real, const Eigen::MatrixXd& syn,
                              std::uint64_t split_seed) {
    return genhub::metrics::compute_fid_report(real, syn, split_seed).to_json().dump();
  }, py::arg("real"), py::arg("syn"), py::arg("split_seed") = 0);
}
