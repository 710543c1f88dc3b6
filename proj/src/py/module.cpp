#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

#include "fsnc/datagen.hpp"
#include "fsnc/gradcheck_suite.hpp"
#include "fsnc/ingest.hpp"
#include "fsnc/runner.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<long long>());
    case json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
      return out;
    }
    default: return py::none();
  }
}

json py_to_json(py::handle h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) return h.cast<long long>();
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::dict>(h)) {
    json out = json::object();
    for (const auto item : h.cast<py::dict>()) {
      out[item.first.cast<std::string>()] = py_to_json(item.second);
    }
    return out;
  }
  if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
    json out = json::array();
    for (const auto item : h.cast<py::sequence>()) out.push_back(py_to_json(item));
    return out;
  }
  throw fsnc::FsncError("unsupported value type in config");
}

struct PyGraph {
  std::shared_ptr<const fsnc::Graph> graph;
  fsnc::DatasetMeta meta;
};

struct PyView {
  fsnc::SplitView view;
};

fsnc::ClassSplit split_from_dict(const py::dict& d) {
  fsnc::ClassSplit split;
  split.train_classes = d["train"].cast<std::vector<int>>();
  split.dev_classes = d["dev"].cast<std::vector<int>>();
  split.test_classes = d["test"].cast<std::vector<int>>();
  return split;
}

py::dict split_to_dict(const fsnc::ClassSplit& split) {
  py::dict d;
  d["train"] = split.train_classes;
  d["dev"] = split.dev_classes;
  d["test"] = split.test_classes;
  return d;
}

py::dict episode_to_dict(const fsnc::Episode& ep, const fsnc::SplitView& view) {
  py::dict d;
  d["class_map"] = ep.class_map;
  const auto convert = [&](const std::vector<std::pair<int, int>>& pairs) {
    py::list out;
    for (const auto& [node, label] : pairs) {
      out.append(py::make_tuple(view.to_global[static_cast<std::size_t>(node)], label));
    }
    return out;
  };
  d["support"] = convert(ep.support);
  d["query"] = convert(ep.query);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "few-shot node classification benchmark core";

  py::register_exception<fsnc::FsncError>(m, "FsncError");

  py::class_<PyGraph>(m, "Graph")
      .def_property_readonly("n_nodes", [](const PyGraph& g) { return g.graph->n_nodes; })
      .def_property_readonly("n_edges", [](const PyGraph& g) { return g.graph->n_undirected_edges(); })
      .def_property_readonly("n_features", [](const PyGraph& g) { return g.graph->n_features(); })
      .def_property_readonly("n_classes", [](const PyGraph& g) { return g.graph->n_classes; })
      .def_property_readonly("name", [](const PyGraph& g) { return g.meta.name; })
      .def_property_readonly("labels", [](const PyGraph& g) { return g.graph->labels; })
      .def_property_readonly("meta_split",
                             [](const PyGraph& g) {
                               return split_to_dict({g.meta.class_split.train, g.meta.class_split.dev,
                                                     g.meta.class_split.test});
                             })
      .def("degree", [](const PyGraph& g, int node) { return g.graph->degree(node); })
      .def("has_edge", [](const PyGraph& g, int u, int v) { return g.graph->has_edge(u, v); })
      .def("__repr__", [](const PyGraph& g) {
        return "Graph(" + g.meta.name + ", n=" + std::to_string(g.graph->n_nodes) + ")";
      });

  py::class_<PyView>(m, "View")
      .def_property_readonly("n_nodes", [](const PyView& v) { return v.view.graph->n_nodes; })
      .def_property_readonly("n_edges",
                             [](const PyView& v) { return v.view.graph->n_undirected_edges(); })
      .def_property_readonly("setting", [](const PyView& v) { return fsnc::to_string(v.view.setting); })
      .def_property_readonly("partition",
                             [](const PyView& v) { return fsnc::to_string(v.view.partition); })
      .def_property_readonly("classes", [](const PyView& v) { return v.view.class_ids; })
      .def_property_readonly("to_global", [](const PyView& v) { return v.view.to_global; });

  m.def(
      "load_graph",
      [](const std::filesystem::path& dir) {
        PyGraph g;
        g.graph = std::make_shared<const fsnc::Graph>(fsnc::load_graph(dir, &g.meta));
        return g;
      },
      py::arg("dataset_dir"), "Load a dataset directory into an immutable graph.");

  m.def(
      "gcn_normalize",
      [](const PyGraph& g) {
        const fsnc::NormalizedAdjacency norm = fsnc::gcn_normalize(*g.graph);
        return py::make_tuple(norm.matrix.indptr, norm.matrix.indices, norm.matrix.values);
      },
      py::arg("graph"), "Renormalized adjacency as CSR (indptr, indices, values).");

  m.def(
      "split_classes",
      [](const PyGraph& g, int train, int dev, int test, const std::string& seed) {
        return split_to_dict(
            fsnc::split_classes(*g.graph, train, dev, test, fsnc::SplitSeed::parse(seed)));
      },
      py::arg("graph"), py::arg("train"), py::arg("dev"), py::arg("test"), py::arg("seed") = "fixed");

  m.def(
      "build_view",
      [](const PyGraph& g, const py::dict& split, const std::string& setting,
         const std::string& partition) {
        PyView v{fsnc::build_view(g.graph, split_from_dict(split), fsnc::setting_from_string(setting),
                                  fsnc::partition_from_string(partition))};
        return v;
      },
      py::arg("graph"), py::arg("split"), py::arg("setting"), py::arg("partition"));

  m.def(
      "sample_episodes",
      [](const PyView& v, int n_way, int k_shot, int q_query, int count, std::uint64_t seed) {
        const auto batch =
            fsnc::sample_batch(v.view, fsnc::EpisodeSpec{n_way, k_shot, q_query}, count, seed);
        py::list out;
        for (const auto& ep : batch) out.append(episode_to_dict(ep, v.view));
        return out;
      },
      py::arg("view"), py::arg("n_way"), py::arg("k_shot"), py::arg("q_query"), py::arg("count"),
      py::arg("seed"), "Episodes with node ids in the global frame.");

  m.def(
      "generate_dataset",
      [](const std::string& preset, const std::filesystem::path& out_dir, std::uint64_t seed) {
        const fsnc::SynthSpec spec = fsnc::synth_preset(preset);
        const fsnc::RawDataset raw = fsnc::generate_raw_dataset(spec, seed, out_dir);
        py::dict d;
        d["content"] = raw.content;
        d["edges"] = raw.edges;
        d["name"] = spec.name;
        d["splits"] = py::make_tuple(spec.split_sizes[0], spec.split_sizes[1], spec.split_sizes[2]);
        return d;
      },
      py::arg("preset"), py::arg("out_dir"), py::arg("seed") = 0,
      "Write synthetic raw content/edge files (presets: cora, citeseer, tiny).");

  m.def(
      "ingest",
      [](const std::filesystem::path& content, const std::filesystem::path& edges,
         const std::string& name, const std::vector<int>& splits,
         const std::filesystem::path& out_dir) {
        if (splits.size() != 3) throw fsnc::FsncError("splits must have three entries");
        const fsnc::IngestStats stats =
            fsnc::ingest_dataset(content, edges, name, {splits[0], splits[1], splits[2]}, out_dir);
        py::dict d;
        d["name"] = stats.name;
        d["n_nodes"] = stats.n_nodes;
        d["n_features"] = stats.n_features;
        d["n_classes"] = stats.n_classes;
        d["n_edges"] = stats.n_edges;
        d["duplicate_edges"] = stats.duplicate_edges;
        d["self_loops"] = stats.self_loops;
        return d;
      },
      py::arg("content"), py::arg("edges"), py::arg("name"), py::arg("splits"), py::arg("out_dir"));

  m.def(
      "run",
      [](py::handle config) {
        fsnc::RunConfig cfg;
        if (py::isinstance<py::str>(config)) {
          cfg = fsnc::load_run_config(config.cast<std::string>());
        } else {
          cfg = fsnc::parse_run_config(py_to_json(config), "config");
        }
        fsnc::RunOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = fsnc::execute_run(std::move(cfg));
        }
        json j;
        j["config"] = outcome.resolved.echo();
        json repeats = json::array();
        for (const auto& r : outcome.report.repeats) {
          repeats.push_back({{"repeat", r.repeat},
                             {"test_accuracy", r.test_accuracy},
                             {"best_val_accuracy", r.best_val_accuracy},
                             {"stop_epoch", r.stop_epoch}});
        }
        j["repeats"] = std::move(repeats);
        j["mean_accuracy"] = outcome.report.mean_accuracy;
        j["ci95"] = outcome.report.ci95;
        j["wall_seconds"] = outcome.report.wall_seconds;
        return json_to_py(j);
      },
      py::arg("config"),
      "Run the evaluation protocol from a config dict or config file path; "
      "returns the report as a dict (and writes report files when the config "
      "names an output directory).");

  m.def(
      "gradcheck",
      [](int instances, double h, double tol, std::uint64_t seed) {
        const auto reports = fsnc::run_gradcheck_suite(instances, h, tol, seed);
        py::list out;
        for (const auto& r : reports) {
          py::dict d;
          d["path"] = r.path;
          d["instances"] = r.instances;
          d["coordinates_checked"] = r.coordinates_checked;
          d["max_error"] = r.max_error;
          d["violations"] = r.violations;
          d["ok"] = r.ok();
          out.append(d);
        }
        return out;
      },
      py::arg("instances") = 20, py::arg("h") = 1e-5, py::arg("tol") = 1e-4, py::arg("seed") = 0);

  m.def(
      "summarize",
      [](const std::vector<double>& series) {
        const fsnc::Summary s = fsnc::summarize(series);
        return py::make_tuple(s.mean, s.ci95);
      },
      py::arg("series"), "Mean and 95% confidence interval (1.96 * sample std / sqrt(n)).");

#ifdef FSNC_VERSION
  m.attr("__version__") = FSNC_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
