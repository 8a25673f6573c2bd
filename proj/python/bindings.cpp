#include <memory>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "recallm/bench.hpp"
#include "recallm/engine.hpp"
#include "recallm/error.hpp"
#include "recallm/extract.hpp"
#include "recallm/hybrid.hpp"
#include "recallm/vecstore.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Engine with offline providers and in-memory stores unless paths are given.
std::unique_ptr<recallm::MemoryEngine> make_engine(const std::string& graph_path, const std::string& vector_path,
                                  const std::vector<std::string>& overrides) {
  recallm::AppConfig cfg;
  cfg.graph_path = graph_path;
  cfg.vector_path = vector_path;
  cfg.provider_mode = recallm::ProviderMode::offline;
  cfg.apply_overrides(overrides);
  return std::make_unique<recallm::MemoryEngine>(cfg);
}

std::string bench_summary(unsigned reps, const std::vector<unsigned>& checkpoints, bool revision) {
  recallm::ScriptedProvider answerer(recallm::extractive_answerer());
  recallm::BenchConfig bc;
  bc.repetitions = reps;
  bc.checkpoints = checkpoints.empty() ? std::vector<unsigned>{reps} : checkpoints;
  bc.revision.enabled = revision;
  bc.answerer = &answerer;
  auto result = recallm::run_temporal_bench(recallm::bundled_dataset(), bc);
  json rows = json::array();
  for (const auto& [key, acc] : recallm::summarize(result.records)) {
    rows.push_back({{"system", recallm::to_string(key.system)},
                    {"checkpoint", key.checkpoint},
                    {"set", recallm::to_string(key.set)},
                    {"correct", acc.correct},
                    {"total", acc.total}});
  }
  return json{{"final_counter", result.final_counter},
              {"raw_context_exceeded_at",
               result.raw_context_exceeded_at ? json(*result.raw_context_exceeded_at) : json(nullptr)},
              {"evidence_recall", rows}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of recallm; the recallm package wraps it with Python types.";

  static py::exception<recallm::Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<recallm::ArgumentError> argument_error(m, "ArgumentError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const recallm::ArgumentError& e) {
      py::set_error(argument_error, e.what());
    } catch (const recallm::Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("stem", [](const std::string& word) { return recallm::stem(word); }, py::arg("word"));
  m.def("concept_labels", [](const std::string& text) { return recallm::concept_labels(text); }, py::arg("text"));
  m.def("segment", [](const std::string& text) { return recallm::segment(text); }, py::arg("text"));
  m.def("uncertainty_score", [](const std::string& answer) { return recallm::uncertainty_score(answer); },
        py::arg("answer"));
  m.def("format_percent", &recallm::format_percent, py::arg("correct"), py::arg("total"));
  m.def(
      "perfect_discriminator_accuracy",
      [](const std::vector<int>& graph, const std::vector<int>& vector, int max_score) {
        return recallm::perfect_discriminator_accuracy(graph, vector, max_score);
      },
      py::arg("graph"), py::arg("vector"), py::arg("max_score") = 2);
  m.def(
      "dataset_sizes",
      [] {
        const auto& ds = recallm::bundled_dataset();
        return py::dict(py::arg("initial") = ds.initial.size(), py::arg("loop") = ds.loop.size(),
                        py::arg("standard") = ds.standard.size(), py::arg("long_range") = ds.long_range.size());
      });
  m.def("bench_summary", &bench_summary, py::arg("reps"), py::arg("checkpoints") = std::vector<unsigned>{},
        py::arg("revision") = true, py::call_guard<py::gil_scoped_release>());

  py::class_<recallm::MemoryEngine>(m, "Engine")
      .def(py::init(&make_engine), py::arg("graph_path") = "", py::arg("vector_path") = "",
           py::arg("overrides") = std::vector<std::string>{})
      .def("ingest", [](recallm::MemoryEngine& e, const std::string& text) { return json(e.ingest(text)).dump(); },
           py::arg("text"))
      .def(
          "ask",
          [](const recallm::MemoryEngine& e, const std::string& question, const std::string& mode) {
            return e.ask(question, recallm::parse_ask_mode(mode)).dump(-1, ' ', false,
                                                                          json::error_handler_t::replace);
          },
          py::arg("question"), py::arg("mode") = "graph")
      .def("stats", [](const recallm::MemoryEngine& e) { return json(e.stats()).dump(); })
      .def("export_graph", &recallm::MemoryEngine::export_graph)
      .def("save", &recallm::MemoryEngine::save);
}
