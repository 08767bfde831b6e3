// Python bindings for the knet engine. Networks are exchanged as
// knowledge-base text; findings and beliefs use state labels.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "knet/consultation.hpp"
#include "knet/kbformat.hpp"
#include "knet/wire.hpp"

namespace py = pybind11;
using namespace knet;

namespace {

using LabelFindings = std::map<std::string, std::string>;
using LabelBeliefs = std::map<std::string, std::map<std::string, double>>;

struct PyNetwork {
  std::shared_ptr<const Network> net;
};

Findings to_findings(const Network& net, const LabelFindings& labels) {
  Findings out;
  for (const auto& [node, label] : labels) out[node] = state_index(net, node, label);
  check_findings(net, out);
  return out;
}

LabelBeliefs to_labels(const Network& net, const BeliefAssignment& beliefs) {
  LabelBeliefs out;
  for (const auto& [id, probs] : beliefs) {
    const auto& states = net.at(id).states;
    for (std::size_t s = 0; s < probs.size(); ++s) out[id][states[s]] = probs[s];
  }
  return out;
}

py::object to_python(const nlohmann::ordered_json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

PyNetwork parse_text(const std::string& text, bool strict) {
  return {std::make_shared<const Network>(parse(text, {.strict = strict}))};
}

}  // namespace

PYBIND11_MODULE(_knet, m) {
  m.doc() = "Exact inference and decision support over belief/decision networks";

  static py::exception<Error> knet_error(m, "KnetError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(knet_error,
                    (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<PyNetwork>(m, "Network")
      .def_property_readonly("name", [](const PyNetwork& n) { return n.net->name; })
      .def_property_readonly("kind",
                             [](const PyNetwork& n) { return std::string(to_string(n.net->kind)); })
      .def_property_readonly("node_ids",
                             [](const PyNetwork& n) {
                               std::vector<std::string> ids;
                               for (const auto& node : n.net->nodes) ids.push_back(node.id);
                               return ids;
                             })
      .def("states", [](const PyNetwork& n, const std::string& id) { return n.net->at(id).states; })
      .def("serialize", [](const PyNetwork& n) { return serialize(*n.net); })
      .def("topological_order", [](const PyNetwork& n) { return topological_order(*n.net); })
      .def("is_polytree", [](const PyNetwork& n) { return is_polytree(*n.net); })
      .def("loop_cutset", [](const PyNetwork& n) { return find_loop_cutset(*n.net); });

  m.def("parse", &parse_text, py::arg("text"), py::arg("strict") = true,
        "Parse and validate a knowledge-base document.");
  m.def("load", [](const std::string& path) {
    return PyNetwork{std::make_shared<const Network>(load_file(path))};
  }, py::arg("path"));
  m.def("validate", [](const std::string& text) {
    return to_python(wire::validation_report(validate(parse_document(text))));
  }, py::arg("text"), "Validation report for a document that passes the schema.");
  m.def("config_index", [](const std::vector<std::size_t>& cards,
                           const std::vector<std::size_t>& assignment) {
    return config_index(cards, assignment);
  });

  m.def("infer", [](const PyNetwork& n, const LabelFindings& evidence, const std::string& engine) {
    const auto result = chance_posteriors(*n.net, to_findings(*n.net, evidence),
                                          engine == "oracle" ? Engine::Oracle : Engine::Exact);
    return py::make_tuple(to_labels(*n.net, result.beliefs), result.evidence_probability);
  }, py::arg("network"), py::arg("evidence") = LabelFindings{}, py::arg("engine") = "exact",
        "Returns (beliefs, P(evidence)).");

  m.def("recommend", [](const PyNetwork& n, const LabelFindings& evidence) {
    return to_python(wire::recommendation(*n.net, recommend(*n.net, to_findings(*n.net, evidence))));
  }, py::arg("network"), py::arg("evidence") = LabelFindings{});

  py::class_<Session>(m, "Session")
      .def(py::init([](const PyNetwork& n) { return new_session(n.net); }))
      .def_property_readonly("id", &Session::id)
      .def_property_readonly("beliefs",
                             [](const Session& s) { return to_labels(s.network(), s.beliefs()); })
      .def_property_readonly("findings", [](const Session& s) {
        LabelFindings out;
        for (const auto& [id, state] : s.findings()) out[id] = s.network().at(id).states[state];
        return out;
      })
      .def_property_readonly("history_len", [](const Session& s) { return s.history().size(); })
      .def("assert_finding", [](Session& s, const std::string& node, const std::string& label) {
        return to_labels(s.network(), s.assert_finding(node, label));
      })
      .def("retract_finding", [](Session& s, const std::string& node) {
        return to_labels(s.network(), s.retract_finding(node));
      })
      .def("what_if", [](const Session& s, const LabelFindings& overlay) {
        return to_labels(s.network(), s.what_if(to_findings(s.network(), overlay)).beliefs);
      })
      .def("recommendation", [](Session& s) {
        return to_python(wire::recommendation(s.network(), s.recommendation()));
      })
      .def("export", [](const Session& s) { return s.export_document().dump(); });
}
