#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cli.hpp"
#include "riskctl/activity_graph.hpp"
#include "riskctl/codegen.hpp"
#include "riskctl/dsl.hpp"
#include "riskctl/gcl.hpp"
#include "riskctl/gradients.hpp"
#include "riskctl/io_formats.hpp"
#include "riskctl/risk_space.hpp"
#include "riskctl/synthesis.hpp"

namespace py = pybind11;
using namespace riskctl;

namespace {

std::vector<std::string> diagnostics(const std::vector<Diagnostic>& d) {
  std::vector<std::string> out;
  for (const auto& x : d) out.push_back(x.str());
  return out;
}

std::map<std::string, gcl::Value> to_values(const std::map<std::string, py::object>& in) {
  std::map<std::string, gcl::Value> out;
  for (const auto& [k, v] : in) {
    if (py::isinstance<py::bool_>(v)) {
      out[k] = gcl::Value::of_bool(v.cast<bool>());
    } else if (py::isinstance<py::int_>(v)) {
      out[k] = gcl::Value::of_int(v.cast<std::int64_t>());
    } else {
      out[k] = gcl::Value::of_double(v.cast<double>());
    }
  }
  return out;
}

py::dict result_dict(const QueryResult& r) {
  py::dict d;
  switch (r.kind) {
    case QueryResult::Kind::Number: d["kind"] = "number"; d["value"] = r.value; break;
    case QueryResult::Kind::Boolean: d["kind"] = "boolean"; d["value"] = r.value != 0.0; break;
    case QueryResult::Kind::Pareto: {
      d["kind"] = "pareto";
      py::list pts;
      for (const auto& p : r.points) pts.append(py::make_tuple(p.r1, p.r2));
      d["points"] = pts;
      break;
    }
  }
  py::list w;
  for (const auto& p : r.witnesses) w.append(p.dtmc);
  d["witnesses"] = w;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Risk-informed controller synthesis";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ModelError>(m, "ModelError", base.ptr());
  py::register_exception<AnalysisError>(m, "AnalysisError", base.ptr());

  py::class_<Model>(m, "Model")
      .def_property_readonly("activities", [](const Model& x) { return x.activity_order(); })
      .def_property_readonly("factors",
                             [](const Model& x) {
                               std::vector<std::string> out;
                               for (const auto& [k, v] : x.factors) out.push_back(k);
                               return out;
                             })
      .def("validate", [](const Model& x, bool synthesis) { return diagnostics(validate(x, ValidateOptions{synthesis})); },
           py::arg("synthesis") = false)
      .def("print", [](const Model& x) { return print_model(x); })
      .def("equals", [](const Model& a, const Model& b) { return structurally_equal(a, b); })
      .def("activity_dot",
           [](const Model& x, const std::string& start) { return export_activity_dot(reachable_activities(x, start)); })
      .def("risk_states", [](const Model& x) { return RiskSpace(x).explore().states.size(); })
      .def("risk_dot",
           [](const Model& x) {
             RiskSpace s(x);
             return export_risk_dot(s, s.explore());
           })
      .def("simulate",
           [](const Model& x, std::uint64_t seed, std::size_t steps) {
             RiskSpace s(x);
             return format_trace(s, s.simulate(seed, steps));
           })
      .def("generate", [](const Model& x) {
        auto a = generate(x);
        py::dict d;
        d["types"] = a.types;
        d["formulas"] = a.formulas;
        d["controller"] = a.controller_module;
        d["mishaps"] = a.mishap_commands;
        d["rewards"] = a.rewards;
        d["design_props"] = a.design_props;
        d["policy_props"] = a.policy_props;
        return d;
      });

  m.def("parse_model", [](const std::string& text, const std::string& filename) {
    return resolve_includes(parse_model({{filename, text}}));
  }, py::arg("text"), py::arg("filename") = "<model>");
  m.def("load_model", [](const std::vector<std::filesystem::path>& files) {
    return resolve_includes(load_model_files(files));
  });
  m.def("inject", [](const std::string& tmpl, const Model& x) { return inject(tmpl, generate(x)).text; });

  m.def("complete_matrix",
        [](const std::vector<std::string>& labels, const std::vector<std::vector<int>>& rows) {
          return complete_matrix("matrix", labels, rows).values();
        });

  py::class_<Dtmc>(m, "Dtmc")
      .def_property_readonly("num_states", &Dtmc::num_states)
      .def_property_readonly("num_transitions", &Dtmc::num_transitions)
      .def_property_readonly("labels", [](const Dtmc& d) { return d.label_names; })
      .def("check",
           [](const Dtmc& d, const std::string& query, const std::map<std::string, py::object>& constants) {
             return check_dtmc(d, query, to_values(constants));
           },
           py::arg("query"), py::arg("constants") = std::map<std::string, py::object>{})
      .def("export", [](const Dtmc& d, const std::filesystem::path& stem) { export_policy(d, stem); })
      .def("files",
           [](const Dtmc& d) {
             auto t = format_adversary(d);
             return py::make_tuple(t.tra, t.sta, t.lab);
           })
      .def("dot", [](const Dtmc& d) { return export_dot(d); })
      .def("equals", [](const Dtmc& a, const Dtmc& b) { return structurally_equal(a, b); });

  m.def("import_policy", &import_policy);
  m.def("parse_policy", [](const std::string& tra, const std::string& sta, const std::string& lab) {
    return parse_adversary({tra, sta, lab});
  });

  py::class_<Mdp>(m, "Mdp")
      .def_property_readonly("num_states", &Mdp::num_states)
      .def_property_readonly("num_choices", &Mdp::num_choices)
      .def_property_readonly("num_transitions", &Mdp::num_transitions)
      .def_property_readonly("labels", [](const Mdp& x) { return x.label_names; })
      .def_property_readonly("rewards", [](const Mdp& x) { return x.reward_names; })
      .def("dot", [](const Mdp& x) { return export_dot(x); })
      .def(
          "solve",
          [](const Mdp& x, const std::string& query, const std::map<std::string, py::object>& constants,
             std::optional<std::string> terminal, std::size_t points) {
            SweepOptions o;
            o.points = points;
            o.solve.terminal_label = terminal ? *terminal : (x.label_index("FINAL") ? "FINAL" : "");
            return result_dict(solve_query(x, parse_query(query), to_values(constants), o));
          },
          py::arg("query"), py::arg("constants") = std::map<std::string, py::object>{},
          py::arg("terminal") = py::none(), py::arg("points") = 11);

  m.def(
      "build_mdp",
      [](const std::string& text, const std::map<std::string, py::object>& constants, std::size_t state_cap) {
        gcl::BuildOptions o;
        o.state_cap = state_cap;
        o.constants = to_values(constants);
        return gcl::build_state_space(gcl::parse_gcl(text), o);
      },
      py::arg("text"), py::arg("constants") = std::map<std::string, py::object>{}, py::arg("state_cap") = 1'000'000);

  m.def("run", [](const std::vector<std::string>& args) { return cli::run(args); },
        "Runs the command-line tool with the given arguments and returns its exit code.");
}
