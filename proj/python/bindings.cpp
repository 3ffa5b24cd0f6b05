#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "locklab/analysis.hpp"
#include "locklab/attacks.hpp"
#include "locklab/error.hpp"
#include "locklab/locking.hpp"

namespace py = pybind11;
using namespace locklab;

namespace {

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

TechniqueKind kind_of(const std::string& name) {
  auto k = technique_from_string(name);
  if (!k) throw Error("unknown technique '" + name + "'");
  return *k;
}

py::dict meta_dict(const LockMeta& m) {
  py::dict d;
  d["protected_pis"] = m.protected_pis;
  d["protected_pis_2"] = m.protected_pis_2;
  d["decoys_1"] = m.decoys_1;
  d["decoys_2"] = m.decoys_2;
  d["obf_keys"] = m.obf_keys;
  d["target_po"] = m.target_po;
  d["target_node_2"] = m.target_node_2;
  d["relock_attempts"] = m.relock_attempts;
  return d;
}

}  // namespace

PYBIND11_MODULE(locklab, mod) {
  mod.doc() = "Logic-locking workbench: lock bench netlists and evaluate them with attacks and probes.";

  // Translators run newest first, so the base goes in before its subclasses.
  auto base = py::register_exception<Error>(mod, "Error");
  py::register_exception<ParseError>(mod, "ParseError", base);
  py::register_exception<InfeasibleError>(mod, "InfeasibleError", base);
  py::register_exception<InterfaceError>(mod, "InterfaceError", base);

  py::class_<Circuit>(mod, "Circuit")
      .def_property_readonly("inputs", &Circuit::inputs)
      .def_property_readonly("outputs", &Circuit::outputs)
      .def_property_readonly("num_gates", &Circuit::num_gates)
      .def("simulate", [](const Circuit& c, const Assignment& in) { return simulate(c, in); })
      .def("to_bench", [](const Circuit& c) { return write_bench(c); })
      .def("__eq__", [](const Circuit& a, const Circuit& b) { return a == b; })
      .def("__repr__", [](const Circuit& c) {
        return "<Circuit " + std::to_string(c.num_inputs()) + " in, " + std::to_string(c.num_outputs()) + " out, " +
               std::to_string(c.num_gates()) + " gates>";
      });

  mod.def("parse_bench", [](const std::string& text) { return parse_bench(text); }, py::arg("text"));
  mod.def("read_bench", &read_bench_file, py::arg("path"));

  py::class_<LockedDesign>(mod, "LockedDesign")
      .def_readonly("circuit", &LockedDesign::circuit)
      .def_readonly("key_inputs", &LockedDesign::key_inputs)
      .def_property_readonly("secret_key", [](const LockedDesign& d) { return d.secret_key.to_string(); })
      .def_property_readonly("meta", [](const LockedDesign& d) { return meta_dict(d.meta); })
      .def("keyfile", [](const LockedDesign& d) { return write_keyfile(d); });

  mod.def(
      "key_count",
      [](const std::string& technique, std::size_t n, std::size_t m) {
        Technique t;
        t.kind = kind_of(technique);
        t.n = n;
        t.m = m;
        return t.key_count();
      },
      py::arg("technique"), py::arg("n"), py::arg("m") = 0);

  mod.def(
      "lock",
      [](const Circuit& c, const std::string& technique, std::size_t n, std::size_t m, std::uint64_t seed,
         bool classic, bool blend, unsigned blend_rounds) {
        Technique t;
        t.kind = kind_of(technique);
        t.n = n;
        t.m = m;
        t.classic = classic;
        LockOptions opt;
        opt.blend = blend;
        opt.blend_rounds = blend_rounds;
        opt.classic_cac = classic;
        Rng rng(seed);
        py::gil_scoped_release release;
        return lock(c, t, rng, opt);
      },
      py::arg("circuit"), py::arg("technique"), py::arg("n"), py::arg("m") = 0, py::arg("seed") = 0xC0FFEE,
      py::arg("classic") = false, py::arg("blend") = true, py::arg("blend_rounds") = 2);

  mod.def(
      "max_feasible_n", [](const Circuit& c, const std::string& technique) { return max_feasible_n(c, kind_of(technique)); },
      py::arg("circuit"), py::arg("technique"));

  mod.def(
      "verify",
      [](const Circuit& locked, const std::vector<std::string>& keys, const std::string& key, const Circuit& original) {
        py::gil_scoped_release release;
        return verify_key(locked, keys, BitVector::from_string(key), original).equivalent();
      },
      py::arg("locked"), py::arg("key_inputs"), py::arg("key"), py::arg("original"));

  mod.def(
      "sat_attack",
      [](const Circuit& locked, const std::vector<std::string>& keys, const Circuit& original,
         std::optional<double> timeout, std::optional<std::uint64_t> max_iterations, bool trace) {
        AttackResult r;
        {
          py::gil_scoped_release release;
          Oracle oracle(original);
          AttackLimits lim;
          lim.seconds = timeout;
          lim.max_iterations = max_iterations;
          r = sat_attack(locked, keys, oracle, lim, &original);
        }
        return json_loads(attack_result_json(r, trace));
      },
      py::arg("locked"), py::arg("key_inputs"), py::arg("original"), py::arg("timeout") = 600.0,
      py::arg("max_iterations") = py::none(), py::arg("trace") = false);

  mod.def(
      "mapping_probe",
      [](const Circuit& locked, const std::vector<std::string>& keys) {
        MappingReport r;
        {
          py::gil_scoped_release release;
          r = mapping_probe(locked, keys);
        }
        return json_loads(mapping_report_json(r));
      },
      py::arg("locked"), py::arg("key_inputs"));

  mod.def(
      "removal_probe",
      [](const Circuit& locked, const std::vector<std::string>& keys, const Circuit& original,
         std::optional<double> timeout) {
        RemovalReport r;
        {
          py::gil_scoped_release release;
          RemovalOptions opt;
          opt.seconds = timeout;
          r = removal_probe(locked, keys, original, opt);
        }
        return json_loads(removal_report_json(r));
      },
      py::arg("locked"), py::arg("key_inputs"), py::arg("original"), py::arg("timeout") = py::none());

  mod.def(
      "run_sweep",
      [](const std::string& plan_json, const std::string& base_dir) {
        const ExperimentPlan plan = plan_from_json(plan_json, base_dir);
        std::vector<RunRecord> records;
        {
          py::gil_scoped_release release;
          records = run_sweep(plan);
        }
        return json_loads(records_to_json(records));
      },
      py::arg("plan_json"), py::arg("base_dir") = "");
}
