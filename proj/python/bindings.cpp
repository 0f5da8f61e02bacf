#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "myxo/angular_grid.hpp"
#include "myxo/cli_io.hpp"
#include "myxo/collision_kernel.hpp"
#include "myxo/diagnostics.hpp"
#include "myxo/errors.hpp"
#include "myxo/kinetic_transport_1d.hpp"
#include "myxo/macro_limit.hpp"
#include "myxo/scenarios.hpp"
#include "myxo/time_integrator.hpp"
#include "myxo/transport_metrics.hpp"

namespace py = pybind11;
using namespace myxo;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  const auto buf = a.request();
  if (buf.ndim != 1) throw InvalidArgument("expected a one-dimensional array");
  const auto* p = static_cast<const double*>(buf.ptr);
  return {p, p + buf.shape[0]};
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  auto r = out.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < r.shape(0); ++i) r(i) = v[static_cast<std::size_t>(i)];
  return out;
}

AtomicMeasure to_measure(const Array& angles, const Array& masses) {
  const auto a = to_vector(angles), m = to_vector(masses);
  if (a.size() != m.size()) throw InvalidArgument("angles and masses differ in length");
  AtomicMeasure mu;
  for (std::size_t i = 0; i < a.size(); ++i) mu.atoms.push_back({a[i], m[i]});
  return mu;
}

py::object optional_value(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

py::dict record_dict(const MomentRecord& r) {
  py::dict d;
  d["time"] = r.time;
  d["total_mass"] = r.total_mass;
  d["rho_plus"] = r.rho_plus;
  d["rho_minus"] = r.rho_minus;
  d["out_of_group_mass"] = r.out_of_group_mass;
  d["phibar_plus"] = r.phibar_plus;
  d["phibar_minus"] = r.phibar_minus;
  d["first_moment"] = r.first_moment;
  d["mean_velocity"] = py::make_tuple(r.mean_velocity[0], r.mean_velocity[1]);
  d["variance"] = optional_value(r.variance);
  d["m1"] = optional_value(r.m1);
  d["w2_to_equilibrium"] = optional_value(r.w2_to_equilibrium);
  d["w2_to_partial"] = optional_value(r.w2_to_partial);
  d["lyapunov_H"] = optional_value(r.lyapunov_H);
  return d;
}

py::dict macro_dict(const MacroState1D& m) {
  py::dict d;
  d["time"] = m.time;
  d["length"] = m.length;
  d["rho_plus"] = to_array(m.rho_plus);
  d["rho_minus"] = to_array(m.rho_minus);
  d["phi_plus"] = to_array(m.phi_plus);
  return d;
}

MacroState1D macro_from(const Array& rho_plus, const Array& rho_minus, const Array& phi_plus, double length) {
  MacroState1D m;
  m.length = length;
  m.rho_plus = to_vector(rho_plus);
  m.rho_minus = to_vector(rho_minus);
  m.phi_plus = to_vector(phi_plus);
  m.validate();
  return m;
}

py::object json_to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Discrete-velocity kinetic model of myxobacteria alignment and reversal.";

  static py::exception<Error> base_error(m, "MyxoError", PyExc_RuntimeError);
  static py::exception<ConfigError> config_error(m, "ConfigError", base_error.ptr());
  static py::exception<NegativityDetected> negativity_error(m, "NegativityDetected", base_error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config_error(e.what());
    } catch (const NegativityDetected& e) {
      negativity_error(e.what());
    } catch (const Error& e) {
      base_error((std::string(e.error_class()) + ": " + e.what()).c_str());
    }
  });

  py::enum_<Group>(m, "Group").value("Plus", Group::Plus).value("Minus", Group::Minus).value("Neither", Group::Neither);
  py::enum_<CrossSection>(m, "CrossSection")
      .value("Maxwellian", CrossSection::Maxwellian)
      .value("Rod", CrossSection::Rod);
  py::enum_<NegativityPolicy>(m, "NegativityPolicy")
      .value("Abort", NegativityPolicy::Abort)
      .value("WarnAndClampToZero", NegativityPolicy::WarnAndClampToZero);
  py::enum_<ScenarioKind>(m, "ScenarioKind")
      .value("TwoGroupUniform", ScenarioKind::TwoGroupUniform)
      .value("TwoGroupVacuumBands", ScenarioKind::TwoGroupVacuumBands)
      .value("OneGroupUniform", ScenarioKind::OneGroupUniform)
      .value("TwoPatches", ScenarioKind::TwoPatches)
      .value("PerturbedUniformRandom", ScenarioKind::PerturbedUniformRandom)
      .value("PerturbedUniformPoint", ScenarioKind::PerturbedUniformPoint)
      .value("PointMasses", ScenarioKind::PointMasses);

  py::class_<AngularGrid>(m, "AngularGrid")
      .def(py::init<int>(), py::arg("n"))
      .def_property_readonly("n", &AngularGrid::n)
      .def_property_readonly("dphi", &AngularGrid::dphi)
      .def("__len__", &AngularGrid::size)
      .def("angle", &AngularGrid::angle, py::arg("k"))
      .def("angles", [](const AngularGrid& g) { return to_array({g.angles().begin(), g.angles().end()}); })
      .def("index_distance", &AngularGrid::index_distance)
      .def("reversal_partner", &AngularGrid::reversal_partner)
      .def("group_of", &AngularGrid::group_of)
      .def("alignment_midpoint", &AngularGrid::alignment_midpoint)
      .def("nearest_index", &AngularGrid::nearest_index)
      .def("group_count", &AngularGrid::group_count)
      .def("__repr__", [](const AngularGrid& g) { return "AngularGrid(n=" + std::to_string(g.n()) + ")"; });

  py::class_<KernelTables>(m, "KernelTables")
      .def(py::init<AngularGrid, CrossSection, bool>(), py::arg("grid"), py::arg("cross_section"),
           py::arg("compensated") = false)
      .def_property_readonly("grid", &KernelTables::grid)
      .def_property_readonly("cross_section", &KernelTables::cross_section);

  m.def(
      "collision_operator",
      [](const KernelTables& t, const Array& f) { return to_array(apply(t, DistributionState{to_vector(f), 0.0})); },
      py::arg("tables"), py::arg("f"), "Q^n(f) on the grid of `tables`.");
  m.def(
      "alignment_operator",
      [](const KernelTables& t, const Array& f) {
        return to_array(apply_alignment(t, DistributionState{to_vector(f), 0.0}));
      },
      py::arg("tables"), py::arg("f"));
  m.def(
      "reversal_operator",
      [](const KernelTables& t, const Array& f) {
        return to_array(apply_reversal(t, DistributionState{to_vector(f), 0.0}));
      },
      py::arg("tables"), py::arg("f"));

  py::class_<Patch>(m, "Patch")
      .def(py::init<double, double, double>(), py::arg("center"), py::arg("half_width"), py::arg("mass"))
      .def_readwrite("center", &Patch::center)
      .def_readwrite("half_width", &Patch::half_width)
      .def_readwrite("mass", &Patch::mass);

  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def(py::init<>())
      .def_readwrite("kind", &ScenarioSpec::kind)
      .def_readwrite("mass", &ScenarioSpec::mass)
      .def_readwrite("mass_plus", &ScenarioSpec::mass_plus)
      .def_readwrite("mass_minus", &ScenarioSpec::mass_minus)
      .def_readwrite("band_half_width", &ScenarioSpec::band_half_width)
      .def_readwrite("patches", &ScenarioSpec::patches)
      .def_readwrite("amplitude", &ScenarioSpec::amplitude)
      .def_readwrite("point_index", &ScenarioSpec::point_index)
      .def_readwrite("seed", &ScenarioSpec::seed);

  m.def(
      "make_initial", [](const AngularGrid& g, const ScenarioSpec& s) { return to_array(make_initial(g, s).values); },
      py::arg("grid"), py::arg("spec"));

  py::class_<EquilibriumTarget>(m, "EquilibriumTarget")
      .def_readonly("rho_plus", &EquilibriumTarget::rho_plus)
      .def_readonly("rho_minus", &EquilibriumTarget::rho_minus)
      .def_readonly("phi_plus", &EquilibriumTarget::phi_plus);

  m.def(
      "equilibrium_target",
      [](const AngularGrid& g, const Array& f) { return equilibrium_target(g, DistributionState{to_vector(f), 0.0}); },
      py::arg("grid"), py::arg("f"));

  m.def(
      "moments",
      [](const AngularGrid& g, const Array& f, std::optional<EquilibriumTarget> target) {
        return record_dict(moments(g, DistributionState{to_vector(f), 0.0}, target));
      },
      py::arg("grid"), py::arg("f"), py::arg("target") = py::none());

  m.def(
      "integrate",
      [](const KernelTables& t, const Array& f, double dt, double t_end, std::size_t snapshot_stride,
         NegativityPolicy policy, bool keep_states) {
        IntegrationConfig c;
        c.dt = dt;
        c.t_end = t_end;
        c.snapshot_stride = snapshot_stride;
        c.negativity_policy = policy;
        IntegrateOptions o;
        o.keep_states = keep_states;
        Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = integrate(t, DistributionState{to_vector(f), 0.0}, c, o);
        }
        py::dict d;
        py::list records;
        for (const auto& r : tr.records) records.append(record_dict(r));
        d["records"] = records;
        d["steps"] = tr.steps;
        d["negativity_events"] = tr.negativity_events.size();
        if (keep_states) {
          const auto rows = static_cast<py::ssize_t>(tr.snapshots.size());
          const auto cols = static_cast<py::ssize_t>(t.grid().size());
          py::array_t<double> states({rows, cols});
          auto* p = states.mutable_data();
          for (const auto& s : tr.snapshots) p = std::copy(s.values.begin(), s.values.end(), p);
          d["states"] = states;
        }
        return d;
      },
      py::arg("tables"), py::arg("f"), py::arg("dt") = 0.1, py::arg("t_end") = 0.0, py::arg("snapshot_stride") = 1,
      py::arg("policy") = NegativityPolicy::Abort, py::arg("keep_states") = true);

  m.def(
      "w2_circle",
      [](const Array& xa, const Array& ma, const Array& xb, const Array& mb) {
        return w2_circle_general(to_measure(xa, ma), to_measure(xb, mb));
      },
      py::arg("angles_a"), py::arg("masses_a"), py::arg("angles_b"), py::arg("masses_b"),
      "Quadratic-cost transport distance between two atomic measures of equal mass on the circle.");

  m.def(
      "lyapunov",
      [](const AngularGrid& g, const Array& f, const EquilibriumTarget& target) {
        const auto r = lyapunov(g, DistributionState{to_vector(f), 0.0}, target.as_measure());
        py::dict d;
        d["H"] = r.H;
        d["w2_f_fbar_sq"] = r.w2_f_fbar_sq;
        d["w2_fbar_finf_sq"] = r.w2_fbar_finf_sq;
        d["lambda"] = r.lambda;
        return d;
      },
      py::arg("grid"), py::arg("f"), py::arg("target"));

  m.def(
      "fit_exponential",
      [](const Array& t, const Array& y, double t_min, double t_max) {
        const auto r = fit_exponential(to_vector(t), to_vector(y), {t_min, t_max});
        return py::make_tuple(r.value, r.intercept, r.residual_rms);
      },
      py::arg("t"), py::arg("y"), py::arg("t_min"), py::arg("t_max"));
  m.def(
      "fit_power",
      [](const Array& t, const Array& y, double t_min, double t_max) {
        const auto r = fit_power(to_vector(t), to_vector(y), {t_min, t_max});
        return py::make_tuple(r.value, r.intercept, r.residual_rms);
      },
      py::arg("t"), py::arg("y"), py::arg("t_min"), py::arg("t_max"));
  m.def(
      "haff_bounds",
      [](double V0, double M1_0, double rho_plus, double t) {
        const auto b = haff_bounds(V0, M1_0, rho_plus, t);
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("V0"), py::arg("M1_0"), py::arg("rho_plus"), py::arg("t"));

  m.def(
      "run_macro",
      [](const Array& rho_plus, const Array& rho_minus, const Array& phi_plus, double length, double t_end,
         double cfl) {
        MacroOptions o;
        o.cfl = cfl;
        const auto run = run_macro(macro_from(rho_plus, rho_minus, phi_plus, length), t_end, o);
        return macro_dict(run.snapshots.back());
      },
      py::arg("rho_plus"), py::arg("rho_minus"), py::arg("phi_plus"), py::arg("length") = 1.0,
      py::arg("t_end") = 0.5, py::arg("cfl") = 0.9);

  m.def(
      "run_kinetic",
      [](const KernelTables& t, const Array& rho_plus, const Array& rho_minus, const Array& phi_plus, double knudsen,
         double length, double t_end, double cfl, double dt_hom) {
        KineticOptions o;
        o.cfl = cfl;
        o.dt_hom = dt_hom;
        const auto init = equilibrium_field(t.grid(), macro_from(rho_plus, rho_minus, phi_plus, length), knudsen);
        KineticRun run;
        {
          py::gil_scoped_release release;
          run = run_kinetic(t, init, t_end, o);
        }
        return macro_dict(macro_projection(t.grid(), run.snapshots.back()));
      },
      py::arg("tables"), py::arg("rho_plus"), py::arg("rho_minus"), py::arg("phi_plus"), py::arg("knudsen"),
      py::arg("length") = 1.0, py::arg("t_end") = 0.5, py::arg("cfl") = 0.9, py::arg("dt_hom") = 0.01,
      "Kinetic run from per-cell equilibria; returns the macro projection at t_end.");

  m.def(
      "l1_moment_discrepancy",
      [](const py::dict& a, const py::dict& b) {
        const auto get = [](const py::dict& d) {
          return macro_from(d["rho_plus"].cast<Array>(), d["rho_minus"].cast<Array>(), d["phi_plus"].cast<Array>(),
                            d["length"].cast<double>());
        };
        return l1_moment_discrepancy(get(a), get(b));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "validate_config",
      [](const std::string& text) { return json_to_python(to_json(parse_config(std::string_view(text)))); },
      py::arg("text"), "Parses a JSON config and returns its normalised form.");
  m.def(
      "run_config",
      [](const std::string& text, std::optional<std::filesystem::path> output_dir) {
        auto doc = nlohmann::json::parse(text.empty() ? std::string("{}") : text, nullptr, false);
        if (doc.is_discarded()) (void)parse_config(std::string_view(text));  // reports the syntax error
        if (output_dir) apply_override(doc, "output_dir", nlohmann::json(output_dir->string()).dump());
        const auto cfg = parse_config(doc);
        RunOutcome out;
        {
          py::gil_scoped_release release;
          out = run(cfg);
        }
        return json_to_python(out.meta);
      },
      py::arg("text"), py::arg("output_dir") = py::none(),
      "Runs a JSON config like the command line tool and returns the meta document.");
}
