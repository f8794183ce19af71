#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dyncable/analysis.hpp"
#include "dyncable/pipeline.hpp"

namespace py = pybind11;
using namespace dyncable;

PYBIND11_MODULE(_dyncable, m) {
  m.doc() = "dynamic free-end cable manipulation pipeline";

  py::class_<PolarPoint>(m, "PolarPoint")
      .def(py::init<double, double>(), py::arg("r") = 0.0,
           py::arg("theta") = 0.0)
      .def_readwrite("r", &PolarPoint::r)
      .def_readwrite("theta", &PolarPoint::theta);
  py::class_<PlanePoint>(m, "PlanePoint")
      .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
      .def_readwrite("x", &PlanePoint::x)
      .def_readwrite("y", &PlanePoint::y);
  m.def("polar_to_cartesian", &polar_to_cartesian);
  m.def("cartesian_to_polar", &cartesian_to_polar);

  py::class_<Action>(m, "Action")
      .def(py::init([](double t1, double t2, double r2,
                       std::optional<double> psi) {
             return Action{t1, t2, r2, psi};
           }),
           py::arg("theta1") = 0.0, py::arg("theta2") = 0.0,
           py::arg("r2") = 0.6, py::arg("psi") = py::none())
      .def_readwrite("theta1", &Action::theta1)
      .def_readwrite("theta2", &Action::theta2)
      .def_readwrite("r2", &Action::r2)
      .def_readwrite("psi", &Action::psi);
  m.def("mirror", &mirror);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init<>())
      .def_readwrite("r0", &SystemParams::r0)
      .def_readwrite("v_max", &SystemParams::v_max)
      .def_readwrite("control_period", &SystemParams::control_period)
      .def_readwrite("reset_y", &SystemParams::reset_y);
  py::class_<WorkspaceLimits>(m, "WorkspaceLimits")
      .def(py::init<>())
      .def_readwrite("r_max", &WorkspaceLimits::r_max)
      .def_readwrite("r_c", &WorkspaceLimits::r_c)
      .def_readwrite("y_min_base", &WorkspaceLimits::y_min_base)
      .def("on_table", &WorkspaceLimits::on_table);
  py::class_<NoiseSpec>(m, "NoiseSpec")
      .def(py::init<double, double>(), py::arg("sigma_pos") = 0.0,
           py::arg("sigma_act") = 0.0)
      .def_readwrite("sigma_pos", &NoiseSpec::sigma_pos)
      .def_readwrite("sigma_act", &NoiseSpec::sigma_act);
  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n_segments", &SimConfig::n_segments)
      .def_readwrite("rest_length_total", &SimConfig::rest_length_total)
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("seed", &SimConfig::seed);
  py::class_<CableParams>(m, "CableParams")
      .def(py::init<>())
      .def_readwrite("bend_stiffness", &CableParams::bend_stiffness)
      .def_readwrite("mass_per_segment", &CableParams::mass_per_segment)
      .def_readwrite("lateral_friction", &CableParams::lateral_friction)
      .def_readwrite("endpoint_mass_scale", &CableParams::endpoint_mass_scale)
      .def_readwrite("linear_damping", &CableParams::linear_damping)
      .def_readwrite("angular_damping", &CableParams::angular_damping)
      .def_readwrite("worksurface_friction",
                     &CableParams::worksurface_friction)
      .def("to_vector", &CableParams::to_vector);

  py::class_<Waypoint>(m, "Waypoint")
      .def_readonly("t", &Waypoint::t)
      .def_readonly("gripper", &Waypoint::gripper)
      .def_readonly("wrist", &Waypoint::wrist);
  py::class_<EndEffectorTrajectory>(m, "EndEffectorTrajectory")
      .def_readonly("waypoints", &EndEffectorTrajectory::waypoints)
      .def_readonly("duration", &EndEffectorTrajectory::duration);
  m.def("synthesize", &synthesize);
  py::class_<LimitCheck>(m, "LimitCheck")
      .def_readonly("ok", &LimitCheck::ok)
      .def_readonly("reason", &LimitCheck::reason);
  m.def("check_limits", &check_limits);
  py::enum_<ActionSet>(m, "ActionSet")
      .value("A1", ActionSet::A1)
      .value("A2", ActionSet::A2);
  py::class_<ActionBounds>(m, "ActionBounds").def(py::init<>());
  m.def("grid_sample_actions", &grid_sample_actions);

  py::class_<CableState>(m, "CableState");
  py::class_<TrajectoryTrace>(m, "TrajectoryTrace")
      .def_readonly("waypoints", &TrajectoryTrace::waypoints)
      .def_readonly("duration_ms", &TrajectoryTrace::duration_ms);
  py::class_<RolloutResult>(m, "RolloutResult")
      .def_readonly("state", &RolloutResult::state)
      .def_readonly("trace", &RolloutResult::trace)
      .def_readonly("settle_time", &RolloutResult::settle_time);
  m.def("reset_state", &reset_state);
  m.def("rollout", &rollout, py::call_guard<py::gil_scoped_release>());
  m.def("endpoint_xy", &endpoint_xy);
  m.def("endpoint_polar", &endpoint_polar);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("name", &Dataset::name)
      .def("__len__",
           [](const Dataset& d) { return d.transitions.size(); });
  m.def("generate", &generate, py::arg("name"), py::arg("actions"),
        py::arg("params"), py::arg("cfg"), py::arg("sys"),
        py::arg("noise") = std::nullopt, py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("save_dataset", &save);
  m.def("load_dataset", &load);

  py::class_<MLPForward>(m, "MLPForward")
      .def("predict",
           [](const MLPForward& mlp, const Action& a) { return mlp.predict(a); })
      .def("to_json", &MLPForward::to_json)
      .def_static("from_json", &MLPForward::from_json);
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("seed", &TrainConfig::seed);
  m.def("train_mlp", &train_mlp, py::call_guard<py::gil_scoped_release>());
  py::class_<GPForward>(m, "GPForward")
      .def("predict",
           [](const GPForward& gp, const Action& a) { return gp.predict(a); })
      .def("to_json", &GPForward::to_json)
      .def_static("from_json", &GPForward::from_json);
  m.def("train_gp", &train_gp, py::arg("dataset"), py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<CoverageResult>(m, "CoverageResult")
      .def_readonly("area", &CoverageResult::area)
      .def_readonly("raw_area", &CoverageResult::raw_area)
      .def_readonly("alpha", &CoverageResult::alpha)
      .def_readonly("point_count", &CoverageResult::point_count);
  m.def("coverage", &coverage, py::arg("points"), py::arg("ws"),
        py::arg("sys"), py::arg("alpha") = 0.0);
  m.def("dataset_endpoints", &dataset_endpoints);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static("desk", &ExperimentConfig::desk, py::arg("seed") = 0)
      .def_static("full", &ExperimentConfig::full, py::arg("seed") = 0)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("workers", &ExperimentConfig::workers)
      .def("to_json", &ExperimentConfig::to_json)
      .def("hash", &ExperimentConfig::hash);
}
