#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gyroctl/analysis.hpp"
#include "gyroctl/errors.hpp"
#include "gyroctl/sim.hpp"

namespace py = pybind11;
using namespace gyroctl;

namespace {

// Columns of the trajectory log as one (n, 14) array in CSV column order.
Eigen::MatrixXd log_array(const TrajectoryLog& log) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(log.samples.size()), 14);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Sample& s = log.samples[static_cast<std::size_t>(i)];
    a.row(i) << s.t, s.gamma.x(), s.gamma.y(), s.gamma.z(), s.omega.x(), s.omega.y(), s.u.x(), s.u.y(),
        s.u_hat.x(), s.u_hat.y(), s.v.x(), s.v.y(), s.psi, s.V;
  }
  return a;
}

UnitVec3 unit(const Vec3& v) { return UnitVec3::normalized(v); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reduced-attitude control of a spinning rigid body";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<MismatchedScenarios>(m, "MismatchedScenarios", base.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
  py::register_exception<SingularSystem>(m, "SingularSystem", base.ptr());
  py::register_exception<InvalidEquilibrium>(m, "InvalidEquilibrium", base.ptr());

  m.def("hat", &hat);
  m.def("vee", &vee);
  m.def("exp_so3", [](const Vec3& v) { return exp_so3(v).matrix(); });
  m.def("geodesic_angle", [](const Vec3& a, const Vec3& b) { return geodesic_angle(unit(a), unit(b)); });

  py::enum_<Law>(m, "Law")
      .value("conventional", Law::conventional)
      .value("sp", Law::sp)
      .value("sp_motor", Law::sp_motor)
      .value("sp_motor_observer", Law::sp_motor_observer);

  py::class_<BodyParams>(m, "BodyParams")
      .def(py::init<>())
      .def_readwrite("J_sym", &BodyParams::J_sym)
      .def_readwrite("J_zz", &BodyParams::J_zz)
      .def_readwrite("r_bar", &BodyParams::r_bar)
      .def_readwrite("tau_m", &BodyParams::tau_m)
      .def_property_readonly("k", [](const BodyParams& p) { return GyroCoeffs::from(p).k; })
      .def_property_readonly("k_bar", [](const BodyParams& p) { return GyroCoeffs::from(p).k_bar; });

  py::class_<Gains>(m, "Gains")
      .def(py::init<>())
      .def(py::init([](double kp, double kd) { return Gains{kp, kd}; }), py::arg("k_P"), py::arg("k_D"))
      .def_readwrite("k_P", &Gains::k_P)
      .def_readwrite("k_D", &Gains::k_D);

  py::class_<GainCheck>(m, "GainCheck")
      .def_readonly("passed", &GainCheck::pass)
      .def_readonly("margin", &GainCheck::margin)
      .def_readonly("minors", &GainCheck::minors);
  m.def("gain_check", &gain_check, py::arg("law"), py::arg("gains"), py::arg("tau_m") = BodyParams{}.tau_m);

  m.def(
      "linearize",
      [](Law law, const Gains& g, const BodyParams& body, const Vec3& gamma_d, bool antipode) {
        LinProblem prob{law, RefAttitude::toward(unit(gamma_d)), g, body};
        const UnitVec3 eq = antipode ? -prob.ref.Gamma_d() : prob.ref.Gamma_d();
        return linearize(prob, eq).S;
      },
      py::arg("law"), py::arg("gains"), py::arg("body") = BodyParams{}, py::arg("gamma_d") = Vec3::UnitZ(),
      py::arg("antipode") = false);
  m.def(
      "finite_diff_jacobian",
      [](Law law, const Gains& g, const BodyParams& body, const Vec3& gamma_d, bool antipode, double eps) {
        LinProblem prob{law, RefAttitude::toward(unit(gamma_d)), g, body};
        const UnitVec3 eq = antipode ? -prob.ref.Gamma_d() : prob.ref.Gamma_d();
        return finite_diff_jacobian(prob, eq, eps);
      },
      py::arg("law"), py::arg("gains"), py::arg("body") = BodyParams{}, py::arg("gamma_d") = Vec3::UnitZ(),
      py::arg("antipode") = false, py::arg("eps") = 1e-6);
  m.def(
      "spectral_abscissa", [](const Eigen::MatrixXd& S) { return hurwitz(S).abscissa; }, py::arg("S"));

  m.def(
      "phase_portrait",
      [](double k_bar, double k_D, const Vec2& u_bar, int grid, double half_width, double duration) {
        PortraitOptions opts;
        opts.duration = duration;
        const PhasePortrait pp = phase_portrait(k_bar, k_D, u_bar, square_grid(grid, half_width), opts);
        py::dict out;
        out["times"] = pp.times;
        out["trajectories"] = pp.trajectories;
        out["omega_ss"] = pp.omega_ss;
        out["lag_rad"] = pp.lag_rad;
        return out;
      },
      py::arg("k_bar"), py::arg("k_D"), py::arg("u_bar") = Vec2::Zero(), py::arg("grid") = 5,
      py::arg("half_width") = 1.0, py::arg("duration") = 5.0);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("body", &Scenario::body)
      .def_readwrite("gains", &Scenario::gains)
      .def_readwrite("law", &Scenario::law)
      .def_readwrite("motor_dynamics", &Scenario::motor_dynamics)
      .def_readwrite("duration_s", &Scenario::duration_s)
      .def_readwrite("step_s", &Scenario::step_s)
      .def_readwrite("control_period_s", &Scenario::control_period_s)
      .def_readwrite("strict", &Scenario::strict)
      .def_readonly("warnings", &Scenario::warnings)
      .def_property(
          "initial_gamma", [](const Scenario& s) { return s.initial_gamma().vec(); },
          [](Scenario& s, const Vec3& g) { s.R0 = rotation_to(unit(g)); })
      .def_property(
          "desired_gamma", [](const Scenario& s) { return s.ref.Gamma_d().vec(); },
          [](Scenario& s, const Vec3& g) { s.ref = RefAttitude::toward(unit(g)); });
  m.def("load_scenario", [](const std::string& text) { return load_scenario(text); }, py::arg("text"));
  m.def(
      "load_scenario_file", [](const std::string& path) { return load_scenario_file(path); }, py::arg("path"));

  py::class_<TrajMetrics>(m, "TrajMetrics")
      .def_readonly("final_error_deg", &TrajMetrics::final_error_deg)
      .def_readonly("settle_time_s", &TrajMetrics::settle_time_s)
      .def_readonly("path_length_rad", &TrajMetrics::path_length_rad)
      .def_readonly("geodesic_rad", &TrajMetrics::geodesic_rad)
      .def_readonly("efficiency", &TrajMetrics::efficiency);

  py::class_<TrajectoryLog>(m, "TrajectoryLog")
      .def_readonly("name", &TrajectoryLog::name)
      .def_readonly("metrics", &TrajectoryLog::metrics)
      .def_readonly("max_V_dot", &TrajectoryLog::max_V_dot)
      .def_readonly("warnings", &TrajectoryLog::warnings)
      .def_property_readonly("columns", [](const TrajectoryLog&) { return std::string(kCsvHeader); })
      .def("array", &log_array)
      .def("csv", [](const TrajectoryLog& l) { return render(l, EmitFormat::csv); })
      .def("summary", [](const TrajectoryLog& l) { return render(l, EmitFormat::summary); });

  m.def("run", &run, py::arg("scenario"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "compare_json", [](const std::vector<Scenario>& s) { return compare(s).to_json(); }, py::arg("scenarios"),
      py::call_guard<py::gil_scoped_release>());
}
