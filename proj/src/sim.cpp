#include "gyroctl/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gyroctl/errors.hpp"

namespace gyroctl {

std::vector<UnitVec3> TrajectoryLog::gamma_series() const {
  std::vector<UnitVec3> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(UnitVec3::normalized(s.gamma));
  return out;
}

namespace {

Vec2 disturbance_at(const Scenario& sc, double t) {
  Vec2 d = Vec2::Zero();
  for (const Disturbance& dist : sc.disturbances) {
    if (t >= dist.start_s && t < dist.end_s) d += dist.torque;
  }
  return d;
}

Vec3 body_torque(const BodyParams& p, const Vec2& specific) { return p.J_sym * lift_xy(specific); }

// Closed-loop quantities evaluated at one control instant.
struct ControlEval {
  Vec2 v;
  double V;
  double V_dot;
};

ControlEval evaluate(const Scenario& sc, const CtlMatrices& m, const RigidState& x, const Vec2& u_real_prev,
                     const Vec2& u_hat, const Vec2& dist) {
  const Gains& g = sc.gains;
  const RefAttitude& ref = sc.ref;
  const AttitudeInputs att{x.R2, x.omega2};
  const Vec2 omega = project_xy(x.omega2);
  const Vec2 wd = omega_d(x.R2, ref, g.k_P);
  const Vec2 wd_dot = omega_d_dot(x.R2, x.omega2, ref, g.k_P);
  const Vec2 u_d = control_sp(omega, wd, wd_dot, m);

  ControlEval out{};
  switch (sc.law) {
    case Law::conventional:
      out.v = control_conventional(omega, wd, g);
      break;
    case Law::sp:
      out.v = u_d;
      break;
    case Law::sp_motor: {
      const Vec3 w2_dot = euler_deriv(x, body_torque(sc.body, u_real_prev + dist), sc.body).omega2_dot;
      out.v = control_sp_motor(att, w2_dot, ref, g, m);
      break;
    }
    case Law::sp_motor_observer: {
      CtlState cs;
      cs.omega = omega;
      cs.u_hat = u_hat;
      out.v = control_sp_observer(cs, att, ref, g, m, sc.rate_reading);
      break;
    }
  }

  // Realized torque just after this instant.
  const Vec2 u_real = sc.motor_dynamics ? u_real_prev : out.v;
  const Vec2 u_dot = sc.motor_dynamics ? motor_deriv(u_real, out.v, sc.body.tau_m) : Vec2::Zero();

  const UnitVec3 gamma = x.R2.axis3();
  ErrorCoords e;
  e.psi = error_psi(gamma, ref.Gamma_d());
  e.omega = omega;
  e.omega_d = wd;
  e.u_e = u_real - u_d;
  out.V = lyapunov_value(sc.law, e, g);

  // V̇ along the plant vector field.
  const Vec3 w2_dot = euler_deriv(x, body_torque(sc.body, u_real + dist), sc.body).omega2_dot;
  const Vec2 omega_dot = project_xy(w2_dot);
  const Vec3 gamma_dot = x.R2 * x.omega2.cross(Vec3::UnitZ());
  const double psi_dot = -ref.Gamma_d().vec().dot(gamma_dot);
  const Vec2 omega_e = omega - wd;
  const Vec2 omega_e_dot = omega_dot - wd_dot;
  switch (sc.law) {
    case Law::conventional:
      out.V_dot = g.k_P * psi_dot + omega.dot(omega_dot);
      break;
    case Law::sp:
      out.V_dot = g.k_P * psi_dot + omega_e.dot(omega_e_dot);
      break;
    case Law::sp_motor:
    case Law::sp_motor_observer: {
      const Vec2 wd_ddot = omega_d_ddot(x.R2, x.omega2, w2_dot, ref, g.k_P);
      const Vec2 u_d_dot = -m.A_sym * omega_dot - m.A * wd_dot + wd_ddot;
      out.V_dot = g.k_P * psi_dot + omega_e.dot(omega_e_dot) + e.u_e.dot(u_dot - u_d_dot);
      break;
    }
  }
  return out;
}

}  // namespace

TrajectoryLog run(const Scenario& sc) {
  sc.validate();
  TrajectoryLog log;
  log.name = sc.name;
  log.law = sc.law;
  log.motor_dynamics = sc.motor_dynamics;
  log.dt = sc.control_period_s;
  log.Gamma_d = sc.ref.Gamma_d();
  log.warnings = sc.warnings;

  const GainCheck gc = gain_check(sc.law, sc.gains, sc.body.tau_m);
  if (!gc.pass) {
    const std::string msg = "gains violate the stability condition of law " + std::string(to_string(sc.law)) +
                            " (margin " + std::to_string(gc.margin) + ")";
    if (sc.strict) throw ValidationError(msg);
    log.warnings.push_back(msg);
  }

  const CtlMatrices m = CtlMatrices::make(sc.gains, sc.body);
  const StepOptions opts{sc.integrator};
  const int substeps = sc.substeps();
  const int n_ctrl = sc.control_steps();
  const double h = sc.step_s;
  const double tau = sc.body.tau_m;

  RigidState x{sc.R0, Vec3(sc.omega0.x(), sc.omega0.y(), sc.body.r_bar)};
  Vec2 u = sc.u0;
  Vec2 u_hat = sc.u_hat0;
  log.samples.reserve(static_cast<std::size_t>(n_ctrl) + 1);
  log.max_V_dot = -std::numeric_limits<double>::infinity();

  for (int i = 0;; ++i) {
    const double t = i * sc.control_period_s;
    const ControlEval ce = evaluate(sc, m, x, u, u_hat, disturbance_at(sc, t));
    if (!sc.motor_dynamics) u = ce.v;

    Sample s;
    s.t = t;
    s.gamma = x.R2.matrix().col(2);
    s.omega = project_xy(x.omega2);
    s.u = u;
    s.u_hat = u_hat;
    s.v = ce.v;
    s.psi = error_psi(x.R2.axis3(), sc.ref.Gamma_d());
    s.V = ce.V;
    s.V_dot = ce.V_dot;
    log.samples.push_back(s);
    log.max_V_dot = std::max(log.max_V_dot, ce.V_dot);
    if (i == n_ctrl) break;

    for (int k = 0; k < substeps; ++k) {
      const double ts = t + k * h;
      Vec2 u_step = u;
      if (sc.motor_dynamics) {
        u_step = motor_mean(u, ce.v, tau, h);
        u = motor_advance(u, ce.v, tau, h);
      }
      try {
        x = step(x, body_torque(sc.body, u_step + disturbance_at(sc, ts)), h, sc.body, opts);
      } catch (const NoConvergence& e) {
        throw NoConvergence(std::string(e.what()) + " at t = " + std::to_string(ts) + " s");
      }
    }
    if (sc.law == Law::sp_motor_observer) u_hat = observer_update(u_hat, ce.v, tau, sc.control_period_s);
  }

  log.metrics = traj_metrics(log.gamma_series(), log.dt, log.Gamma_d, sc.settle_threshold_deg);
  return log;
}

ComparisonReport compare(const std::vector<Scenario>& scenarios) {
  if (scenarios.size() < 2) {
    throw MismatchedScenarios("compare needs at least two scenarios, got " + std::to_string(scenarios.size()));
  }
  const Vec3 g0 = scenarios.front().initial_gamma().vec();
  const Vec3 gd = scenarios.front().ref.Gamma_d().vec();
  for (const Scenario& sc : scenarios) {
    if ((sc.initial_gamma().vec() - g0).norm() > 1e-12 || (sc.ref.Gamma_d().vec() - gd).norm() > 1e-12) {
      throw MismatchedScenarios("scenario '" + sc.name + "' has a different initial or desired spin axis");
    }
  }

  std::vector<std::future<TrajectoryLog>> jobs;
  jobs.reserve(scenarios.size());
  for (const Scenario& sc : scenarios) {
    jobs.push_back(std::async(std::launch::async, [&sc] { return run(sc); }));
  }

  ComparisonReport report;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const TrajectoryLog log = jobs[i].get();
    ComparisonRow row;
    row.name = log.name;
    row.law = log.law;
    row.motor_dynamics = log.motor_dynamics;
    row.gains = gain_check(scenarios[i].law, scenarios[i].gains, scenarios[i].body.tau_m);
    row.metrics = log.metrics;
    row.max_V_dot = log.max_V_dot;
    row.lyapunov_monotone = log.max_V_dot <= kLyapunovTolerance;
    report.rows.push_back(row);
  }
  return report;
}

std::string ComparisonReport::to_text() const {
  std::ostringstream os;
  os << std::left << std::setw(24) << "scenario" << std::setw(19) << "law" << std::setw(7) << "motor"
     << std::right << std::setw(12) << "final_deg" << std::setw(10) << "settle_s" << std::setw(11)
     << "path_rad" << std::setw(11) << "efficiency" << std::setw(13) << "max_Vdot" << "  V_monotone\n";
  os << std::fixed;
  for (const ComparisonRow& r : rows) {
    os << std::left << std::setw(24) << r.name << std::setw(19) << to_string(r.law) << std::setw(7)
       << (r.motor_dynamics ? "on" : "off") << std::right << std::setprecision(3) << std::setw(12)
       << r.metrics.final_error_deg << std::setw(10);
    if (r.metrics.settle_time_s) {
      os << *r.metrics.settle_time_s;
    } else {
      os << "never";
    }
    os << std::setw(11) << r.metrics.path_length_rad << std::setw(11) << r.metrics.efficiency
       << std::setw(13) << std::scientific << std::setprecision(2) << r.max_V_dot << std::fixed
       << "  " << (r.lyapunov_monotone ? "yes" : "no") << '\n';
  }
  return os.str();
}

std::string ComparisonReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const ComparisonRow& r : rows) {
    nlohmann::json j;
    j["name"] = r.name;
    j["law"] = std::string(to_string(r.law));
    j["motor_dynamics"] = r.motor_dynamics;
    j["gain_check"] = {{"pass", r.gains.pass}, {"margin", r.gains.margin}, {"minors", r.gains.minors}};
    j["final_error_deg"] = r.metrics.final_error_deg;
    j["settle_time_s"] = r.metrics.settle_time_s ? nlohmann::json(*r.metrics.settle_time_s) : nlohmann::json();
    j["path_length_rad"] = r.metrics.path_length_rad;
    j["geodesic_rad"] = r.metrics.geodesic_rad;
    j["efficiency"] = r.metrics.efficiency;
    j["max_V_dot"] = r.max_V_dot;
    j["lyapunov_monotone"] = r.lyapunov_monotone;
    out.push_back(j);
  }
  return out.dump(2);
}

EmitFormat emit_format_from_string(std::string_view name) {
  if (name == "csv") return EmitFormat::csv;
  if (name == "sphere_path") return EmitFormat::sphere_path;
  if (name == "summary") return EmitFormat::summary;
  throw ValidationError("unknown output format '" + std::string(name) + "' (expected csv, sphere_path or summary)");
}

namespace {

// Shortest representation that round-trips.
struct Num {
  double v;
};

std::ostream& operator<<(std::ostream& os, Num n) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, n.v);
  return os.write(buf, res.ptr - buf);
}

}  // namespace

std::string render(const TrajectoryLog& log, EmitFormat format) {
  if (log.samples.empty()) throw ValidationError("refusing to emit an empty trajectory log");
  std::ostringstream os;
  auto row3 = [&os](const Vec3& g) { os << Num{g.x()} << ',' << Num{g.y()} << ',' << Num{g.z()}; };
  switch (format) {
    case EmitFormat::csv:
      os << kCsvHeader << '\n';
      for (const Sample& s : log.samples) {
        os << Num{s.t} << ',';
        row3(s.gamma);
        for (const Vec2* x : {&s.omega, &s.u, &s.u_hat, &s.v}) os << ',' << Num{x->x()} << ',' << Num{x->y()};
        os << ',' << Num{s.psi} << ',' << Num{s.V} << '\n';
      }
      break;
    case EmitFormat::sphere_path:
      os << "t,gx,gy,gz\n";
      for (const Sample& s : log.samples) {
        os << Num{s.t} << ',';
        row3(s.gamma);
        os << '\n';
      }
      os << "# initial,";
      row3(log.samples.front().gamma);
      os << "\n# desired,";
      row3(log.Gamma_d.vec());
      os << "\n# final,";
      row3(log.samples.back().gamma);
      os << '\n';
      break;
    case EmitFormat::summary: {
      const TrajMetrics& m = log.metrics;
      os << "name=" << log.name << '\n'
         << "law=" << to_string(log.law) << '\n'
         << "motor_dynamics=" << (log.motor_dynamics ? "true" : "false") << '\n'
         << "final_error_deg=" << Num{m.final_error_deg} << '\n'
         << "settle_time_s=";
      if (m.settle_time_s) {
        os << Num{*m.settle_time_s};
      } else {
        os << "never";
      }
      os << '\n'
         << "path_length_rad=" << Num{m.path_length_rad} << '\n'
         << "geodesic_rad=" << Num{m.geodesic_rad} << '\n'
         << "efficiency=" << Num{m.efficiency} << '\n'
         << "max_V_dot=" << Num{log.max_V_dot} << '\n';
      break;
    }
  }
  return os.str();
}

void emit(const TrajectoryLog& log, EmitFormat format, const std::filesystem::path& path) {
  const std::string text = render(log, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace gyroctl
