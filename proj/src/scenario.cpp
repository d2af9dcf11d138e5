#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>

#include "gyroctl/errors.hpp"
#include "gyroctl/sim.hpp"

namespace gyroctl {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

int line_of(const YAML::Node& n) {
  const YAML::Mark mark = n.Mark();
  return mark.is_null() ? 0 : mark.line + 1;
}

void require_map(const YAML::Node& n, const std::string& where) {
  if (!n.IsMap()) throw ParseError(where + " must be a mapping", line_of(n));
}

void reject_unknown(const YAML::Node& n, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) {
      throw ParseError("unknown key '" + key + "' in " + where, line_of(kv.first));
    }
  }
}

double get_double(const YAML::Node& n, const std::string& field) {
  try {
    const double v = n.as<double>();
    if (!std::isfinite(v)) throw ParseError(field + " must be finite", line_of(n));
    return v;
  } catch (const YAML::Exception&) {
    throw ParseError(field + " must be a number", line_of(n));
  }
}

bool get_bool(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    throw ParseError(field + " must be true or false", line_of(n));
  }
}

std::string get_string(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ParseError(field + " must be a string", line_of(n));
  return n.as<std::string>();
}

Eigen::VectorXd get_vector(const YAML::Node& n, const std::string& field, int size) {
  if (!n.IsSequence() || static_cast<int>(n.size()) != size) {
    throw ParseError(field + " must be a list of " + std::to_string(size) + " numbers", line_of(n));
  }
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v(i) = get_double(n[i], field);
  return v;
}

// Normalizes a direction, warning (or failing when strict) if it was not unit length.
UnitVec3 get_direction(const YAML::Node& n, const std::string& field, bool strict,
                       std::vector<std::string>& warnings) {
  const Vec3 v = get_vector(n, field, 3);
  if (v.norm() == 0.0) throw ValidationError(field + " must be non-zero");
  if (std::abs(v.norm() - 1.0) > UnitVec3::kTolerance) {
    if (strict) throw ValidationError(field + " must be a unit vector (strict mode)");
    warnings.push_back(field + " was not unit length and has been normalized");
  }
  return UnitVec3::normalized(v);
}

template <typename F>
auto with_line(const YAML::Node& n, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), line_of(n));
  }
}

void parse_body(const YAML::Node& n, BodyParams& body) {
  require_map(n, "body");
  reject_unknown(n, "body", {"inertia", "spin_rate_dps", "spin_rate_rad_s", "motor_time_constant_s"});
  if (n["inertia"]) {
    const Eigen::VectorXd j = get_vector(n["inertia"], "body.inertia", 3);
    if (std::abs(j(0) - j(1)) > 1e-12 * std::max(std::abs(j(0)), std::abs(j(1)))) {
      throw ValidationError("body.inertia: axis symmetry J_xx == J_yy violated");
    }
    body.J_sym = j(0);
    body.J_zz = j(2);
  }
  if (n["spin_rate_dps"] && n["spin_rate_rad_s"]) {
    throw ParseError("give only one of spin_rate_dps and spin_rate_rad_s", line_of(n));
  }
  if (n["spin_rate_dps"]) body.r_bar = get_double(n["spin_rate_dps"], "body.spin_rate_dps") * kDeg;
  if (n["spin_rate_rad_s"]) body.r_bar = get_double(n["spin_rate_rad_s"], "body.spin_rate_rad_s");
  if (n["motor_time_constant_s"]) {
    body.tau_m = get_double(n["motor_time_constant_s"], "body.motor_time_constant_s");
  }
}

void parse_initial(const YAML::Node& n, Scenario& sc) {
  require_map(n, "initial");
  reject_unknown(n, "initial",
                 {"gamma", "spin_phase_deg", "rotation", "rates_dps", "torque", "observer_torque"});
  if (n["rotation"] && (n["gamma"] || n["spin_phase_deg"])) {
    throw ParseError("initial: give either rotation or gamma/spin_phase_deg", line_of(n));
  }
  if (n["rotation"]) {
    const YAML::Node& r = n["rotation"];
    if (!r.IsSequence() || r.size() != 3) {
      throw ParseError("initial.rotation must be a 3x3 list of rows", line_of(r));
    }
    Mat3 m;
    for (int i = 0; i < 3; ++i) m.row(i) = get_vector(r[i], "initial.rotation row", 3).transpose();
    sc.R0 = with_line(r, [&] { return Rotation(m); });
  } else {
    const UnitVec3 g = n["gamma"] ? get_direction(n["gamma"], "initial.gamma", sc.strict, sc.warnings)
                                  : sc.initial_gamma();
    const double phase = n["spin_phase_deg"] ? get_double(n["spin_phase_deg"], "initial.spin_phase_deg") : 0.0;
    sc.R0 = rotation_to(g) * rot_z(phase * kDeg);
  }
  if (n["rates_dps"]) sc.omega0 = get_vector(n["rates_dps"], "initial.rates_dps", 2) * kDeg;
  if (n["torque"]) sc.u0 = get_vector(n["torque"], "initial.torque", 2);
  if (n["observer_torque"]) sc.u_hat0 = get_vector(n["observer_torque"], "initial.observer_torque", 2);
}

void parse_desired(const YAML::Node& n, Scenario& sc) {
  require_map(n, "desired");
  reject_unknown(n, "desired", {"gamma", "spin_phase_deg"});
  const UnitVec3 g = n["gamma"] ? get_direction(n["gamma"], "desired.gamma", sc.strict, sc.warnings)
                                : sc.ref.Gamma_d();
  const double phase = n["spin_phase_deg"] ? get_double(n["spin_phase_deg"], "desired.spin_phase_deg") : 0.0;
  sc.ref = RefAttitude(rotation_to(g) * rot_z(phase * kDeg));
}

void parse_timing(const YAML::Node& n, Scenario& sc) {
  require_map(n, "timing");
  reject_unknown(n, "timing", {"duration_s", "step_s", "control_period_s"});
  if (n["duration_s"]) sc.duration_s = get_double(n["duration_s"], "timing.duration_s");
  if (n["step_s"]) sc.step_s = get_double(n["step_s"], "timing.step_s");
  if (n["control_period_s"]) sc.control_period_s = get_double(n["control_period_s"], "timing.control_period_s");
}

void parse_disturbances(const YAML::Node& n, Scenario& sc) {
  if (!n.IsSequence()) throw ParseError("disturbances must be a list", line_of(n));
  for (const YAML::Node& d : n) {
    require_map(d, "disturbance");
    reject_unknown(d, "disturbance", {"start_s", "end_s", "torque"});
    if (!d["start_s"] || !d["end_s"] || !d["torque"]) {
      throw ParseError("disturbance needs start_s, end_s and torque", line_of(d));
    }
    Disturbance dist;
    dist.start_s = get_double(d["start_s"], "disturbance.start_s");
    dist.end_s = get_double(d["end_s"], "disturbance.end_s");
    dist.torque = get_vector(d["torque"], "disturbance.torque", 2);
    sc.disturbances.push_back(dist);
  }
}

}  // namespace

Scenario load_scenario(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line + 1);
  }
  if (!root.IsMap()) throw ParseError("scenario document must be a mapping", line_of(root));
  reject_unknown(root, "scenario",
                 {"name", "law", "motor_dynamics", "strict", "integrator", "observer_rate_reading",
                  "settle_threshold_deg", "body", "gains", "initial", "desired", "timing",
                  "disturbances"});

  Scenario sc;
  if (root["strict"]) sc.strict = get_bool(root["strict"], "strict");
  if (root["name"]) sc.name = get_string(root["name"], "name");
  if (root["law"]) {
    const YAML::Node n = root["law"];
    sc.law = with_line(n, [&] { return law_from_string(get_string(n, "law")); });
  }
  if (root["motor_dynamics"]) sc.motor_dynamics = get_bool(root["motor_dynamics"], "motor_dynamics");
  if (root["integrator"]) {
    const std::string s = get_string(root["integrator"], "integrator");
    if (s == "lgvi") {
      sc.integrator = Integrator::lgvi;
    } else if (s == "rk4_exp") {
      sc.integrator = Integrator::rk4_exp;
    } else {
      throw ParseError("integrator must be lgvi or rk4_exp", line_of(root["integrator"]));
    }
  }
  if (root["observer_rate_reading"]) {
    const YAML::Node n = root["observer_rate_reading"];
    sc.rate_reading = with_line(n, [&] { return rate_reading_from_string(get_string(n, "observer_rate_reading")); });
  }
  if (root["settle_threshold_deg"]) {
    sc.settle_threshold_deg = get_double(root["settle_threshold_deg"], "settle_threshold_deg");
  }
  if (root["body"]) parse_body(root["body"], sc.body);
  if (root["gains"]) {
    const YAML::Node n = root["gains"];
    require_map(n, "gains");
    reject_unknown(n, "gains", {"k_p", "k_d"});
    if (n["k_p"]) sc.gains.k_P = get_double(n["k_p"], "gains.k_p");
    if (n["k_d"]) sc.gains.k_D = get_double(n["k_d"], "gains.k_d");
  }
  if (root["initial"]) parse_initial(root["initial"], sc);
  if (root["desired"]) parse_desired(root["desired"], sc);
  if (root["timing"]) parse_timing(root["timing"], sc);
  if (root["disturbances"]) parse_disturbances(root["disturbances"], sc);

  sc.validate();
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return load_scenario(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

int Scenario::substeps() const { return static_cast<int>(std::llround(control_period_s / step_s)); }

int Scenario::control_steps() const { return static_cast<int>(std::llround(duration_s / control_period_s)); }

void Scenario::validate() const {
  body.validate();
  if (!(duration_s > 0.0)) throw ValidationError("duration_s > 0 violated");
  if (!(step_s > 0.0 && step_s <= 1e-2)) throw ValidationError("step_s must lie in (0, 0.01]");
  if (!(control_period_s >= step_s)) throw ValidationError("control_period_s >= step_s violated");
  const double ratio = control_period_s / step_s;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ValidationError("step_s must divide control_period_s");
  }
  const double n = duration_s / control_period_s;
  if (std::abs(n - std::round(n)) > 1e-9 * n) {
    throw ValidationError("control_period_s must divide duration_s");
  }
  if (!(settle_threshold_deg > 0.0)) throw ValidationError("settle_threshold_deg > 0 violated");
  for (const Disturbance& d : disturbances) {
    if (!(d.end_s >= d.start_s)) throw ValidationError("disturbance end_s >= start_s violated");
  }
}

}  // namespace gyroctl
