#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gyroctl/analysis.hpp"
#include "gyroctl/controllers.hpp"
#include "gyroctl/dynamics.hpp"

namespace gyroctl {

/// Piecewise-constant specific torque added to the realized torque on [start_s, end_s).
struct Disturbance {
  double start_s = 0.0;
  double end_s = 0.0;
  Vec2 torque = Vec2::Zero();  // rad/s²
};

/// One closed-loop simulation. Defaults reproduce the horizontal-to-vertical
/// manoeuvre: Γ(0) = e₁, Γ_d = e₃, 1 ms dynamics steps, 250 Hz control.
struct Scenario {
  std::string name = "scenario";
  BodyParams body;
  Gains gains;
  Law law = Law::sp;
  bool motor_dynamics = false;

  Rotation R0 = rotation_to(UnitVec3::e1());
  Vec2 omega0 = Vec2::Zero();  // initial planar body rates; ω₂z starts at r̄
  Vec2 u0 = Vec2::Zero();      // initial realized torque
  Vec2 u_hat0 = Vec2::Zero();  // initial observer estimate
  RefAttitude ref = RefAttitude(Rotation::identity());

  double duration_s = 5.0;
  double step_s = 1e-3;
  double control_period_s = 4e-3;
  std::vector<Disturbance> disturbances;

  Integrator integrator = Integrator::lgvi;
  RateReading rate_reading = RateReading::body_rate;
  bool strict = false;  // reject instead of warn on recoverable problems
  double settle_threshold_deg = 1.0;

  std::vector<std::string> warnings;

  /// Throws ValidationError naming the violated invariant.
  void validate() const;
  UnitVec3 initial_gamma() const { return R0.axis3(); }
  int substeps() const;
  int control_steps() const;
};

/// Parses a YAML scenario document; unspecified fields keep their defaults.
/// Throws ParseError (with line) or ValidationError.
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

struct Sample {
  double t = 0.0;
  Vec3 gamma = Vec3::Zero();
  Vec2 omega = Vec2::Zero();
  Vec2 u = Vec2::Zero();      // realized specific torque
  Vec2 u_hat = Vec2::Zero();  // observer estimate
  Vec2 v = Vec2::Zero();      // commanded torque
  double psi = 0.0;
  double V = 0.0;
  double V_dot = 0.0;  // instantaneous, along the plant vector field
};

struct TrajectoryLog {
  std::string name;
  Law law = Law::sp;
  bool motor_dynamics = false;
  double dt = 0.0;  // sample spacing (control period)
  UnitVec3 Gamma_d = UnitVec3::e3();
  std::vector<Sample> samples;
  TrajMetrics metrics;
  double max_V_dot = 0.0;
  std::vector<std::string> warnings;

  std::vector<UnitVec3> gamma_series() const;
};

/// Runs the closed loop. Deterministic for a given scenario. Throws
/// ValidationError for invalid scenarios and NoConvergence (with the failing
/// time) when the integrator fails.
TrajectoryLog run(const Scenario& sc);

inline constexpr double kLyapunovTolerance = 1e-8;

struct ComparisonRow {
  std::string name;
  Law law = Law::sp;
  bool motor_dynamics = false;
  GainCheck gains;
  TrajMetrics metrics;
  double max_V_dot = 0.0;
  bool lyapunov_monotone = false;  // max V̇ <= kLyapunovTolerance
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;

  std::string to_text() const;
  std::string to_json() const;
};

/// Runs every scenario (concurrently) and tabulates the metrics. Throws
/// MismatchedScenarios for fewer than two scenarios or differing Γ(0)/Γ_d.
ComparisonReport compare(const std::vector<Scenario>& scenarios);

enum class EmitFormat { csv, sphere_path, summary };

EmitFormat emit_format_from_string(std::string_view name);

/// Writes `log` to `path`. Throws IoError with the path on failure and
/// ValidationError for an empty log.
void emit(const TrajectoryLog& log, EmitFormat format, const std::filesystem::path& path);

/// Same content as emit, into a string.
std::string render(const TrajectoryLog& log, EmitFormat format);

inline constexpr std::string_view kCsvHeader = "t,gx,gy,gz,wx,wy,ux,uy,uhx,uhy,vx,vy,psi,V";

}  // namespace gyroctl
