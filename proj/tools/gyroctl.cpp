#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gyroctl/analysis.hpp"
#include "gyroctl/errors.hpp"
#include "gyroctl/sim.hpp"

namespace fs = std::filesystem;
using namespace gyroctl;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr double kDeg = 180.0 / std::numbers::pi;

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::string extension(EmitFormat f) {
  switch (f) {
    case EmitFormat::csv: return ".csv";
    case EmitFormat::sphere_path: return ".sphere.csv";
    case EmitFormat::summary: return ".summary.txt";
  }
  return ".out";
}

int cmd_run(const std::string& config, const std::string& out_dir, const std::vector<std::string>& formats) {
  const Scenario sc = load_scenario_file(config);
  const TrajectoryLog log = run(sc);
  print_warnings(log.warnings);
  std::cout << render(log, EmitFormat::summary);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (const auto& name : formats) {
      const EmitFormat f = emit_format_from_string(name);
      const fs::path path = fs::path(out_dir) / (log.name + extension(f));
      emit(log, f, path);
      std::cerr << "wrote " << path.string() << '\n';
    }
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& configs, bool json) {
  std::vector<Scenario> scs;
  for (const auto& c : configs) {
    scs.push_back(load_scenario_file(c));
    print_warnings(scs.back().warnings);
  }
  const ComparisonReport report = compare(scs);
  std::cout << (json ? report.to_json() : report.to_text());
  if (json) std::cout << '\n';
  return 0;
}

int cmd_portrait(double kbar, double kd, double ux, double uy, int grid, double half_width, double duration,
                 const std::string& out) {
  PortraitOptions opts;
  opts.duration = duration;
  const PhasePortrait pp = phase_portrait(kbar, kd, Vec2(ux, uy), square_grid(grid, half_width), opts);
  std::printf("k_bar=%.6g\nk_D=%.6g\nomega_ss=%.9g,%.9g\n", kbar, kd, pp.omega_ss.x(), pp.omega_ss.y());
  if (pp.lag_rad) std::printf("lag_deg=%.6f\n", *pp.lag_rad * kDeg);
  if (out.empty()) return 0;
  std::ofstream f(out);
  if (!f) throw IoError("cannot open " + out + " for writing");
  f << "trajectory,t,wx,wy\n";
  for (std::size_t i = 0; i < pp.trajectories.size(); ++i) {
    for (std::size_t j = 0; j < pp.times.size(); ++j) {
      const Vec2& w = pp.trajectories[i][j];
      f << i << ',' << pp.times[j] << ',' << w.x() << ',' << w.y() << '\n';
    }
  }
  if (!f) throw IoError("write failed for " + out);
  std::cerr << "wrote " << out << '\n';
  return 0;
}

void print_spectrum(const char* where, const LinMatrix& L) {
  const Spectrum s = hurwitz(L);
  std::printf("%s: %s, spectral abscissa %.6g\n", where, s.is_hurwitz ? "Hurwitz" : "not Hurwitz", s.abscissa);
  for (const auto& ev : s.eigenvalues) std::printf("  %+.6g %+.6gi\n", ev.real(), ev.imag());
}

int cmd_linearize(const std::string& config) {
  const Scenario sc = load_scenario_file(config);
  print_warnings(sc.warnings);
  LinProblem prob{sc.law, sc.ref, sc.gains, sc.body};
  std::printf("law %s, k_P=%g, k_D=%g\n", std::string(to_string(sc.law)).c_str(), sc.gains.k_P, sc.gains.k_D);
  print_spectrum("at Gamma_d", linearize(prob, sc.ref.Gamma_d()));
  print_spectrum("at -Gamma_d", linearize(prob, -sc.ref.Gamma_d()));
  return 0;
}

int cmd_gains_check(const std::string& config, double kp, double kd, double tau) {
  Gains g{kp, kd};
  if (!config.empty()) {
    const Scenario sc = load_scenario_file(config);
    g = sc.gains;
    tau = sc.body.tau_m;
  }
  bool all = true;
  for (Law law : {Law::conventional, Law::sp, Law::sp_motor, Law::sp_motor_observer}) {
    const GainCheck c = gain_check(law, g, tau);
    all = all && c.pass;
    std::printf("%-18s %s  margin %+.6g  minors", std::string(to_string(law)).c_str(), c.pass ? "pass" : "FAIL",
                c.margin);
    for (double m : c.minors) std::printf(" %.6g", m);
    std::printf("\n");
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-attitude control of a spinning rigid body: simulation and analysis"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::vector<std::string> formats{"csv", "sphere_path", "summary"};
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and print its summary");
  run_cmd->add_option("config", config, "Scenario YAML file")->required();
  run_cmd->add_option("--out-dir", out_dir, "Write output files to this directory");
  run_cmd->add_option("--format", formats, "Output formats: csv, sphere_path, summary")->delimiter(',');

  std::vector<std::string> configs;
  bool json = false;
  auto* cmp_cmd = app.add_subcommand("compare", "Run several scenarios and tabulate their metrics");
  cmp_cmd->add_option("configs", configs, "Scenario YAML files")->required();
  cmp_cmd->add_flag("--json", json, "Machine-readable output");

  double kbar = 46.61;
  double kd = 1.0;
  double ux = 0.0;
  double uy = 0.0;
  int grid = 5;
  double half_width = 1.0;
  double duration = 5.0;
  std::string out;
  auto* pp_cmd = app.add_subcommand("portrait", "Phase portrait of the damped gyroscope in the non-spinning frame");
  pp_cmd->add_option("--kbar", kbar, "Gyroscopic frequency, rad/s");
  pp_cmd->add_option("--kd", kd, "Damping gain, 1/s")->check(CLI::NonNegativeNumber);
  pp_cmd->add_option("--ux", ux, "Constant torque, x");
  pp_cmd->add_option("--uy", uy, "Constant torque, y");
  pp_cmd->add_option("--grid", grid, "Initial conditions per axis")->check(CLI::PositiveNumber);
  pp_cmd->add_option("--half-width", half_width, "Half width of the initial-condition square, rad/s");
  pp_cmd->add_option("--duration", duration, "Seconds to integrate")->check(CLI::PositiveNumber);
  pp_cmd->add_option("--out", out, "CSV file for the trajectories");

  auto* lin_cmd = app.add_subcommand("linearize", "Spectra of the linearized closed loop at both equilibria");
  lin_cmd->add_option("config", config, "Scenario YAML file")->required();

  double kp = Gains{}.k_P;
  double kd_check = Gains{}.k_D;
  double tau = BodyParams{}.tau_m;
  auto* gc_cmd = app.add_subcommand("gains-check", "Check gains against every law's stability condition");
  gc_cmd->add_option("config", config, "Take gains and time constant from a scenario");
  gc_cmd->add_option("--kp", kp, "Proportional gain, 1/s");
  gc_cmd->add_option("--kd", kd_check, "Damping gain, 1/s");
  gc_cmd->add_option("--tau", tau, "Actuator time constant, s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(config, out_dir, formats);
    if (*cmp_cmd) return cmd_compare(configs, json);
    if (*pp_cmd) return cmd_portrait(kbar, kd, ux, uy, grid, half_width, duration, out);
    if (*lin_cmd) return cmd_linearize(config);
    if (*gc_cmd) return cmd_gains_check(config, kp, kd_check, tau);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const MismatchedScenarios& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NoConvergence& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SingularSystem& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
