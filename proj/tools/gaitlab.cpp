// gaitlab: batch CLI for gait prescription, geometric-mechanics evaluation,
// phase optimization, stability surfaces, and gait-parameter estimation.
//
// Conventions shared by every subcommand:
//   - angles are degrees in all user-facing files (CSV/JSON), radians inside;
//   - every output file is written atomically (temp file + rename);
//   - a manifest.json in the output directory records the config hash and an
//     FNV-1a checksum of every emitted file;
//   - outputs are byte-identical across runs and across GAITLAB_WORKERS.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gaitlab/analysis.hpp"
#include "gaitlab/contact_mechanics.hpp"
#include "gaitlab/gait.hpp"
#include "gaitlab/geomech.hpp"
#include "gaitlab/io.hpp"
#include "gaitlab/morphology.hpp"
#include "gaitlab/simulate.hpp"
#include "gaitlab/stability.hpp"
#include "gaitlab/svg.hpp"
#include "gaitlab/sweep.hpp"

namespace {

constexpr const char* kToolVersion = "1.0.0";

using gaitlab::format_number;
using gaitlab::json;

/// Collects output files and flushes them atomically together with a
/// manifest listing the config hash and a checksum per file.
class Emitter {
 public:
  Emitter(std::filesystem::path dir, json config) : dir_(std::move(dir)), config_(std::move(config)) {}

  void add(const std::string& name, const std::string& contents) { files_[name] = contents; }
  void add_failure(const std::string& what) { failures_.push_back(what); }

  void flush() {
    json manifest;
    manifest["tool"] = "gaitlab";
    manifest["version"] = kToolVersion;
    manifest["format_version"] = 1;
    manifest["config"] = config_;
    manifest["config_hash"] = gaitlab::fnv1a_hex(config_.dump());
    json outputs = json::object();
    for (const auto& [name, contents] : files_) {
      gaitlab::atomic_write(dir_ / name, contents);
      outputs[name] = gaitlab::fnv1a_hex(contents);
    }
    manifest["outputs"] = outputs;
    manifest["failures"] = failures_;
    gaitlab::atomic_write(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  json config_;
  std::map<std::string, std::string> files_;  // sorted => deterministic order
  std::vector<std::string> failures_;
};

/// Parse a start:step:stop grid specification, endpoints inclusive.
std::vector<double> parse_grid(const std::string& s) {
  double start = 0.0, step = 0.0, stop = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' || step <= 0.0)
    throw gaitlab::ConfigError("grid '" + s + "': expected start:step:stop with step > 0");
  std::vector<double> grid;
  for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
  if (grid.empty()) throw gaitlab::ConfigError("grid '" + s + "': empty grid");
  return grid;
}

struct GaitArgs {
  std::string robot;
  double duty = 0.5;
  double phaselag = 0.5;
  double phi0_deg = 0.0;
  std::string out = "out";
};

void add_gait_options(CLI::App* cmd, GaitArgs& a, bool with_phi0 = true) {
  cmd->add_option("--robot", a.robot, "reference robot name or robot spec JSON file")->required();
  cmd->add_option("--duty", a.duty, "duty factor D in (0, 1]");
  cmd->add_option("--phaselag", a.phaselag, "lateral phase lag in [0, 1)");
  if (with_phi0) cmd->add_option("--phi0", a.phi0_deg, "body-leg phase offset (degrees)");
  cmd->add_option("--out", a.out, "output directory");
}

json gait_config(const std::string& sub, const GaitArgs& a) {
  return {{"subcommand", sub},
          {"robot", a.robot},
          {"duty", a.duty},
          {"phaselag", a.phaselag},
          {"phi0_deg", a.phi0_deg}};
}

std::string trajectory_csv(const gaitlab::Trajectory& traj) {
  gaitlab::CsvWriter csv({"phase_deg", "x_bl", "y_bl", "heading_deg"});
  for (const auto& s : traj.samples)
    csv.row({format_number(gaitlab::rad2deg(s.t)), format_number(s.pose.x),
             format_number(s.pose.y), format_number(gaitlab::rad2deg(s.pose.heading))});
  return csv.str();
}

json trajectory_summary(const gaitlab::Trajectory& traj, const gaitlab::GaitParams& g) {
  json j;
  j["per_cycle"] = {{"dx_bl", traj.per_cycle.x},
                    {"dy_bl", traj.per_cycle.y},
                    {"dtheta_deg", gaitlab::rad2deg(traj.per_cycle.heading)}};
  j["blc"] = gaitlab::speed_blc(traj);
  j["phi0_deg"] = gaitlab::rad2deg(g.phi_0);
  j["duty"] = g.duty_factor;
  j["phaselag"] = g.lateral_phase_lag;
  j["no_support_pieces"] = traj.no_support_phases.size();
  return j;
}

int run_prescribe(const GaitArgs& a, int samples) {
  const gaitlab::RobotSpec spec = gaitlab::load_robot(a.robot);
  const gaitlab::GaitParams g =
      gaitlab::GaitParams::for_robot(spec, a.duty, a.phaselag, gaitlab::UndulationMode::coordinated,
                                     gaitlab::deg2rad(a.phi0_deg));

  std::vector<std::string> labels;
  std::vector<std::vector<int>> rows;
  if (spec.mode == gaitlab::MorphologyMode::legged) {
    for (int i = 0; i < spec.n_leg_pairs; ++i)
      for (gaitlab::Side side : {gaitlab::Side::left, gaitlab::Side::right}) {
        labels.push_back((side == gaitlab::Side::left ? "L" : "R") + std::to_string(i + 1));
        std::vector<int> row(static_cast<std::size_t>(samples));
        for (int k = 0; k < samples; ++k)
          row[static_cast<std::size_t>(k)] =
              gaitlab::contact_state(g, spec.n_leg_pairs, k * gaitlab::kTwoPi / samples, i, side);
        rows.push_back(std::move(row));
      }
  } else {
    for (int i = 0; i < spec.n_links(); ++i) {
      labels.push_back("seg" + std::to_string(i + 1));
      std::vector<int> row(static_cast<std::size_t>(samples));
      for (int k = 0; k < samples; ++k)
        row[static_cast<std::size_t>(k)] =
            gaitlab::sidewinder_contact(g, spec.n_links(), k * gaitlab::kTwoPi / samples, i);
      rows.push_back(std::move(row));
    }
  }

  std::vector<std::string> header{"leg"};
  for (int k = 0; k < samples; ++k)
    header.push_back("phase_" + format_number(360.0 * k / samples) + "_deg");
  gaitlab::CsvWriter csv(header);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::string> fields{labels[r]};
    for (int v : rows[r]) fields.push_back(std::to_string(v));
    csv.row(fields);
  }

  json cfg = gait_config("prescribe", a);
  cfg["samples"] = samples;
  Emitter out(a.out, cfg);
  out.add("contacts.csv", csv.str());
  out.add("gait_diagram.svg", gaitlab::svg_gait_diagram(labels, rows));
  out.flush();
  return 0;
}

int run_connection(const GaitArgs& a, int resolution) {
  const gaitlab::RobotSpec spec = gaitlab::load_robot(a.robot);
  const gaitlab::GaitParams g = gaitlab::GaitParams::for_robot(
      spec, a.duty, a.phaselag, gaitlab::UndulationMode::coordinated);

  gaitlab::CsvWriter csv(
      {"phi_c_deg", "phi_b_deg", "a11", "a12", "a21", "a22", "a31", "a32"});
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const gaitlab::ShapePoint p{(i + 0.5) * gaitlab::kTwoPi / resolution,
                                  (j + 0.5) * gaitlab::kTwoPi / resolution};
      std::array<std::array<double, 2>, 3> entries{};
      try {
        const gaitlab::LocalConnection conn = gaitlab::local_connection_at(spec, g, p);
        entries = conn.a;
      } catch (const gaitlab::NoSupportError&) {
        // zero body velocity at unsupported shapes
      }
      csv.row({format_number(gaitlab::rad2deg(p.phi_c)), format_number(gaitlab::rad2deg(p.phi_b)),
               format_number(entries[0][0]), format_number(entries[0][1]),
               format_number(entries[1][0]), format_number(entries[1][1]),
               format_number(entries[2][0]), format_number(entries[2][1])});
    }
  }

  json cfg = gait_config("connection", a);
  cfg["resolution"] = resolution;
  Emitter out(a.out, cfg);
  out.add("connection.csv", csv.str());
  out.flush();
  return 0;
}

int run_heightfield(const GaitArgs& a, int resolution) {
  const gaitlab::RobotSpec spec = gaitlab::load_robot(a.robot);
  const gaitlab::GaitParams g =
      gaitlab::GaitParams::for_robot(spec, a.duty, a.phaselag, gaitlab::UndulationMode::coordinated,
                                     gaitlab::deg2rad(a.phi0_deg));
  const gaitlab::HeightField field = gaitlab::compute_height_field(spec, g, resolution);
  const gaitlab::GaitPath path{g.phi_0};
  const std::array<double, 3> stokes = gaitlab::stokes_displacement(field, path);

  gaitlab::CsvWriter csv({"phi_c_deg", "phi_b_deg", "curl_x", "curl_y", "curl_theta"});
  std::vector<double> coords;
  for (int k = 0; k < resolution; ++k) coords.push_back(field.phi_at(k));
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i * resolution + j);
      csv.row({format_number(gaitlab::rad2deg(field.phi_at(i))),
               format_number(gaitlab::rad2deg(field.phi_at(j))),
               format_number(field.curl[0][idx]), format_number(field.curl[1][idx]),
               format_number(field.curl[2][idx])});
    }

  json cfg = gait_config("heightfield", a);
  cfg["resolution"] = resolution;
  Emitter out(a.out, cfg);
  out.add("heightfield.csv", csv.str());
  const std::array<const char*, 3> names{"x", "y", "theta"};
  for (int c = 0; c < 3; ++c)
    out.add(std::string("heightfield_") + names[static_cast<std::size_t>(c)] + ".svg",
            gaitlab::svg_heatmap(
                std::string("height function ") + names[static_cast<std::size_t>(c)] +
                    " (phi_c right, phi_b up; magenta: gait path phi_b = phi_c + phi_0)",
                coords, coords, field.curl[static_cast<std::size_t>(c)], g.phi_0));
  json summary;
  summary["stokes"] = {{"dx_bl", stokes[0]}, {"dy_bl", stokes[1]},
                       {"dtheta_deg", gaitlab::rad2deg(stokes[2])}};
  summary["phi0_deg"] = a.phi0_deg;
  out.add("stokes.json", summary.dump(2) + "\n");
  out.flush();
  return 0;
}

int run_simulate(const GaitArgs& a, bool optimize, bool fixed_straight, int cycles, int steps) {
  const gaitlab::RobotSpec spec = gaitlab::load_robot(a.robot);
  gaitlab::GaitParams g = gaitlab::GaitParams::for_robot(
      spec, a.duty, a.phaselag,
      fixed_straight ? gaitlab::UndulationMode::fixed_straight
                     : gaitlab::UndulationMode::coordinated,
      gaitlab::deg2rad(a.phi0_deg));
  if (optimize) {
    const gaitlab::PhaseOptimum opt = gaitlab::optimize_phase_offset(spec, g, steps);
    g.phi_0 = opt.phi_0;
  }
  const gaitlab::Trajectory traj = gaitlab::integrate_gait(spec, g, cycles, steps);
  if (traj.failed) throw gaitlab::SolverError(traj.failure_message);

  json cfg = gait_config("simulate", a);
  cfg["optimize"] = optimize;
  cfg["fixed_straight"] = fixed_straight;
  cfg["cycles"] = cycles;
  cfg["steps"] = steps;
  Emitter out(a.out, cfg);
  out.add("trajectory.csv", trajectory_csv(traj));
  out.add("summary.json", trajectory_summary(traj, g).dump(2) + "\n");
  out.flush();
  return 0;
}

int run_optimize(const GaitArgs& a, int steps) {
  const gaitlab::RobotSpec spec = gaitlab::load_robot(a.robot);
  const gaitlab::GaitParams g = gaitlab::GaitParams::for_robot(
      spec, a.duty, a.phaselag, gaitlab::UndulationMode::coordinated);
  const gaitlab::PhaseOptimum opt = gaitlab::optimize_phase_offset(spec, g, steps);

  json cfg = gait_config("optimize", a);
  cfg["steps"] = steps;
  Emitter out(a.out, cfg);
  json j;
  j["phi0_opt_deg"] = gaitlab::rad2deg(opt.phi_0);
  j["blc"] = opt.displacement;
  j["phi_bc_predicted_deg"] =
      gaitlab::rad2deg(gaitlab::phase_relation_prediction(a.phaselag));
  out.add("optimum.json", j.dump(2) + "\n");
  out.flush();
  return 0;
}

int run_stability(const GaitArgs& a, int samples) {
  const gaitlab::RobotSpec spec = gaitlab::load_robot(a.robot);
  const gaitlab::GaitParams g =
      gaitlab::GaitParams::for_robot(spec, a.duty, a.phaselag,
                                     spec.mode == gaitlab::MorphologyMode::sidewinder
                                         ? gaitlab::UndulationMode::coordinated
                                         : gaitlab::UndulationMode::fixed_straight,
                                     gaitlab::deg2rad(a.phi0_deg));

  gaitlab::CsvWriter csv({"phase_deg", "class"});
  for (int k = 0; k < samples; ++k) {
    const double phi_c = (k + 0.5) * gaitlab::kTwoPi / samples;
    gaitlab::StabilityClass cls;
    if (spec.mode == gaitlab::MorphologyMode::legged) {
      const gaitlab::Configuration c = gaitlab::configuration_at(spec, g, {phi_c, 0.0});
      cls = gaitlab::classify(spec, gaitlab::forward_kinematics(spec, c));
    } else {
      const gaitlab::Configuration c = gaitlab::configuration_at(spec, g, {phi_c, phi_c + g.phi_0});
      cls = gaitlab::classify(spec, gaitlab::detail::poses_with_sidewinder_contacts(spec, c));
    }
    const char* label = cls == gaitlab::StabilityClass::statically_stable ? "statically_stable"
                        : cls == gaitlab::StabilityClass::statically_unstable
                            ? "statically_unstable"
                            : "unstable";
    csv.row({format_number(gaitlab::rad2deg(phi_c)), label});
  }
  const double metric = gaitlab::stability_metric(spec, g, samples);

  json cfg = gait_config("stability", a);
  cfg["samples"] = samples;
  Emitter out(a.out, cfg);
  out.add("stability.csv", csv.str());
  json j;
  j["metric"] = metric;
  out.add("stability.json", j.dump(2) + "\n");
  out.flush();
  return 0;
}

int run_sweep(const std::string& robot, const std::string& d_spec, const std::string& p_spec,
              const std::string& mode_str, int steps, int samples, const std::string& out_dir) {
  const gaitlab::RobotSpec spec = gaitlab::load_robot(robot);
  const std::vector<double> duty_grid = parse_grid(d_spec);
  const std::vector<double> phase_grid = parse_grid(p_spec);

  gaitlab::SweepOptions opts;
  opts.steps_per_cycle = steps;
  opts.stability_samples = samples;
  if (mode_str == "fixed")
    opts.mode = gaitlab::SweepMode::fixed_straight;
  else if (mode_str == "coordinated")
    opts.mode = gaitlab::SweepMode::coordinated;
  else if (mode_str == "both")
    opts.mode = gaitlab::SweepMode::both;
  else
    throw gaitlab::ConfigError("--mode: must be fixed, coordinated, or both");

  const gaitlab::SweepResult result = gaitlab::sweep(spec, duty_grid, phase_grid, opts);

  json cfg = {{"subcommand", "sweep"}, {"robot", robot},   {"D", d_spec},
              {"philat", p_spec},      {"mode", mode_str}, {"steps", steps},
              {"samples", samples}};
  Emitter out(out_dir, cfg);

  auto surface_csv = [&](const char* value_col, auto getter, bool with_phi0) {
    std::vector<std::string> header{"duty_factor", "lateral_phase_lag", value_col};
    if (with_phi0) header.push_back("phi0_opt_deg");
    gaitlab::CsvWriter csv(header);
    for (std::size_t di = 0; di < duty_grid.size(); ++di)
      for (std::size_t pi = 0; pi < phase_grid.size(); ++pi) {
        const gaitlab::SweepCell& cell = result.at(di, pi);
        std::vector<std::string> row{format_number(cell.duty_factor),
                                     format_number(cell.lateral_phase_lag),
                                     cell.failed ? "" : format_number(getter(cell))};
        if (with_phi0)
          row.push_back(cell.failed ? "" : format_number(gaitlab::rad2deg(cell.phi0_opt)));
        csv.row(row);
      }
    return csv.str();
  };
  auto surface_svg = [&](const std::string& title, auto getter, bool white_zero) {
    std::vector<double> values(result.cells.size(), 0.0);
    for (std::size_t di = 0; di < duty_grid.size(); ++di)
      for (std::size_t pi = 0; pi < phase_grid.size(); ++pi)
        values[di * phase_grid.size() + pi] =
            result.at(di, pi).failed ? 0.0 : getter(result.at(di, pi));
    // x axis = duty factor, y axis = lateral phase lag
    return gaitlab::svg_heatmap(title + " (duty right, phase lag up)", duty_grid, phase_grid,
                                values, std::nullopt, white_zero);
  };

  auto stab = [](const gaitlab::SweepCell& c) { return c.stability; };
  auto fixed = [](const gaitlab::SweepCell& c) { return c.blc_fixed; };
  auto coord = [](const gaitlab::SweepCell& c) { return c.blc_coordinated; };

  out.add("sweep_stability.csv", surface_csv("stability", stab, false));
  out.add("sweep_stability.svg", surface_svg("static stability fraction", stab, true));
  if (opts.mode != gaitlab::SweepMode::coordinated) {
    out.add("sweep_blc_fixed.csv", surface_csv("blc_fixed", fixed, false));
    out.add("sweep_blc_fixed.svg", surface_svg("speed, fixed straight back (BL/cycle)", fixed, false));
  }
  if (opts.mode != gaitlab::SweepMode::fixed_straight) {
    out.add("sweep_blc_coordinated.csv", surface_csv("blc_coordinated", coord, true));
    out.add("sweep_blc_coordinated.svg",
            surface_svg("speed, optimized coordination (BL/cycle)", coord, false));
  }
  for (const gaitlab::SweepCell& cell : result.cells)
    if (cell.failed)
      out.add_failure("cell D=" + format_number(cell.duty_factor) +
                      " philat=" + format_number(cell.lateral_phase_lag) + ": " + cell.error);
  out.flush();
  return 0;
}

/// Input schema for `estimate`: header row with a time_s column plus angle
/// columns named leg_left_<pair>_deg, leg_right_<pair>_deg (pair 0-based,
/// head first) and body_<joint>_deg; all angles in degrees.
gaitlab::TrajectoryDataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gaitlab::ConfigError(path + ": cannot open input CSV");
  std::string line;
  if (!std::getline(in, line)) throw gaitlab::ConfigError(path + ": empty CSV");
  auto split = [](std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    std::vector<std::string> fields;
    std::istringstream ss(s);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
  };
  const std::vector<std::string> header = split(line);

  gaitlab::TrajectoryDataset data;
  int time_col = -1;
  std::vector<std::pair<int, int>> leg_cols;   // column -> leg index
  std::vector<std::pair<int, int>> body_cols;  // column -> joint index
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    int pair = 0, joint = 0;
    if (name == "time_s") {
      time_col = static_cast<int>(c);
    } else if (std::sscanf(name.c_str(), "leg_left_%d_deg", &pair) == 1) {
      leg_cols.emplace_back(static_cast<int>(c), static_cast<int>(data.legs.size()));
      data.legs.push_back({gaitlab::Side::left, pair, {}});
    } else if (std::sscanf(name.c_str(), "leg_right_%d_deg", &pair) == 1) {
      leg_cols.emplace_back(static_cast<int>(c), static_cast<int>(data.legs.size()));
      data.legs.push_back({gaitlab::Side::right, pair, {}});
    } else if (std::sscanf(name.c_str(), "body_%d_deg", &joint) == 1) {
      body_cols.emplace_back(static_cast<int>(c), static_cast<int>(data.body_joints.size()));
      data.body_joints.emplace_back();
    } else {
      throw gaitlab::ConfigError(path + ": unknown column '" + name + "'");
    }
  }
  if (time_col < 0) throw gaitlab::ConfigError(path + ": missing time_s column");

  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size())
      throw gaitlab::ConfigError(path + ": row width mismatch");
    data.time.push_back(std::stod(fields[static_cast<std::size_t>(time_col)]));
    for (const auto& [col, leg] : leg_cols)
      data.legs[static_cast<std::size_t>(leg)].values.push_back(
          gaitlab::deg2rad(std::stod(fields[static_cast<std::size_t>(col)])));
    for (const auto& [col, joint] : body_cols)
      data.body_joints[static_cast<std::size_t>(joint)].push_back(
          gaitlab::deg2rad(std::stod(fields[static_cast<std::size_t>(col)])));
  }
  return data;
}

int run_estimate(const std::string& input, const std::string& out_dir) {
  const gaitlab::TrajectoryDataset data = read_dataset_csv(input);
  const gaitlab::GaitEstimate est = gaitlab::estimate_gait(data);

  std::ifstream raw(input, std::ios::binary);
  std::ostringstream raw_contents;
  raw_contents << raw.rdbuf();
  json cfg = {{"subcommand", "estimate"},
              {"input", input},
              {"input_hash", gaitlab::fnv1a_hex(raw_contents.str())}};
  Emitter out(out_dir, cfg);
  json j;
  j["duty_factor"] = est.duty_factor;
  j["lateral_phase_lag"] = est.lateral_phase_lag;
  j["amplitude_theta_deg"] = gaitlab::rad2deg(est.amplitude_theta);
  j["period_s"] = est.period;
  j["phi_bc_deg"] = gaitlab::rad2deg(est.phi_bc);
  json legs = json::array();
  for (std::size_t i = 0; i < est.leg_phases.size(); ++i)
    legs.push_back({{"phase_deg", gaitlab::rad2deg(est.leg_phases[i])},
                    {"residual_deg", gaitlab::rad2deg(est.residuals[i])}});
  j["legs"] = legs;
  out.add("estimate.json", j.dump(2) + "\n");
  out.flush();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gait prescription, geometric-mechanics evaluation, and estimation"};
  app.require_subcommand(1);

  GaitArgs pre, conn, hf, sim, opt, stab;
  int pre_samples = 360, conn_res = 32, hf_res = 128;
  int sim_cycles = 1, sim_steps = 256, opt_steps = 128, stab_samples = 720;
  bool sim_optimize = false, sim_fixed = false;

  CLI::App* c_pre = app.add_subcommand("prescribe", "emit contact diagram CSV + SVG");
  add_gait_options(c_pre, pre, false);
  c_pre->add_option("--samples", pre_samples, "phase samples per cycle")->check(CLI::Range(8, 7200));

  CLI::App* c_conn = app.add_subcommand("connection", "dump sampled local connection entries");
  add_gait_options(c_conn, conn, false);
  c_conn->add_option("--resolution", conn_res, "grid resolution per axis")->check(CLI::Range(4, 512));

  CLI::App* c_hf = app.add_subcommand("heightfield", "emit height functions CSV + heatmaps");
  add_gait_options(c_hf, hf);
  c_hf->add_option("--resolution", hf_res, "grid resolution per axis")->check(CLI::Range(32, 1024));

  CLI::App* c_sim = app.add_subcommand("simulate", "integrate a gait and emit the trajectory");
  add_gait_options(c_sim, sim);
  c_sim->add_flag("--optimize", sim_optimize, "optimize phi0 before integrating");
  c_sim->add_flag("--fixed-straight", sim_fixed, "hold the backbone straight");
  c_sim->add_option("--cycles", sim_cycles, "number of gait cycles")->check(CLI::Range(1, 1000));
  c_sim->add_option("--steps", sim_steps, "integration steps per cycle")->check(CLI::Range(64, 65536));

  CLI::App* c_opt = app.add_subcommand("optimize", "optimize the body-leg phase offset");
  add_gait_options(c_opt, opt, false);
  c_opt->add_option("--steps", opt_steps, "integration steps per cycle")->check(CLI::Range(64, 65536));

  CLI::App* c_stab = app.add_subcommand("stability", "per-phase stability classes and metric");
  add_gait_options(c_stab, stab);
  c_stab->add_option("--samples", stab_samples, "phase samples per cycle")->check(CLI::Range(360, 14400));

  std::string sw_robot, sw_d = "0.3:0.05:0.9", sw_p = "0:0.05:0.95", sw_mode = "both";
  std::string sw_out = "out";
  int sw_steps = 128, sw_samples = 720;
  CLI::App* c_sw = app.add_subcommand("sweep", "speed/stability surfaces over the gait space");
  c_sw->add_option("--robot", sw_robot, "reference robot name or spec JSON file")->required();
  c_sw->add_option("--D", sw_d, "duty factor grid start:step:stop");
  c_sw->add_option("--philat", sw_p, "phase lag grid start:step:stop");
  c_sw->add_option("--mode", sw_mode, "fixed | coordinated | both");
  c_sw->add_option("--steps", sw_steps, "integration steps per cycle")->check(CLI::Range(64, 65536));
  c_sw->add_option("--samples", sw_samples, "stability samples per cycle")->check(CLI::Range(360, 14400));
  c_sw->add_option("--out", sw_out, "output directory");

  std::string est_input, est_out = "out";
  CLI::App* c_est = app.add_subcommand("estimate", "estimate gait parameters from joint series");
  c_est->add_option("--input", est_input, "input CSV (time_s + angle columns)")->required();
  c_est->add_option("--out", est_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_pre->parsed()) return run_prescribe(pre, pre_samples);
    if (c_conn->parsed()) return run_connection(conn, conn_res);
    if (c_hf->parsed()) return run_heightfield(hf, hf_res);
    if (c_sim->parsed()) return run_simulate(sim, sim_optimize, sim_fixed, sim_cycles, sim_steps);
    if (c_opt->parsed()) return run_optimize(opt, opt_steps);
    if (c_stab->parsed()) return run_stability(stab, stab_samples);
    if (c_sw->parsed()) return run_sweep(sw_robot, sw_d, sw_p, sw_mode, sw_steps, sw_samples, sw_out);
    if (c_est->parsed()) return run_estimate(est_input, est_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
