#include "axidewet/config.hpp"
#include "axidewet/diagnostics.hpp"
#include "axidewet/evolution.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;
using namespace axidewet;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCheck = 4;

void report_error(const char* kind, const std::string& message) {
  std::cerr << "error kind=" << kind << " message=" << std::quoted(message) << '\n';
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return os;
}

void write_outputs(const fs::path& dir, const TrajectoryRecord& rec, const RunConfig& cfg) {
  fs::create_directories(dir / "snapshots");
  write_trajectory_csv((dir / "trajectory.csv").string(), rec.rows);
  {
    auto os = open_out(dir / "events.csv");
    write_events_csv(os, rec.events);
  }
  for (const auto& s : rec.snapshots)
    for (std::size_t f = 0; f < s.films.size(); ++f) {
      std::ostringstream name;
      name << "snap_" << std::setw(6) << std::setfill('0') << s.step << "_f" << f << ".csv";
      write_curve_csv((dir / "snapshots" / name.str()).string(), s.films[f]);
    }
  auto os = open_out(dir / "summary.txt");
  os.precision(17);
  const auto& last = rec.rows.back();
  double max_dv = 0.0;
  bool monotone = true;
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    max_dv = std::max(max_dv, std::abs(rec.rows[i].dV_rel));
    if (i > 0 && rec.rows[i].energy > rec.rows[i - 1].energy + 1e-12) monotone = false;
  }
  os << "method = " << to_string(cfg.method) << '\n'
     << "q = " << cfg.q << '\n'
     << "termination = " << to_string(rec.termination) << '\n'
     << "failure = " << rec.failure << '\n'
     << "steps = " << rec.rows.size() - 1 << '\n'
     << "t_final = " << last.t << '\n'
     << "films = " << rec.final_films.size() << '\n'
     << "volume = " << last.volume << '\n'
     << "dV_rel = " << last.dV_rel << '\n'
     << "max_abs_dV_rel = " << max_dv << '\n'
     << "energy = " << last.energy << '\n'
     << "energy_ratio = " << last.energy_ratio << '\n'
     << "energy_monotone = " << (monotone ? "true" : "false") << '\n'
     << "mesh_ratio = " << last.mesh_ratio << '\n'
     << "r_inner = " << last.r_inner << '\n'
     << "r_outer = " << last.r_outer << '\n'
     << "events = " << rec.events.size() << '\n';
  if (!rec.final_films.empty()) {
    os << "contact_angle_outer_deg = "
       << contact_angle(rec.final_films.back()) * 180.0 / std::numbers::pi << '\n';
  }
}

int cmd_run(const std::string& path, const std::string& out) {
  RunConfig cfg = load_config(path);
  if (!out.empty()) cfg.output_dir = out;
  const auto model = cfg.model();
  const auto spec = cfg.energy_spec(model);
  RunOptions opts;
  opts.T = cfg.T;
  opts.snapshot_every = cfg.snapshot_every;
  opts.events = cfg.events;
  const auto initial = make_initial_shape(cfg.shape, cfg.J);
  try {
    const auto rec = run(initial, model, spec, cfg.scheme(), opts);
    write_outputs(cfg.output_dir, rec, cfg);
    std::cout << "wrote " << cfg.output_dir << " (" << to_string(rec.termination) << ", "
              << rec.rows.size() - 1 << " steps)\n";
  } catch (const RunAborted& e) {
    write_outputs(cfg.output_dir, e.partial(), cfg);
    report_error("solver", e.what());
    return kExitSolver;
  }
  return 0;
}

int cmd_converge(const std::string& path, const std::string& out) {
  RunConfig cfg = load_config(path);
  if (!out.empty()) cfg.output_dir = out;
  ConvergenceScenario sc;
  sc.shape = cfg.shape;
  sc.model = cfg.model();
  sc.spec = cfg.energy_spec(sc.model);
  sc.scheme = cfg.scheme();
  sc.T = cfg.T;
  const auto ladder = make_ladder(cfg.J, cfg.dt, cfg.converge_levels);
  const auto rows = convergence_study(ladder, sc, cfg.converge_workers);
  fs::create_directories(cfg.output_dir);
  auto os = open_out(fs::path(cfg.output_dir) / "convergence.csv");
  write_convergence_csv(os, rows);
  write_convergence_csv(std::cout, rows);
  return 0;
}

int cmd_stabilizer(const std::string& path, int theta_grid, int hat_grid) {
  const RunConfig cfg = load_config(path);
  StabilizerOptions opts;
  opts.theta_grid_size = theta_grid;
  opts.hat_grid_size = hat_grid;
  const auto table = compute_min_stabilizer(cfg.model(), cfg.q, opts);
  write_stabilizer_csv(std::cout, table);
  return 0;
}

int cmd_check(const std::string& path, int grid) {
  const RunConfig cfg = load_config(path);
  const auto model = cfg.model();
  const auto adm = check_admissibility(model, cfg.q);
  std::cout << "anisotropy = " << model.describe() << "\nq = " << cfg.q
            << "\nadmissible = " << (adm.admissible ? "true" : "false") << '\n';
  if (!adm.admissible) return kExitCheck;
  const auto spec = cfg.energy_spec(model);
  const auto rep = verify_stability_inequality(spec, model, grid);
  std::cout.precision(17);
  std::cout << "stability = " << (rep.satisfied ? "true" : "false")
            << "\nworst_residual = " << rep.worst_residual << "\ntheta = " << rep.theta
            << "\ntheta_hat = " << rep.theta_hat << '\n';
  return rep.satisfied ? 0 : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axisymmetric solid-state dewetting with anisotropic surface energy"};
  app.require_subcommand(1);
  std::string config, out;
  int theta_grid = 720, hat_grid = 2048, check_grid = 512;

  auto* run_cmd = app.add_subcommand("run", "evolve a film and write trajectory and snapshots");
  run_cmd->add_option("config", config, "config file")->required();
  run_cmd->add_option("-o,--out", out, "output directory (overrides output.dir)");

  auto* conv_cmd = app.add_subcommand("converge", "run the (h, dt) -> (h/2, dt/4) ladder");
  conv_cmd->add_option("config", config, "config file")->required();
  conv_cmd->add_option("-o,--out", out, "output directory (overrides output.dir)");

  auto* stab_cmd = app.add_subcommand("stabilizer", "print the minimal stabilizer table");
  stab_cmd->add_option("config", config, "config file")->required();
  stab_cmd->add_option("--theta-grid", theta_grid, "theta grid size")->check(CLI::PositiveNumber);
  stab_cmd->add_option("--hat-grid", hat_grid, "theta-hat grid size")->check(CLI::PositiveNumber);

  auto* check_cmd = app.add_subcommand("check", "admissibility and stability inequality");
  check_cmd->add_option("config", config, "config file")->required();
  check_cmd->add_option("--grid", check_grid, "angle grid size")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(config, out);
    if (*conv_cmd) return cmd_converge(config, out);
    if (*stab_cmd) return cmd_stabilizer(config, theta_grid, hat_grid);
    if (*check_cmd) return cmd_check(config, check_grid);
  } catch (const ConfigError& e) {
    report_error("config", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    report_error("config", e.what());
    return kExitConfig;
  } catch (const SolverError& e) {
    report_error("solver", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    report_error("solver", e.what());
    return kExitSolver;
  }
  return 0;
}
