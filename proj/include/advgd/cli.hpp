#pragma once

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "advgd/config.hpp"
#include "advgd/experiment.hpp"
#include "advgd/io.hpp"
#include "advgd/plot.hpp"

// Command-line front end. Exit codes: 0 success, 1 failed check verdict,
// 2 invalid config/CSV or bad usage, 3 diverged simulation.

namespace advgd::cli {

namespace detail {

inline std::string num(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<std::string> out_dir;
};

inline void apply_overrides(ExperimentConfig& cfg, const Overrides& ov) {
  if (ov.seed) cfg.base_seed = *ov.seed;
  if (ov.replications) {
    if (*ov.replications < 1) throw ConfigError("--replications: must be at least 1");
    cfg.replications = *ov.replications;
  }
  if (ov.out_dir) {
    const std::filesystem::path dir = *ov.out_dir;
    cfg.outputs.csv = dir / cfg.outputs.csv.filename();
    cfg.outputs.summary = dir / cfg.outputs.summary.filename();
    if (cfg.outputs.plot) cfg.outputs.plot = dir / cfg.outputs.plot->filename();
  }
}

inline int cmd_run(const std::string& config_path, const Overrides& ov, std::ostream& out) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentConfig cfg = load_experiment_config(config_path);
  apply_overrides(cfg, ov);
  const ExperimentResult result = run_experiment(cfg);

  const std::string csv = experiment_csv(result, cfg.graph.n);
  io::write_file_atomic(cfg.outputs.csv, csv);
  io::write_file_atomic(cfg.outputs.summary, summary_json(cfg, result).dump(2) + "\n");
  if (cfg.outputs.plot)
    io::write_file_atomic(*cfg.outputs.plot, plot::render_from_csv(csv, cfg.name));

  const std::size_t rows =
      static_cast<std::size_t>(cfg.replications) * (static_cast<std::size_t>(cfg.iterations) + 1);
  double steady_sum = 0.0;
  for (const auto& rep : result.replications) steady_sum += rep.steady_state_error;

  out << cfg.name << ": wrote " << cfg.outputs.csv.string() << " (" << rows << " rows), "
      << cfg.outputs.summary.string();
  if (cfg.outputs.plot) out << ", " << cfg.outputs.plot->string();
  out << "\n";
  out << "step size admissible: " << (result.check.admissible ? "yes" : "no")
      << " (rho = " << num(contraction_factor(result.check.alpha, result.check.c2)) << ")\n";
  out << "replications: " << cfg.replications << ", mean steady-state avg_error = "
      << num(steady_sum / static_cast<double>(cfg.replications)) << "\n";
  const auto elapsed = std::chrono::duration<double, std::milli>(
      std::chrono::steady_clock::now() - started);
  out << "wall time: " << num(elapsed.count()) << " ms\n";
  return 0;
}

inline int cmd_sweep(const std::string& config_path, const std::vector<int>& counts,
                     const Overrides& ov, std::ostream& out) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentConfig cfg = load_experiment_config(config_path);
  apply_overrides(cfg, ov);
  const SweepResult sweep = run_sweep(cfg, counts);

  io::write_file_atomic(cfg.outputs.csv, sweep_csv(sweep));
  io::write_file_atomic(cfg.outputs.summary, sweep_summary_json(cfg, sweep).dump(2) + "\n");

  out << cfg.name << ": wrote " << cfg.outputs.csv.string() << ", "
      << cfg.outputs.summary.string() << "\n";
  for (const auto& point : sweep.points)
    out << "m = " << point.m
        << ": mean steady-state avg_error = " << num(point.mean_steady_state) << " over "
        << point.result.replications.size() << " replication(s)\n";
  out << "steady-state error strictly increasing in m: "
      << (sweep.monotone_increasing ? "yes" : "no") << "\n";
  const auto elapsed = std::chrono::duration<double, std::milli>(
      std::chrono::steady_clock::now() - started);
  out << "wall time: " << num(elapsed.count()) << " ms\n";
  return 0;
}

inline int cmd_check(const std::string& config_path, const Overrides& ov, std::ostream& out) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  apply_overrides(cfg, ov);
  const SimulationConfig sim = build_simulation(cfg, 0);
  const StepSizeCheck chk = step_size_check(cfg.alpha, sim.objective.mu(), sim.objective.lip());

  out << "alpha = " << num(chk.alpha) << ", mu = " << num(chk.mu) << ", L = " << num(chk.lip)
      << "\n";
  out << "c1 = " << num(chk.c1) << ", c2 = " << num(chk.c2)
      << ", rho = " << num(contraction_factor(chk.alpha, chk.c2)) << "\n";
  out << "upper test (alpha < c1): " << (chk.upper_ok ? "pass" : "fail") << "\n";
  const double lo = (chk.mu + chk.lip) / (4.0 * chk.mu * chk.lip);
  const double hi = (chk.mu + chk.lip) / (2.0 * chk.mu * chk.lip);
  out << "window test (" << num(lo) << " < alpha < " << num(hi)
      << "): " << (chk.window_ok ? "pass" : "fail") << "\n";
  out << "admissible: " << (chk.admissible ? "yes" : "no") << "\n";

  const auto verdict = initial_condition_verdict(sim, init_state(sim).X);
  if (!verdict)
    out << "initial condition: not applicable (no attack)\n";
  else
    out << "initial condition (replication 1): " << (*verdict ? "pass" : "fail") << "\n";

  const bool ok = chk.admissible && verdict.value_or(true);
  return ok ? 0 : 1;
}

inline int cmd_plot(const std::string& csv_path, const std::string& out_path, std::ostream& out) {
  const std::string csv = io::read_file(csv_path);
  const std::string title = std::filesystem::path(csv_path).stem().string();
  io::write_file_atomic(out_path, plot::render_from_csv(csv, title));
  out << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace detail

/// Parses and dispatches. Streams default to std::cout/std::cerr; tests pass
/// their own to run in-process.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Distributed gradient descent under additive adversarial perturbations"};
  app.require_subcommand(1);

  detail::Overrides ov;
  std::uint64_t seed_value = 0;
  int replications_value = 0;
  std::string out_dir_value;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed_value, "Override base_seed");
    cmd->add_option("--replications", replications_value, "Override replication count");
    cmd->add_option("--out-dir", out_dir_value, "Redirect output files into this directory");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "Execute an experiment config");
  run->add_option("config", config_path, "JSON experiment config")->required();
  add_common(run);

  std::string sweep_config;
  std::vector<int> counts;
  auto* sweep = app.add_subcommand("sweep", "Vary the adversary count over one config");
  sweep->add_option("config", sweep_config, "JSON experiment config")->required();
  sweep->add_option("--counts", counts, "Adversary counts, e.g. 2,5,9")
      ->required()
      ->delimiter(',');
  add_common(sweep);

  std::string check_config;
  auto* check = app.add_subcommand("check", "Report admissibility without simulating");
  check->add_option("config", check_config, "JSON experiment config")->required();
  add_common(check);

  std::string plot_csv, plot_out;
  auto* plot_cmd = app.add_subcommand("plot", "Render an SVG chart from a run CSV");
  plot_cmd->add_option("csv", plot_csv, "CSV produced by the run command")->required();
  plot_cmd->add_option("out", plot_out, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;  // help/version exit 0, usage errors are config errors
  }

  CLI::App* active = run->parsed() ? run : sweep->parsed() ? sweep : check->parsed() ? check
                                                                                     : plot_cmd;
  if (auto* o = active->get_option_no_throw("--seed"); o && o->count()) ov.seed = seed_value;
  if (auto* o = active->get_option_no_throw("--replications"); o && o->count())
    ov.replications = replications_value;
  if (auto* o = active->get_option_no_throw("--out-dir"); o && o->count())
    ov.out_dir = out_dir_value;

  try {
    if (run->parsed()) return detail::cmd_run(config_path, ov, out);
    if (sweep->parsed()) return detail::cmd_sweep(sweep_config, counts, ov, out);
    if (check->parsed()) return detail::cmd_check(check_config, ov, out);
    if (plot_cmd->parsed()) return detail::cmd_plot(plot_csv, plot_out, out);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;  // unreachable with require_subcommand(1)
}

}  // namespace advgd::cli
