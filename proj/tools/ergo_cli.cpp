// Command-line front end: spectral coverage planning, information collection
// replay, and the analytic two-state / two-post scenarios.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ergo/errors.hpp"
#include "ergo/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string opt_int(const std::optional<int>& v) {
  return v ? fmt::format("{}", *v) : std::string("-");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Coverage trajectories that match a target information density, plus a "
      "linear collection simulator to score them"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> order;
  std::optional<int> n_steps;
  app.add_option("--config", config_path, "JSON config file (see README)");
  app.add_option("--seed", seed, "Override the optimizer seed");
  app.add_option("--out", out_dir, "Override the output directory");
  app.add_option("--k", order, "Override the frequency cutoff");
  app.add_option("--n", n_steps, "Override the trajectory step count");

  auto* sweep = app.add_subcommand(
      "score-sweep",
      "Optimize to each configured score target, replay through the "
      "collection model, and tabulate score vs. information");
  auto* horizon = app.add_subcommand(
      "horizon",
      "Compare one full-horizon trajectory against two chained half-horizon "
      "trajectories on the bimodal density");

  auto* reconstruct = app.add_subcommand(
      "reconstruct",
      "Decompose a field and a trajectory at several cutoffs and record "
      "reconstruction L2 errors");
  std::string field_file, traj_file;
  std::vector<int> orders{5, 10, 20, 50};
  reconstruct->add_option("--field", field_file, "Density grid file")
      ->required();
  reconstruct->add_option("--traj", traj_file, "Trajectory CSV")->required();
  reconstruct->add_option("--orders", orders, "Cutoffs to evaluate");

  auto* residual = app.add_subcommand(
      "residual",
      "Treat the first part of a trajectory as executed and emit the residual "
      "target for the remainder");
  double split_fraction = 0.5;
  residual->add_option("--field", field_file, "Density grid file")->required();
  residual->add_option("--traj", traj_file, "Trajectory CSV")->required();
  residual->add_option("--split", split_fraction,
                       "Fraction of steps already executed, in (0, 1)");

  auto* scenarios = app.add_subcommand(
      "scenarios",
      "Closed-form two-state schedules and the two-post variance comparison");

  auto* optimize = app.add_subcommand(
      "optimize", "Single optimizer run on the configured density");

  auto* simulate = app.add_subcommand(
      "simulate", "Replay a trajectory file through the collection model");
  std::string grid_path;
  simulate->add_option("--traj", traj_file, "Trajectory CSV")->required();
  simulate->add_option("--grid", grid_path,
                       "Info grid file (default: discretize the configured "
                       "density)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    ergo::ExperimentConfig config;
    if (!config_path.empty()) config = ergo::load_config(config_path);
    if (seed) config.optimizer.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    if (order) config.order = *order;
    if (n_steps) config.n_steps = *n_steps;

    if (sweep->parsed()) {
      const auto result = ergo::cmd_score_sweep(config);
      fmt::print("{:<10} {:>12} {:>14} {:>9} {:>12}  {}\n", "method",
                 "target", "achieved", "info_pct", "effort", "status");
      for (const auto& row : result.rows) {
        fmt::print("{:<10} {:>12} {:>14.6g} {:>9.2f} {:>12.4g}  {}\n",
                   row.method,
                   row.score_target ? fmt::format("{:g}", *row.score_target)
                                    : std::string("-"),
                   row.achieved_score, row.info_pct, row.effort, row.status);
      }
      fmt::print("wrote {}\n", result.csv_path.string());
    } else if (horizon->parsed()) {
      const auto result = ergo::cmd_horizon(config);
      for (const auto& row : result.rows) {
        fmt::print(
            "{:<10} info={:.2f}% effort={:.4g} switches={} score={:.6g}\n",
            row.variant, row.info_pct, row.effort, row.switches,
            row.achieved_score);
      }
      fmt::print("wrote {}\n", result.csv_path.string());
    } else if (reconstruct->parsed()) {
      const auto result =
          ergo::cmd_reconstruct(config, field_file, traj_file, orders);
      for (const auto& row : result.rows) {
        fmt::print("k={:<4} field_l2={:.6g} traj_l2={:.6g}\n", row.order,
                   row.field_l2_error, row.traj_l2_error);
      }
      fmt::print("wrote {}\n", result.csv_path.string());
    } else if (residual->parsed()) {
      const auto result =
          ergo::cmd_residual(config, field_file, traj_file, split_fraction);
      fmt::print("residual integral = {:.12g}\n", result.residual_integral);
      fmt::print("oversampled cells = {}\n", result.oversampled_cells.size());
      fmt::print("wrote {}\nwrote {}\n", result.residual_grid_path.string(),
                 result.oversampled_csv_path.string());
    } else if (scenarios->parsed()) {
      const auto result = ergo::cmd_scenarios(config);
      for (std::size_t i = 0; i < result.two_state_rows.size(); ++i) {
        const auto& row = result.two_state_rows[i];
        fmt::print(
            "{:<16} collected={:.12g} switches={} completed_at={} "
            "zero_steps={} switch_cost={:g}\n",
            result.two_state_labels[i], row.collected, row.switches,
            opt_int(row.steps_to_complete), row.zero_collection_steps,
            row.switching_cost);
      }
      fmt::print(
          "two-post: all_left variance={:.6g}, proportional (n_left={}) "
          "variance={:.6g}\n",
          result.variance_all_left, result.allocation_ergodic,
          result.variance_ergodic);
      fmt::print("wrote {}\nwrote {}\n", result.two_state_csv_path.string(),
                 result.two_post_csv_path.string());
    } else if (optimize->parsed()) {
      const auto result = ergo::cmd_optimize(config);
      fmt::print(
          "score={:.6g} info={:.2f}% effort={:.4g} terminated_by={}\n",
          result.achieved_score, result.info_pct, result.effort,
          ergo::to_string(result.terminated_by));
      fmt::print("wrote {}\nwrote {}\nwrote {}\n",
                 result.trajectory_csv_path.string(),
                 result.report_csv_path.string(),
                 result.eid_grid_path.string());
    } else if (simulate->parsed()) {
      std::optional<std::filesystem::path> grid;
      if (!grid_path.empty()) grid = grid_path;
      const auto result = ergo::cmd_simulate(config, traj_file, grid);
      fmt::print("collected={:.12g} info={:.2f}%\n", result.collected,
                 result.info_pct);
      fmt::print("wrote {}\nwrote {}\n", result.per_step_csv_path.string(),
                 result.remaining_grid_path.string());
    }
    return kExitOk;
  } catch (const ergo::parse_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const ergo::numeric_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitNumeric;
  } catch (const ergo::domain_violation& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  }
}
