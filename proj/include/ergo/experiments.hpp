#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ergo/infosim.hpp"
#include "ergo/planner.hpp"
#include "ergo/scenarios.hpp"

namespace ergo {

// Published single-query planner reference point (score, info %) from the
// external comparison baseline; emitted in sweep output as a constant row
// labeled external, never recomputed.
inline constexpr double kExternalPlannerScore = 0.02295;
inline constexpr double kExternalPlannerInfoPct = 72.19;

// Full experiment parameterization. Every field has a default; a JSON config
// file (see README for the schema) overrides individual fields, and the CLI
// flags --seed/--k/--n/--out override the file.
struct ExperimentConfig {
  std::vector<double> domain_lower{0.0, 0.0};
  std::vector<double> domain_upper{1.0, 1.0};

  // Mixture for the expected information density. Empty => per-command
  // default: single Gaussian mean (0.65, 0.65) sigma 0.08 for sweeps,
  // plus a second equal-weight mode at (0.25, 0.7) for horizon runs.
  std::vector<GaussianComponent> eid_components;

  std::vector<int> grid_resolution{10, 10};   // information grid
  std::vector<int> field_resolution{100, 100};  // EID evaluation grid
  double rate = 0.01;                         // collected per step (1/N)

  int order = 50;     // frequency cutoff K
  int n_steps = 100;  // N
  double dt = 0.5;
  std::vector<double> start{0.25, 0.35};

  OptimizerConfig optimizer{};
  std::vector<double> score_targets{8e-2, 2.6e-2, 6e-3, 2.4e-3, 5.5e-4,
                                    3.7e-4};

  TwoStateSpec two_state{0.8, 0.2, 0.1, 1.0, Side::left};
  TwoPostSpec two_post{1.0, 2.0, 10};

  std::filesystem::path output_dir = "out";

  void validate() const;

  Domain domain() const;
  EidSpec eid(bool bimodal_default) const;
  // FNV-1a hash of the canonical serialized form; stamped into CSV output so
  // results can be traced back to their exact parameterization.
  std::uint64_t hash() const;
  std::string canonical_string() const;
};

// Parse overrides from a JSON file into `base`. Unknown keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const ExperimentConfig& base = {});

// One row of the score-sweep table.
struct SweepRow {
  std::string method;  // "pto", "greedy", or "external"
  std::optional<double> score_target;
  double achieved_score;
  double info_pct;  // percent of total EID mass
  double effort;
  std::string status;  // "ok" or an error note; failures don't stop the sweep
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::filesystem::path csv_path;
};

// For each score target, run the optimizer until the score crosses it, then
// replay the trajectory through the collection model. Appends the greedy
// baseline and the constant external reference row. Writes score_sweep.csv
// plus per-target trajectory/report files into the output dir.
SweepResult cmd_score_sweep(const ExperimentConfig& config);

struct HorizonRow {
  std::string variant;  // "single" or "composite"
  double info_pct;
  double effort;
  int switches;  // segment junctions: 0 for single, 1 for composite
  double achieved_score;
};

struct HorizonResult {
  std::vector<HorizonRow> rows;
  std::filesystem::path csv_path;
};

// One n_steps trajectory versus two chained n_steps/2 trajectories (each
// re-optimized against the same EID from where the last ended). n_steps must
// be even. Writes horizon.csv and the two trajectory files.
HorizonResult cmd_horizon(const ExperimentConfig& config);

struct ReconstructRow {
  int order;
  double field_l2_error;  // reconstruction vs the original field
  double traj_l2_error;   // reconstruction vs the trajectory's histogram
};

struct ReconstructResult {
  std::vector<ReconstructRow> rows;
  std::filesystem::path csv_path;
};

// Decompose the field and the trajectory at each order in `orders`,
// reconstruct both on the field's grid, and record L2 errors. Writes the
// reconstructions as grid files plus reconstruct_errors.csv.
ReconstructResult cmd_reconstruct(const ExperimentConfig& config,
                                  const std::filesystem::path& field_file,
                                  const std::filesystem::path& traj_file,
                                  const std::vector<int>& orders);

struct ResidualResult {
  std::filesystem::path residual_grid_path;
  std::filesystem::path oversampled_csv_path;
  std::vector<std::size_t> oversampled_cells;
  double residual_integral;
};

// Split the trajectory at `split_fraction` of its steps, treat the first
// part as executed, and emit the residual target for the remainder plus the
// list of oversampled cells.
ResidualResult cmd_residual(const ExperimentConfig& config,
                            const std::filesystem::path& field_file,
                            const std::filesystem::path& traj_file,
                            double split_fraction);

struct ScenarioResult {
  std::vector<TwoStateResult> two_state_rows;  // repeated(5)@10, N=10, N=20
  std::vector<std::string> two_state_labels;
  double variance_all_left;
  double variance_ergodic;
  int allocation_ergodic;
  std::filesystem::path two_state_csv_path;
  std::filesystem::path two_post_csv_path;
};

// Run the closed-form two-state schedules and the two-post variance
// comparison; writes two_state.csv and two_post.csv. Pure arithmetic, so
// output is byte-identical across runs with the same config.
ScenarioResult cmd_scenarios(const ExperimentConfig& config);

struct OptimizeCmdResult {
  std::filesystem::path trajectory_csv_path;
  std::filesystem::path report_csv_path;
  std::filesystem::path eid_grid_path;
  double achieved_score;
  double info_pct;
  double effort;
  Termination terminated_by;
};

// Single optimizer run on the configured EID; writes trajectory.csv,
// report.csv, and eid.grid.
OptimizeCmdResult cmd_optimize(const ExperimentConfig& config);

struct SimulateCmdResult {
  std::filesystem::path per_step_csv_path;
  std::filesystem::path remaining_grid_path;
  double collected;
  double info_pct;
};

// Replay a trajectory file through the collection model. The grid comes
// from `grid_file` when given, otherwise it is discretized from the
// configured EID.
SimulateCmdResult cmd_simulate(const ExperimentConfig& config,
                               const std::filesystem::path& traj_file,
                               const std::optional<std::filesystem::path>&
                                   grid_file = {});

}  // namespace ergo
