#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergo/ergodicity.hpp"
#include "ergo/infosim.hpp"
#include "ergo/spectral.hpp"
#include "ergo/trajectory.hpp"

namespace ergo {

struct OptimizerConfig {
  int order = 50;          // spatial frequency cutoff K
  int max_iters = 5000;
  std::optional<double> score_target;  // stop once the score reaches this
  double grad_tol = 1e-6;              // stop when |grad J|_2 falls below
  double control_penalty = 1e-2;       // gamma
  double barrier_weight = 1e3;
  double step_init = 1.0;
  double armijo_c = 1e-4;
  double backtrack_ratio = 0.5;
  std::uint64_t seed = 1;
  // Frequency-weight exponent; default (s+1)/2 when unset.
  std::optional<double> weight_exponent;

  void validate() const;  // throws std::invalid_argument
};

enum class Termination { score_target, grad_tol, max_iters };
const char* to_string(Termination t);

// Outcome of one descent run. score_history[i] is the best score seen
// through iterate i (a running minimum, hence non-increasing even though the
// penalized objective, not the raw score, is what each step decreases).
// trajectory is the best-scoring iterate encountered.
struct OptimizeReport {
  Trajectory trajectory;
  std::vector<double> score_history;      // length iterations + 1
  std::vector<double> objective_history;  // J at each accepted iterate
  std::vector<double> effort_history;
  int iterations;
  Termination terminated_by;
};

// Penalized planning objective over a candidate trajectory:
//
//   J = E(c(x), phi) + gamma * dt * sum_n |u_n|^2 + b * sum_n excess(x_n)^2
//
// where E is the spectral mismatch score, the middle term regularizes
// control effort, and excess() is the per-axis distance by which a state
// exits the domain (so the barrier is zero for feasible trajectories and
// grows quadratically outside). States outside the domain contribute nothing
// to c(x) -- the barrier is what pushes them back in.
double objective(const Trajectory& traj, const CoefficientSet& field_coeffs,
                 const OptimizerConfig& config);

// Analytic gradient of `objective` with respect to each control, using
// d x_n / d u_j = dt for j < n. Same shape as traj.controls().
std::vector<std::vector<double>> objective_grad(
    const Trajectory& traj, const CoefficientSet& field_coeffs,
    const OptimizerConfig& config);

// First-order descent with Armijo backtracking. Steps are taken on the
// trajectory's step states and projected back onto the dynamics by
// differencing into controls -- exact for the fully actuated single
// integrator, with the same fixed points as descending on the controls
// directly but far better conditioning (the raw control gradient threads
// every state gradient through the integrator's cumulative sum).
// Controls are initialized as a low-amplitude outward spiral from the start
// plus seeded Gaussian jitter (sigma = 0.02 state units), so runs are fully
// determined by (config, inputs, seed). Throws numeric_error (with the
// iteration index in the message) if the objective or gradient turns
// non-finite.
OptimizeReport optimize(std::span<const double> start, int n_steps, double dt,
                        const DensityField& phi, const OptimizerConfig& config);

// Information-greedy baseline: each step jumps to the center of the cell
// with the most information remaining (tie -> lowest flat cell index; if the
// current cell is the chosen one, the sensor stays where it is), then
// collects at the linear rate. Controls are unbounded, so this teleports.
Trajectory greedy_plan(const InfoGrid& info, std::span<const double> start,
                       int n_steps, double dt);

// Optimize consecutive segments of the given lengths against the same phi,
// each starting where the previous ended (segment i uses seed + i), and
// concatenate the results.
Trajectory composite_plan(std::span<const double> start,
                          const std::vector<int>& segment_steps, double dt,
                          const DensityField& phi,
                          const OptimizerConfig& config);

// --- Report CSV ---------------------------------------------------------------
//
//   iteration,score,objective,effort

void write_report_csv(const std::filesystem::path& path,
                      const OptimizeReport& report,
                      const std::string& comment = "");

}  // namespace ergo
