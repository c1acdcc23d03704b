#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ergo/domain.hpp"

namespace ergo {

// Discrete single-integrator trajectory: N+1 states and N controls with
//
//   states[n+1] = states[n] + controls[n] * dt      for n = 0..N-1.
//
// The identity above is an invariant: instances can only be built through
// from_controls (which integrates it by construction), from_states (which
// verifies it), or concatenate. states[0] is the given start; the N points
// states[1..N] are where the sensor spends the N steps, so downstream
// consumers (spectral averages, information collection) use states[1..N] and
// exclude the start.
class Trajectory {
 public:
  // Integrate controls from start. States may leave the domain; trajectories
  // are allowed to be infeasible and only consumers that require containment
  // check it.
  static Trajectory from_controls(std::span<const double> start,
                                  std::vector<std::vector<double>> controls,
                                  double dt, Domain domain);

  // Adopt externally produced states/controls, verifying the dynamics
  // identity within `tol` per component (states are kept as given).
  static Trajectory from_states(std::vector<std::vector<double>> states,
                                std::vector<std::vector<double>> controls,
                                double dt, Domain domain, double tol = 1e-9);

  int steps() const { return static_cast<int>(controls_.size()); }
  double dt() const { return dt_; }
  // Total duration: steps * dt.
  double horizon() const { return steps() * dt_; }
  const Domain& domain() const { return domain_; }
  const std::vector<std::vector<double>>& states() const { return states_; }
  const std::vector<std::vector<double>>& controls() const {
    return controls_;
  }
  const std::vector<double>& state(int n) const { return states_[n]; }

  // First `n_steps` steps as a trajectory (shares start and dt).
  Trajectory prefix(int n_steps) const;

 private:
  Trajectory(std::vector<std::vector<double>> states,
             std::vector<std::vector<double>> controls, double dt,
             Domain domain);

  std::vector<std::vector<double>> states_;
  std::vector<std::vector<double>> controls_;
  double dt_;
  Domain domain_;
};

// Free-function spelling of Trajectory::from_controls.
Trajectory rollout(std::span<const double> start,
                   const std::vector<std::vector<double>>& controls, double dt,
                   Domain domain);

// Join two trajectories where b starts at a's final state (verified within
// 1e-12 per component); the duplicated junction state is dropped.
Trajectory concatenate(const Trajectory& a, const Trajectory& b);

// Control effort sum_n |u_n|_2. With dt_weighted, each term is scaled by dt,
// making the value invariant under splitting one step into two of half dt.
double effort(const Trajectory& traj, bool dt_weighted = false);

// --- Trajectory CSV (2-D) ----------------------------------------------------
//
//   n,x,y,ux,uy
//
// One row per state n = 0..N; the control columns are blank on the last row
// (state N has no outgoing control). '#' lines are skipped. The domain and dt
// are not stored, so readers must supply them; the dynamics identity is
// re-verified on load.

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj,
                          const std::string& comment = "");
Trajectory read_trajectory_csv(const std::filesystem::path& path,
                               const Domain& domain, double dt);

}  // namespace ergo
