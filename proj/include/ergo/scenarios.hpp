#pragma once

#include <optional>
#include <vector>

namespace ergo {

// Analytic two-state world: all information sits in two discrete states
// ("left"/"right"), collected at a fixed rate per step while the sensor
// occupies the state. Movement between states is free in time but counted,
// since in a real vehicle each switch costs effort.

enum class Side { left, right };
const char* to_string(Side s);

struct TwoStateSpec {
  double info_left;
  double info_right;  // info_left + info_right must equal 1 (within 1e-12)
  double rate;        // > 0, collected per step from the occupied state
  double switch_cost; // >= 0, effort charged per switch
  Side start;

  void validate() const;  // throws std::invalid_argument
};

struct SchedulePolicy {
  enum class Kind {
    // One proportional block per side: round(info_start * N) steps on the
    // start side first (ties round toward the start side), remainder on the
    // other. One switch total.
    perfectly_ergodic,
    // The same proportional split applied independently to each segment of
    // `segment_len` steps; each segment starts on the side where the
    // previous one ended. segment_len must divide N.
    repeated_ergodic,
  };
  Kind kind = Kind::perfectly_ergodic;
  int segment_len = 0;

  static SchedulePolicy perfectly_ergodic();
  static SchedulePolicy repeated_ergodic(int segment_len);
};

struct TwoStateResult {
  double collected;
  int switches;
  // N when the schedule has gathered all available information by its end;
  // nullopt when information is left over.
  std::optional<int> steps_to_complete;
  // Steps that collected nothing while information still remained somewhere:
  // time wasted in a depleted state. Steps after everything is collected are
  // not wasted sensing and are not counted.
  int zero_collection_steps;
  double switching_cost;          // switches * switch_cost
  std::vector<Side> visits;       // length N
  std::vector<double> per_step;   // length N
};

// Execute the schedule for n_steps steps. Per-side depletion is evaluated in
// closed form (remaining = max(0, info - visits * rate)), so specs whose
// side masses are integer multiples of the rate complete exactly: collected
// hits the total without float residue and depleted sides yield exactly zero.
TwoStateResult two_state_schedule(const TwoStateSpec& spec, int n_steps,
                                  const SchedulePolicy& policy);

// Static estimation counterpart: N scalar measurements split between two
// posts whose noise is sigma_left and sigma_right, fused by inverse-variance
// weighting. Lower sigma_left means the left post is strictly more
// informative per measurement.
struct TwoPostSpec {
  double sigma_left;
  double sigma_right;  // >= sigma_left; both > 0
  int n_measurements;  // >= 1

  void validate() const;  // throws std::invalid_argument
};

// Posterior variance of the fused estimate when n_left of the N measurements
// go to the left post: 1 / (n_left/sl^2 + (N-n_left)/sr^2).
double two_post_variance(const TwoPostSpec& spec, int n_left);

// Measurement split proportional to per-post information 1/sigma^2,
// rounded to the nearest integer: round(N * (1/sl^2) / (1/sl^2 + 1/sr^2)).
// This is the allocation a coverage-proportional strategy would choose; it
// is strictly worse than spending every measurement at the better post
// whenever sigma_left < sigma_right and the rounded split leaves any
// measurement on the right.
int ergodic_allocation(const TwoPostSpec& spec);

}  // namespace ergo
