#include "ergo/scenarios.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace ergo {

const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

namespace {

Side other(Side s) { return s == Side::left ? Side::right : Side::left; }

// Steps assigned to `side` out of a block of `len`, proportional to its mass.
// Ties (exact .5) round up, i.e. toward the side the block starts on.
int proportional_steps(const TwoStateSpec& spec, Side side, int len) {
  const double mass = side == Side::left ? spec.info_left : spec.info_right;
  const int n = static_cast<int>(std::floor(mass * len + 0.5));
  return std::min(std::max(n, 0), len);
}

}  // namespace

void TwoStateSpec::validate() const {
  if (!(info_left >= 0.0) || !(info_right >= 0.0)) {
    throw std::invalid_argument("side information must be >= 0");
  }
  if (std::abs(info_left + info_right - 1.0) > 1e-12) {
    throw std::invalid_argument(fmt::format(
        "side information must sum to 1, got {}", info_left + info_right));
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("rate must be positive and finite");
  }
  if (!(switch_cost >= 0.0)) {
    throw std::invalid_argument("switch_cost must be >= 0");
  }
}

SchedulePolicy SchedulePolicy::perfectly_ergodic() {
  return SchedulePolicy{Kind::perfectly_ergodic, 0};
}

SchedulePolicy SchedulePolicy::repeated_ergodic(int segment_len) {
  return SchedulePolicy{Kind::repeated_ergodic, segment_len};
}

TwoStateResult two_state_schedule(const TwoStateSpec& spec, int n_steps,
                                  const SchedulePolicy& policy) {
  spec.validate();
  if (n_steps < 1) {
    throw std::invalid_argument("n_steps must be >= 1");
  }
  int segment_len = n_steps;
  if (policy.kind == SchedulePolicy::Kind::repeated_ergodic) {
    segment_len = policy.segment_len;
    if (segment_len < 1 || n_steps % segment_len != 0) {
      throw std::invalid_argument(fmt::format(
          "segment length {} must divide n_steps {}", segment_len, n_steps));
    }
  }

  // Build the visit sequence: each segment spends a proportional block on the
  // side it starts on, then the remainder on the other side.
  std::vector<Side> visits;
  visits.reserve(n_steps);
  Side segment_start = spec.start;
  for (int done = 0; done < n_steps; done += segment_len) {
    const int on_start = proportional_steps(spec, segment_start, segment_len);
    for (int i = 0; i < on_start; ++i) visits.push_back(segment_start);
    for (int i = on_start; i < segment_len; ++i) {
      visits.push_back(other(segment_start));
    }
    segment_start = visits.back();
  }

  // Execute with closed-form depletion per side so exact-multiple masses hit
  // exactly zero.
  auto remaining_after = [&](Side side, int t) {
    const double mass = side == Side::left ? spec.info_left : spec.info_right;
    return std::max(0.0, mass - static_cast<double>(t) * spec.rate);
  };
  int count_left = 0, count_right = 0;
  int switches = 0;
  int zero_steps = 0;
  Side at = spec.start;
  std::vector<double> per_step(visits.size(), 0.0);
  for (std::size_t n = 0; n < visits.size(); ++n) {
    const Side side = visits[n];
    if (side != at) {
      ++switches;
      at = side;
    }
    const double total_before = remaining_after(Side::left, count_left) +
                                remaining_after(Side::right, count_right);
    int& count = side == Side::left ? count_left : count_right;
    const double before = remaining_after(side, count);
    ++count;
    const double amt = std::min(before - remaining_after(side, count),
                                spec.rate);
    per_step[n] = amt;
    if (amt == 0.0 && total_before > 0.0) ++zero_steps;
  }
  const double rem_left = remaining_after(Side::left, count_left);
  const double rem_right = remaining_after(Side::right, count_right);
  const double collected =
      (spec.info_left - rem_left) + (spec.info_right - rem_right);
  std::optional<int> steps_to_complete;
  if (rem_left + rem_right == 0.0) steps_to_complete = n_steps;

  return TwoStateResult{collected,
                        switches,
                        steps_to_complete,
                        zero_steps,
                        switches * spec.switch_cost,
                        std::move(visits),
                        std::move(per_step)};
}

void TwoPostSpec::validate() const {
  if (!(sigma_left > 0.0) || !std::isfinite(sigma_left) ||
      !std::isfinite(sigma_right)) {
    throw std::invalid_argument("noise levels must be positive and finite");
  }
  if (!(sigma_right >= sigma_left)) {
    throw std::invalid_argument(
        "sigma_right must be >= sigma_left (left is the better post)");
  }
  if (n_measurements < 1) {
    throw std::invalid_argument("n_measurements must be >= 1");
  }
}

double two_post_variance(const TwoPostSpec& spec, int n_left) {
  spec.validate();
  if (n_left < 0 || n_left > spec.n_measurements) {
    throw std::out_of_range(fmt::format("n_left {} outside [0, {}]", n_left,
                                        spec.n_measurements));
  }
  const double info =
      n_left / (spec.sigma_left * spec.sigma_left) +
      (spec.n_measurements - n_left) / (spec.sigma_right * spec.sigma_right);
  return 1.0 / info;
}

int ergodic_allocation(const TwoPostSpec& spec) {
  spec.validate();
  const double wl = 1.0 / (spec.sigma_left * spec.sigma_left);
  const double wr = 1.0 / (spec.sigma_right * spec.sigma_right);
  return static_cast<int>(std::lround(spec.n_measurements * wl / (wl + wr)));
}

}  // namespace ergo
