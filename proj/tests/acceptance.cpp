// End-to-end acceptance checks for the planning and collection pipeline.
// Each numbered criterion prints exactly one [PASS]/[FAIL] line; the exit
// code is the number of failed criteria. Criteria 1-3 run the full default
// experiment commands and check trend bands; criteria 4-8 are exact oracle
// and identity checks. All tolerances are pinned here, in code.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ergo/ergodicity.hpp"
#include "ergo/experiments.hpp"
#include "ergo/grid.hpp"
#include "ergo/infosim.hpp"
#include "ergo/planner.hpp"
#include "ergo/scenarios.hpp"
#include "ergo/spectral.hpp"
#include "ergo/trajectory.hpp"

using namespace ergo;

namespace {

int failures = 0;

// Runs one criterion body; the body returns an empty string to pass or a
// short explanation of the first failure. Exceptions fail the criterion
// without taking down the rest of the run.
void criterion(int number, const std::string& description,
               const std::function<std::string()>& body) {
  std::string why;
  try {
    why = body();
  } catch (const std::exception& e) {
    why = std::string("exception: ") + e.what();
  }
  if (why.empty()) {
    std::printf("[PASS] criterion %d: %s\n", number, description.c_str());
  } else {
    ++failures;
    std::printf("[FAIL] criterion %d: %s (%s)\n", number, description.c_str(),
                why.c_str());
  }
  std::fflush(stdout);
}

std::string fmtnum(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

DensityField random_density(std::mt19937_64& rng, const Domain& dom, int res) {
  std::uniform_real_distribution<double> val(0.05, 1.0);
  std::vector<double> v(static_cast<std::size_t>(res) * res);
  for (double& x : v) x = val(rng);
  return normalize(RawField(GridShape(dom, {res, res}), std::move(v)));
}

}  // namespace

int main() {
  const std::filesystem::path outdir =
      std::filesystem::temp_directory_path() /
      ("ergo_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(outdir);

  // Criteria 1 and 2 share one sweep over the default parameterization.
  std::optional<SweepResult> sweep;
  std::string sweep_error;
  double sweep_wall = 0.0;
  try {
    ExperimentConfig config;
    config.output_dir = outdir / "sweep";
    const auto t0 = std::chrono::steady_clock::now();
    sweep = cmd_score_sweep(config);
    sweep_wall = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  } catch (const std::exception& e) {
    sweep_error = std::string("exception: ") + e.what();
  }

  criterion(1, "tighter score targets strictly increase gathered information",
            [&]() -> std::string {
    constexpr double kMinLowestInfoPct = 70.0;
    constexpr double kMaxWallSeconds = 300.0;
    if (!sweep) return sweep_error;
    if (sweep->rows.size() != 8) {
      return "expected 6 swept rows plus 2 baselines, got " +
             std::to_string(sweep->rows.size());
    }
    for (std::size_t i = 0; i < 6; ++i) {
      const SweepRow& row = sweep->rows[i];
      if (row.method != "pto" || row.status != "ok") {
        return "row " + std::to_string(i) + " status: " + row.status;
      }
      if (i > 0) {
        const SweepRow& prev = sweep->rows[i - 1];
        if (!(row.achieved_score < prev.achieved_score)) {
          return "achieved scores not strictly decreasing at row " +
                 std::to_string(i);
        }
        if (!(row.info_pct > prev.info_pct)) {
          return "info " + fmtnum(row.info_pct) + " at row " +
                 std::to_string(i) + " does not exceed " +
                 fmtnum(prev.info_pct);
        }
      }
    }
    if (!(sweep->rows[5].info_pct >= kMinLowestInfoPct)) {
      return "lowest-score trajectory gathered only " +
             fmtnum(sweep->rows[5].info_pct) + "%";
    }
    if (!(sweep_wall <= kMaxWallSeconds)) {
      return "sweep took " + fmtnum(sweep_wall) + "s";
    }
    return "";
  });

  criterion(2, "greedy collection dominates every swept trajectory",
            [&]() -> std::string {
    constexpr double kMinGreedyInfoPct = 80.0;
    if (!sweep) return sweep_error;
    const SweepRow& greedy = sweep->rows[6];
    if (greedy.method != "greedy" || greedy.status != "ok") {
      return "greedy row status: " + greedy.status;
    }
    if (!(greedy.info_pct >= kMinGreedyInfoPct)) {
      return "greedy gathered only " + fmtnum(greedy.info_pct) + "%";
    }
    for (std::size_t i = 0; i < 6; ++i) {
      if (!(greedy.info_pct >= sweep->rows[i].info_pct)) {
        return "greedy " + fmtnum(greedy.info_pct) + "% below row " +
               std::to_string(i) + " at " + fmtnum(sweep->rows[i].info_pct) +
               "%";
      }
    }
    return "";
  });

  criterion(3, "splitting the horizon costs effort, not information",
            [&]() -> std::string {
    constexpr double kEffortRatioLo = 1.4;
    constexpr double kEffortRatioHi = 2.6;
    constexpr double kMaxInfoGapPts = 10.0;
    ExperimentConfig config;
    config.output_dir = outdir / "horizon";
    const HorizonResult res = cmd_horizon(config);
    const HorizonRow& single = res.rows[0];
    const HorizonRow& composite = res.rows[1];
    const double ratio = composite.effort / single.effort;
    const double gap = std::abs(single.info_pct - composite.info_pct);
    if (!(ratio >= kEffortRatioLo && ratio <= kEffortRatioHi)) {
      return "effort ratio " + fmtnum(ratio) + " outside [1.4, 2.6]";
    }
    if (!(gap <= kMaxInfoGapPts)) {
      return "info gap " + fmtnum(gap) + " points";
    }
    return "";
  });

  criterion(4, "two-state schedules collect everything exactly as scheduled",
            [&]() -> std::string {
    const TwoStateSpec spec{0.8, 0.2, 0.1, 1.0, Side::left};
    const TwoStateResult ten =
        two_state_schedule(spec, 10, SchedulePolicy::perfectly_ergodic());
    if (ten.collected != 1.0 || ten.switches != 1) {
      return "N=10 collected " + fmtnum(ten.collected) + " with " +
             std::to_string(ten.switches) + " switches";
    }
    const TwoStateResult twenty =
        two_state_schedule(spec, 20, SchedulePolicy::perfectly_ergodic());
    if (twenty.collected != 1.0 || twenty.zero_collection_steps != 8) {
      return "N=20 collected " + fmtnum(twenty.collected) + " with " +
             std::to_string(twenty.zero_collection_steps) + " wasted steps";
    }
    const TwoStateResult repeated =
        two_state_schedule(spec, 10, SchedulePolicy::repeated_ergodic(5));
    if (repeated.collected != 1.0 || repeated.switches != 2) {
      return "repeated 2x5 collected " + fmtnum(repeated.collected) +
             " with " + std::to_string(repeated.switches) + " switches";
    }
    return "";
  });

  criterion(5, "residual targets preserve the field and its mass split",
            [&]() -> std::string {
    constexpr double kElementwiseTol = 1e-9;
    constexpr double kIntegralTol = 1e-6;
    const Domain dom({0.0, 0.0}, {1.0, 1.0});
    const int res = 16;
    const int order = res - 1;  // complete basis: reconstruction is exact
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> horizon(0.3, 5.0);
    std::uniform_real_distribution<double> coord(0.02, 0.98);

    for (int instance = 0; instance < 20; ++instance) {
      const DensityField phi = random_density(rng, dom, res);
      const CoefficientSet phi_coeffs = decompose_field(phi, order);
      const double ta = horizon(rng);
      const double tb = horizon(rng);

      // A prefix that already matches the target leaves the target itself.
      const PartialTrajectoryContext matched(phi_coeffs, ta, tb);
      const RawField same = residual_field(matched, phi, order, {res, res});
      for (std::size_t i = 0; i < same.values.size(); ++i) {
        const double diff = std::abs(same.values[i] - phi.raw().values[i]);
        if (!(diff <= kElementwiseTol)) {
          return "instance " + std::to_string(instance) +
                 ": matched-prefix residual deviates by " + fmtnum(diff);
        }
      }

      // An arbitrary prefix: the residual still carries unit mass, and the
      // unscaled difference carries exactly the remaining share of it.
      std::vector<std::vector<double>> pts(30, std::vector<double>(2));
      for (auto& p : pts) {
        p[0] = coord(rng);
        p[1] = coord(rng);
      }
      const CoefficientSet ca = decompose_points(pts, dom, order);
      const PartialTrajectoryContext ctx(ca, ta, tb);
      const RawField resid = residual_field(ctx, phi, order, {res, res});
      if (!(std::abs(integral(resid) - 1.0) <= kIntegralTol)) {
        return "instance " + std::to_string(instance) +
               ": residual integral " + fmtnum(integral(resid));
      }

      const double frac_a = ta / (ta + tb);
      std::vector<double> pre(phi_coeffs.size());
      for (std::size_t i = 0; i < pre.size(); ++i) {
        pre[i] = phi_coeffs.coeff(i) - frac_a * ca.coeff(i);
      }
      const CoefficientSet pre_coeffs(dom, order, pre, phi_coeffs.weights());
      const double pre_integral =
          integral(reconstruct_field(pre_coeffs, {res, res}));
      const double expected = tb / (ta + tb);
      if (!(std::abs(pre_integral - expected) <= kIntegralTol)) {
        return "instance " + std::to_string(instance) +
               ": unscaled residual mass " + fmtnum(pre_integral) + " vs " +
               fmtnum(expected);
      }
    }
    return "";
  });

  criterion(6, "the better post beats the proportional measurement split",
            [&]() -> std::string {
    constexpr double kEqualityTol = 1e-12;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> sigma(0.1, 2.0);
    std::uniform_real_distribution<double> ratio(1.05, 2.0);
    std::uniform_int_distribution<int> n_dist(3, 50);

    for (int trial = 0; trial < 50; ++trial) {
      const double sl = sigma(rng);
      const TwoPostSpec spec{sl, sl * ratio(rng), n_dist(rng)};
      const int split = ergodic_allocation(spec);
      const double all_left = two_post_variance(spec, spec.n_measurements);
      const double proportional = two_post_variance(spec, split);
      if (!(all_left < proportional)) {
        return "trial " + std::to_string(trial) + ": all-left " +
               fmtnum(all_left) + " not below proportional " +
               fmtnum(proportional);
      }
    }
    for (int trial = 0; trial < 20; ++trial) {
      const double s = sigma(rng);
      const TwoPostSpec spec{s, s, n_dist(rng)};
      const double all_left = two_post_variance(spec, spec.n_measurements);
      const double proportional =
          two_post_variance(spec, ergodic_allocation(spec));
      if (!(std::abs(all_left - proportional) <= kEqualityTol)) {
        return "equal posts differ by " +
               fmtnum(std::abs(all_left - proportional));
      }
    }
    return "";
  });

  criterion(7, "greedy collection equals the exhaustive optimum exactly",
            [&]() -> std::string {
    const Domain dom({0.0, 0.0}, {1.0, 1.0});
    const GridShape shape(dom, {2, 2});
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> mass_dist(0.05, 1.0);

    for (int instance = 0; instance < 10; ++instance) {
      std::vector<double> masses(4);
      double total = 0.0;
      for (double& m : masses) {
        m = mass_dist(rng);
        total += m;
      }
      for (double& m : masses) m /= total;

      for (int n_steps = 1; n_steps <= 6; ++n_steps) {
        const double rate = 1.0 / n_steps;
        const InfoGrid info(shape, masses, rate);

        double best = 0.0;
        const int total_seqs = 1 << (2 * n_steps);  // every cell sequence
        for (int code = 0; code < total_seqs; ++code) {
          int visits[4] = {0, 0, 0, 0};
          int c = code;
          for (int s = 0; s < n_steps; ++s) {
            ++visits[c & 3];
            c >>= 2;
          }
          double collected = 0.0;
          for (int cell = 0; cell < 4; ++cell) {
            const double m = masses[static_cast<std::size_t>(cell)];
            collected += m - std::max(0.0, m - visits[cell] * rate);
          }
          best = std::max(best, collected);
        }

        const Trajectory plan = greedy_plan(
            info, std::vector<double>{0.5, 0.5}, n_steps, 0.5);
        const double greedy = simulate_collection(info, plan).collected;
        if (greedy != best) {
          return "instance " + std::to_string(instance) + " N=" +
                 std::to_string(n_steps) + ": greedy " + fmtnum(greedy) +
                 " vs optimum " + fmtnum(best);
        }
      }
    }
    return "";
  });

  criterion(8, "gradients and decomposition identities verify numerically",
            [&]() -> std::string {
    constexpr double kGradRelTol = 1e-4;
    constexpr double kIdentityTol = 1e-12;
    const Domain dom({0.0, 0.0}, {1.0, 1.0});
    const double h = 1e-6;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> start_dist(0.35, 0.65);
    std::uniform_real_distribution<double> u_dist(-0.2, 0.2);
    std::uniform_real_distribution<double> coord(0.05, 0.95);

    for (int instance = 0; instance < 20; ++instance) {
      const int order = instance % 2 == 0 ? 3 : 5;
      OptimizerConfig cfg;
      cfg.order = order;
      cfg.control_penalty = 0.01;

      std::vector<std::vector<double>> target_pts(3, std::vector<double>(2));
      for (auto& p : target_pts) {
        p[0] = coord(rng);
        p[1] = coord(rng);
      }
      const CoefficientSet field = decompose_points(target_pts, dom, order);

      std::vector<std::vector<double>> controls(8, std::vector<double>(2));
      for (auto& u : controls) {
        u[0] = u_dist(rng);
        u[1] = u_dist(rng);
      }
      const std::vector<double> start{start_dist(rng), start_dist(rng)};
      const Trajectory traj = rollout(start, controls, 0.1, dom);

      const auto grad = objective_grad(traj, field, cfg);
      for (std::size_t n = 0; n < grad.size(); ++n) {
        for (int a = 0; a < 2; ++a) {
          auto bumped = [&](double delta) {
            auto u = controls;
            u[n][static_cast<std::size_t>(a)] += delta;
            return objective(rollout(start, u, 0.1, dom), field, cfg);
          };
          const double fd = (bumped(h) - bumped(-h)) / (2.0 * h);
          const double g = grad[n][static_cast<std::size_t>(a)];
          if (!(std::abs(g - fd) <= kGradRelTol * std::max(1.0, std::abs(fd)))) {
            return "instance " + std::to_string(instance) + " grad[" +
                   std::to_string(n) + "][" + std::to_string(a) + "] " +
                   fmtnum(g) + " vs fd " + fmtnum(fd);
          }
        }
      }
    }

    // Point decomposition is linear in the point set.
    const int order = 6;
    std::vector<std::vector<double>> a_pts(12, std::vector<double>(2));
    std::vector<std::vector<double>> b_pts(20, std::vector<double>(2));
    for (auto& p : a_pts) { p[0] = coord(rng); p[1] = coord(rng); }
    for (auto& p : b_pts) { p[0] = coord(rng); p[1] = coord(rng); }
    std::vector<std::vector<double>> all_pts = a_pts;
    all_pts.insert(all_pts.end(), b_pts.begin(), b_pts.end());
    const CoefficientSet ca = decompose_points(a_pts, dom, order);
    const CoefficientSet cb = decompose_points(b_pts, dom, order);
    const CoefficientSet call = decompose_points(all_pts, dom, order);
    const double wa = 12.0 / 32.0;
    const double wb = 20.0 / 32.0;
    for (std::size_t i = 0; i < call.size(); ++i) {
      const double mix = wa * ca.coeff(i) + wb * cb.coeff(i);
      if (!(std::abs(call.coeff(i) - mix) <= kIdentityTol)) {
        return "point decomposition not linear at coefficient " +
               std::to_string(i);
      }
    }

    // Concatenating trajectories time-weights their coefficients.
    std::uniform_real_distribution<double> small_u(-0.15, 0.15);
    const double dt = 0.1;
    std::vector<std::vector<double>> u1(10, std::vector<double>(2));
    for (auto& u : u1) { u[0] = small_u(rng); u[1] = small_u(rng); }
    const Trajectory t1 = rollout(std::vector<double>{0.5, 0.5}, u1, dt, dom);
    std::vector<std::vector<double>> u2(14, std::vector<double>(2));
    for (auto& u : u2) { u[0] = small_u(rng); u[1] = small_u(rng); }
    const Trajectory t2 = rollout(t1.state(10), u2, dt, dom);
    const Trajectory whole = concatenate(t1, t2);
    const CoefficientSet c1 = decompose_trajectory(t1, order);
    const CoefficientSet c2 = decompose_trajectory(t2, order);
    const CoefficientSet cw = decompose_trajectory(whole, order);
    for (std::size_t i = 0; i < cw.size(); ++i) {
      const double mix = (10.0 * c1.coeff(i) + 14.0 * c2.coeff(i)) / 24.0;
      if (!(std::abs(cw.coeff(i) - mix) <= kIdentityTol)) {
        return "concatenation identity fails at coefficient " +
               std::to_string(i);
      }
    }
    return "";
  });

  std::filesystem::remove_all(outdir);
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures;
}
