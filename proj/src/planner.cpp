#include "ergo/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

#include "ergo/errors.hpp"
#include "ergo/rng.hpp"

namespace ergo {

void OptimizerConfig::validate() const {
  if (order < 1) throw std::invalid_argument("order must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (score_target && !(*score_target >= 0.0)) {
    throw std::invalid_argument("score_target must be >= 0");
  }
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
  if (!(control_penalty >= 0.0)) {
    throw std::invalid_argument("control_penalty must be >= 0");
  }
  if (!(barrier_weight >= 0.0)) {
    throw std::invalid_argument("barrier_weight must be >= 0");
  }
  if (!(step_init > 0.0)) throw std::invalid_argument("step_init must be > 0");
  if (!(armijo_c > 0.0) || !(armijo_c < 1.0)) {
    throw std::invalid_argument("armijo_c must be in (0, 1)");
  }
  if (!(backtrack_ratio > 0.0) || !(backtrack_ratio < 1.0)) {
    throw std::invalid_argument("backtrack_ratio must be in (0, 1)");
  }
  if (weight_exponent && !(*weight_exponent > 0.0)) {
    throw std::invalid_argument("weight_exponent must be > 0");
  }
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::score_target:
      return "score_target";
    case Termination::grad_tol:
      return "grad_tol";
    default:
      return "max_iters";
  }
}

namespace {

// Signed distance outside the domain along one axis (0 inside).
double axis_excess(const Domain& d, const std::vector<double>& x, int a) {
  if (x[a] < d.lower(a)) return x[a] - d.lower(a);
  if (x[a] > d.upper(a)) return x[a] - d.upper(a);
  return 0.0;
}

struct ObjectiveParts {
  double score;    // spectral mismatch E (out-of-domain states contribute 0)
  double control;  // gamma * dt * sum |u|^2
  double barrier;  // b * sum excess^2
  double total() const { return score + control + barrier; }
};

// Trajectory coefficients where states outside the domain drop out of the
// average but the divisor stays the full step count.
std::vector<double> clipped_trajectory_coeffs(const Trajectory& traj,
                                              const CoefficientSet& field) {
  std::vector<std::vector<double>> inside;
  inside.reserve(traj.steps());
  for (int n = 1; n <= traj.steps(); ++n) {
    if (field.domain().contains(traj.state(n))) inside.push_back(traj.state(n));
  }
  std::vector<double> c(field.size(), 0.0);
  if (inside.empty()) return c;
  const double scale =
      static_cast<double>(inside.size()) / static_cast<double>(traj.steps());
  CoefficientSet cs = decompose_points(inside, field.domain(), field.order());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = cs.coeff(i) * scale;
  return c;
}

ObjectiveParts evaluate_parts(const Trajectory& traj,
                              const CoefficientSet& field,
                              const OptimizerConfig& config) {
  if (!(traj.domain() == field.domain())) {
    throw std::invalid_argument(
        "trajectory and field coefficients use different domains");
  }
  const std::vector<double> c = clipped_trajectory_coeffs(traj, field);
  ObjectiveParts parts{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double d = c[i] - field.coeff(i);
    parts.score += field.weight(i) * d * d;
  }
  double effort_sq = 0.0;
  for (const auto& u : traj.controls()) {
    for (double ua : u) effort_sq += ua * ua;
  }
  parts.control = config.control_penalty * traj.dt() * effort_sq;
  double excess_sq = 0.0;
  for (int n = 1; n <= traj.steps(); ++n) {
    for (int a = 0; a < traj.domain().dim(); ++a) {
      const double e = axis_excess(traj.domain(), traj.state(n), a);
      excess_sq += e * e;
    }
  }
  parts.barrier = config.barrier_weight * excess_sq;
  return parts;
}

// Per-axis basis tables at one state with the normalizer folded in:
//   ct[a][k] = cos(k pi z_a) / h_a(k)
//   st[a][k] = sin(k pi z_a) * (k pi / L_a) / h_a(k)
// so that F_k(x) = prod_a ct[a][k_a] and
// dF_k/dx_a = -st[a][k_a] * prod_{i != a} ct[i][k_i].
void state_tables(const Domain& d, const std::vector<double>& x, int order,
                  std::vector<std::vector<double>>& ct,
                  std::vector<std::vector<double>>& st) {
  const int s = d.dim();
  ct.assign(s, std::vector<double>(order + 1));
  st.assign(s, std::vector<double>(order + 1));
  for (int a = 0; a < s; ++a) {
    const double len = d.extent(a);
    const double z = (x[a] - d.lower(a)) / len;
    const double h0 = std::sqrt(len);
    const double hk = std::sqrt(len / 2.0);
    ct[a][0] = 1.0 / h0;
    st[a][0] = 0.0;
    for (int k = 1; k <= order; ++k) {
      const double ang = k * std::numbers::pi * z;
      ct[a][k] = std::cos(ang) / hk;
      st[a][k] = std::sin(ang) * (k * std::numbers::pi / len) / hk;
    }
  }
}

}  // namespace

double objective(const Trajectory& traj, const CoefficientSet& field_coeffs,
                 const OptimizerConfig& config) {
  config.validate();
  return evaluate_parts(traj, field_coeffs, config).total();
}

namespace {

// d(E + barrier)/dx_n for each step state n = 1..N. The spectral part pulls
// the weighted residuals 2 * w_k * (c_k - phi_k) / N through the basis
// gradient at x_n; states outside the domain get only the barrier part.
std::vector<std::vector<double>> mismatch_state_grads(
    const Trajectory& traj, const CoefficientSet& field,
    const OptimizerConfig& config) {
  const Domain& dom = traj.domain();
  const int s = dom.dim();
  const int n_steps = traj.steps();
  const int order = field.order();

  const std::vector<double> c = clipped_trajectory_coeffs(traj, field);
  std::vector<double> pull(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    pull[i] = 2.0 * field.weight(i) * (c[i] - field.coeff(i)) / n_steps;
  }

  std::vector<std::vector<double>> state_grad(n_steps,
                                              std::vector<double>(s, 0.0));
  std::vector<std::vector<double>> ct, st;
  std::vector<int> k(s);
  for (int n = 1; n <= n_steps; ++n) {
    const auto& x = traj.state(n);
    auto& g = state_grad[n - 1];
    if (dom.contains(x)) {
      state_tables(dom, x, order, ct, st);
      std::fill(k.begin(), k.end(), 0);
      for (std::size_t flat = 0; flat < pull.size(); ++flat) {
        if (pull[flat] != 0.0) {
          for (int a = 0; a < s; ++a) {
            double p = pull[flat];
            for (int i = 0; i < s; ++i) {
              p *= (i == a) ? st[i][k[i]] : ct[i][k[i]];
            }
            g[a] -= p;
          }
        }
        for (int a = s - 1; a >= 0; --a) {  // last axis fastest
          if (++k[a] <= order) break;
          k[a] = 0;
        }
      }
    }
    for (int a = 0; a < s; ++a) {
      g[a] += 2.0 * config.barrier_weight * axis_excess(dom, x, a);
    }
  }
  return state_grad;
}

}  // namespace

std::vector<std::vector<double>> objective_grad(
    const Trajectory& traj, const CoefficientSet& field_coeffs,
    const OptimizerConfig& config) {
  config.validate();
  if (!(traj.domain() == field_coeffs.domain())) {
    throw std::invalid_argument(
        "trajectory and field coefficients use different domains");
  }
  const int s = traj.domain().dim();
  const int n_steps = traj.steps();
  const auto state_grad = mismatch_state_grads(traj, field_coeffs, config);

  // Chain rule through the integrator: dx_n/du_j = dt for j < n, so each
  // control sees the suffix sum of the state gradients after it.
  std::vector<std::vector<double>> grad(n_steps, std::vector<double>(s));
  std::vector<double> suffix(s, 0.0);
  for (int j = n_steps - 1; j >= 0; --j) {
    for (int a = 0; a < s; ++a) {
      suffix[a] += state_grad[j][a];
      grad[j][a] = 2.0 * config.control_penalty * traj.dt() *
                       traj.controls()[j][a] +
                   traj.dt() * suffix[a];
    }
  }
  return grad;
}

OptimizeReport optimize(std::span<const double> start, int n_steps, double dt,
                        const DensityField& phi,
                        const OptimizerConfig& config) {
  config.validate();
  const Domain& dom = phi.shape().domain();
  require_dim(dom, start, "optimize start");
  require_inside(dom, start, "optimize start");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("dt must be positive and finite");
  }
  const CoefficientSet field =
      decompose_field(phi, config.order, config.weight_exponent);
  const int s = dom.dim();

  // Initial guess: a gentle outward spiral from the start (first two axes)
  // with seeded Gaussian jitter on every displacement, so the iterate is not
  // stuck at the zero-control stationary point and runs are reproducible.
  std::mt19937_64 rng(config.seed);
  double min_extent = dom.extent(0);
  for (int a = 1; a < s; ++a) min_extent = std::min(min_extent, dom.extent(a));
  const double amplitude = 0.05 * min_extent;
  const double jitter_sigma = 0.02;
  const double turns = 3.0;
  std::vector<std::vector<double>> controls(n_steps, std::vector<double>(s));
  std::vector<double> prev(start.begin(), start.end());
  for (int n = 1; n <= n_steps; ++n) {
    std::vector<double> point(start.begin(), start.end());
    if (s >= 2) {
      const double frac = static_cast<double>(n) / n_steps;
      const double theta = 2.0 * std::numbers::pi * turns * frac;
      point[0] += amplitude * frac * std::cos(theta);
      point[1] += amplitude * frac * std::sin(theta);
    }
    for (int a = 0; a < s; ++a) {
      const double d = point[a] - prev[a] + jitter_sigma * normal01(rng);
      controls[n - 1][a] = d / dt;
      prev[a] += controls[n - 1][a] * dt;
    }
  }

  Trajectory cur = rollout(start, controls, dt, dom);
  ObjectiveParts parts = evaluate_parts(cur, field, config);
  if (!std::isfinite(parts.total())) {
    throw numeric_error("objective is not finite at iteration 0");
  }

  OptimizeReport report{cur, {parts.score}, {parts.total()},
                        {effort(cur)},      0,             Termination::max_iters};
  double best_score = parts.score;
  if (config.score_target && best_score <= *config.score_target) {
    report.terminated_by = Termination::score_target;
    return report;
  }

  double step = config.step_init;
  for (int it = 1; it <= config.max_iters; ++it) {
    // Objective gradient with respect to the step states x_1..x_N. Descending
    // in state space and recovering controls by differencing sidesteps the
    // integrator chain's conditioning; for the fully actuated single
    // integrator the projection back onto the dynamics is exact, so the fixed
    // points coincide with control-space descent.
    auto grad = mismatch_state_grads(cur, field, config);
    for (int n = 1; n <= n_steps; ++n) {
      // d/dx_n of gamma*dt*sum|u|^2 with u_m = (x_{m+1} - x_m)/dt.
      for (int a = 0; a < s; ++a) {
        double g = cur.controls()[n - 1][a];
        if (n < n_steps) g -= cur.controls()[n][a];
        grad[n - 1][a] += 2.0 * config.control_penalty * g;
      }
    }
    double grad_sq = 0.0;
    for (const auto& gn : grad) {
      for (double ga : gn) grad_sq += ga * ga;
    }
    if (!std::isfinite(grad_sq)) {
      throw numeric_error(
          fmt::format("gradient is not finite at iteration {}", it));
    }
    if (std::sqrt(grad_sq) < config.grad_tol) {
      report.terminated_by = Termination::grad_tol;
      break;
    }

    // Armijo backtracking along the negative gradient; the first trial step
    // is allowed to grow past the last accepted one.
    double alpha = std::min(config.step_init, 2.0 * step);
    bool accepted = false;
    std::vector<std::vector<double>> trial_u = controls;
    while (alpha > 1e-20) {
      for (int n = 1; n <= n_steps; ++n) {
        for (int a = 0; a < s; ++a) {
          const double prev = (n == 1) ? start[a]
                                       : cur.state(n - 1)[a] -
                                             alpha * grad[n - 2][a];
          const double next = cur.state(n)[a] - alpha * grad[n - 1][a];
          trial_u[n - 1][a] = (next - prev) / dt;
        }
      }
      Trajectory trial = rollout(start, trial_u, dt, dom);
      ObjectiveParts trial_parts = evaluate_parts(trial, field, config);
      if (std::isfinite(trial_parts.total()) &&
          trial_parts.total() <=
              parts.total() - config.armijo_c * alpha * grad_sq) {
        cur = std::move(trial);
        parts = trial_parts;
        controls.swap(trial_u);
        accepted = true;
        break;
      }
      alpha *= config.backtrack_ratio;
    }
    if (!accepted) {
      // No descent step possible at any length: first-order stationary.
      report.terminated_by = Termination::grad_tol;
      break;
    }
    step = alpha;

    ++report.iterations;
    report.objective_history.push_back(parts.total());
    report.effort_history.push_back(effort(cur));
    report.score_history.push_back(
        std::min(report.score_history.back(), parts.score));
    if (parts.score < best_score) {
      best_score = parts.score;
      report.trajectory = cur;
    }
    if (config.score_target && parts.score <= *config.score_target) {
      report.terminated_by = Termination::score_target;
      break;
    }
  }
  return report;
}

Trajectory greedy_plan(const InfoGrid& info, std::span<const double> start,
                       int n_steps, double dt) {
  const GridShape& shape = info.shape();
  const Domain& dom = shape.domain();
  require_dim(dom, start, "greedy start");
  require_inside(dom, start, "greedy start");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("dt must be positive and finite");
  }
  const int s = dom.dim();
  std::vector<int> visits(shape.cell_count(), 0);
  auto remaining = [&](std::size_t cell) {
    return std::max(0.0,
                    info.remaining(cell) - visits[cell] * info.rate());
  };

  std::vector<double> cur(start.begin(), start.end());
  std::vector<std::vector<double>> controls;
  controls.reserve(n_steps);
  for (int n = 0; n < n_steps; ++n) {
    // Most information remaining; strict > keeps the lowest flat index on
    // ties.
    std::size_t best = 0;
    double best_mass = remaining(0);
    for (std::size_t cell = 1; cell < shape.cell_count(); ++cell) {
      const double m = remaining(cell);
      if (m > best_mass) {
        best = cell;
        best_mass = m;
      }
    }
    std::vector<double> u(s, 0.0);
    const auto cur_cell = shape.cell_of(cur);
    if (!(cur_cell && *cur_cell == best)) {
      const auto target = shape.cell_center(best);
      for (int a = 0; a < s; ++a) u[a] = (target[a] - cur[a]) / dt;
    }
    for (int a = 0; a < s; ++a) cur[a] += u[a] * dt;
    controls.push_back(std::move(u));
    ++visits[best];
  }
  return rollout(start, controls, dt, dom);
}

Trajectory composite_plan(std::span<const double> start,
                          const std::vector<int>& segment_steps, double dt,
                          const DensityField& phi,
                          const OptimizerConfig& config) {
  if (segment_steps.empty()) {
    throw std::invalid_argument("composite plan needs at least one segment");
  }
  std::optional<Trajectory> total;
  std::vector<double> cur(start.begin(), start.end());
  for (std::size_t i = 0; i < segment_steps.size(); ++i) {
    OptimizerConfig cfg = config;
    cfg.seed = config.seed + i;
    OptimizeReport rep = optimize(cur, segment_steps[i], dt, phi, cfg);
    cur = rep.trajectory.state(rep.trajectory.steps());
    if (total) {
      total = concatenate(*total, rep.trajectory);
    } else {
      total = std::move(rep.trajectory);
    }
  }
  return std::move(*total);
}

void write_report_csv(const std::filesystem::path& path,
                      const OptimizeReport& report,
                      const std::string& comment) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write report " + path.string());
  }
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "iteration,score,objective,effort\n";
  for (int i = 0; i <= report.iterations; ++i) {
    out << fmt::format("{},{},{},{}\n", i, report.score_history[i],
                       report.objective_history[i], report.effort_history[i]);
  }
}

}  // namespace ergo
