#include "ergo/experiments.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "ergo/ergodicity.hpp"
#include "ergo/errors.hpp"

namespace ergo {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string opt_str(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

// Optimizer settings a command actually runs with: the experiment-level
// frequency cutoff overrides the library default.
OptimizerConfig planner_config(const ExperimentConfig& c) {
  OptimizerConfig opt = c.optimizer;
  opt.order = c.order;
  return opt;
}

// Spectral mismatch of a trajectory against the field coefficients, with the
// penalty terms switched off. Uses the planner's evaluation (states outside
// the domain contribute zero), so it is defined even for a trajectory that
// grazes the boundary.
double plain_score(const Trajectory& traj, const CoefficientSet& field,
                   const OptimizerConfig& opt) {
  OptimizerConfig plain = opt;
  plain.control_penalty = 0.0;
  plain.barrier_weight = 0.0;
  return objective(traj, field, plain);
}

std::string stamp(const ExperimentConfig& config) {
  return fmt::format("config_hash={:016x} seed={}", config.hash(),
                     config.optimizer.seed);
}

std::filesystem::path prepare_outdir(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  return config.output_dir;
}

std::ofstream open_csv(const std::filesystem::path& path,
                       const ExperimentConfig& config, const char* header) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "# " << stamp(config) << '\n' << header << '\n';
  return out;
}

// Number cell for the CSVs: empty when there is no value.
std::string num(double v) {
  return std::isfinite(v) ? fmt::format("{}", v) : std::string();
}

double pct(double collected, double total) {
  return 100.0 * collected / total;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (domain_lower.size() != 2 || domain_upper.size() != 2) {
    throw std::invalid_argument("experiments run on a 2-D domain");
  }
  const Domain dom(domain_lower, domain_upper);
  auto check_res = [](const std::vector<int>& res, const char* what) {
    if (res.size() != 2 || res[0] < 1 || res[1] < 1) {
      throw std::invalid_argument(
          fmt::format("{} must be two positive integers", what));
    }
  };
  check_res(grid_resolution, "grid_resolution");
  check_res(field_resolution, "field_resolution");
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("rate must be positive and finite");
  }
  if (order < 1) throw std::invalid_argument("order must be >= 1");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("dt must be positive and finite");
  }
  if (start.size() != 2 || !dom.contains(start)) {
    throw std::invalid_argument("start must lie inside the domain");
  }
  optimizer.validate();
  for (double t : score_targets) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("score targets must be positive and finite");
    }
  }
  two_state.validate();
  two_post.validate();
  if (!eid_components.empty()) {
    EidSpec check(eid_components);  // constructor validates
  }
  if (output_dir.empty()) {
    throw std::invalid_argument("output_dir must not be empty");
  }
}

Domain ExperimentConfig::domain() const {
  return Domain(domain_lower, domain_upper);
}

EidSpec ExperimentConfig::eid(bool bimodal_default) const {
  if (!eid_components.empty()) return EidSpec(eid_components);
  const double var = 0.08 * 0.08;
  std::vector<GaussianComponent> comps{
      {{0.65, 0.65}, {var, 0.0, 0.0, var}, 1.0}};
  if (bimodal_default) {
    comps[0].weight = 0.5;
    comps.push_back({{0.25, 0.7}, {var, 0.0, 0.0, var}, 0.5});
  }
  return EidSpec(std::move(comps));
}

std::string ExperimentConfig::canonical_string() const {
  std::string eid_part;
  for (const auto& c : eid_components) {
    eid_part += fmt::format("(mean={};cov={};w={})", fmt::join(c.mean, ","),
                            fmt::join(c.cov, ","), c.weight);
  }
  // optimizer.order is omitted: commands run with the experiment-level order.
  return fmt::format(
      "domain_lower={};domain_upper={};eid=[{}];grid={};field={};rate={};"
      "order={};n_steps={};dt={};start={};optimizer=(max_iters={};"
      "score_target={};grad_tol={};control_penalty={};barrier_weight={};"
      "step_init={};armijo_c={};backtrack_ratio={};seed={};weight_exponent={})"
      ";score_targets={};two_state=({},{},{},{},{});two_post=({},{},{})",
      fmt::join(domain_lower, ","), fmt::join(domain_upper, ","), eid_part,
      fmt::join(grid_resolution, ","), fmt::join(field_resolution, ","), rate,
      order, n_steps, dt, fmt::join(start, ","), optimizer.max_iters,
      opt_str(optimizer.score_target), optimizer.grad_tol,
      optimizer.control_penalty, optimizer.barrier_weight, optimizer.step_init,
      optimizer.armijo_c, optimizer.backtrack_ratio, optimizer.seed,
      opt_str(optimizer.weight_exponent), fmt::join(score_targets, ","),
      two_state.info_left, two_state.info_right, two_state.rate,
      two_state.switch_cost, to_string(two_state.start), two_post.sigma_left,
      two_post.sigma_right, two_post.n_measurements);
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical_string()); }

namespace {

template <typename T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(
        fmt::format("config key '{}' has the wrong type", key));
  }
}

GaussianComponent parse_component(const json& j, std::size_t index) {
  if (!j.is_object()) {
    throw std::invalid_argument("eid_components entries must be objects");
  }
  GaussianComponent c{{}, {0, 0, 0, 0}, 0.0};
  bool have_cov = false, have_sigma = false;
  for (const auto& [key, value] : j.items()) {
    const std::string where = fmt::format("eid_components[{}].{}", index, key);
    if (key == "mean") {
      c.mean = get_as<std::vector<double>>(value, where);
    } else if (key == "weight") {
      c.weight = get_as<double>(value, where);
    } else if (key == "cov") {
      const auto v = get_as<std::vector<double>>(value, where);
      if (v.size() != 4) {
        throw std::invalid_argument(where + " must hold 4 values");
      }
      std::copy(v.begin(), v.end(), c.cov.begin());
      have_cov = true;
    } else if (key == "sigma") {
      const double s = get_as<double>(value, where);
      c.cov = {s * s, 0.0, 0.0, s * s};
      have_sigma = true;
    } else {
      throw std::invalid_argument("unknown config key: " + where);
    }
  }
  if (have_cov == have_sigma) {
    throw std::invalid_argument(fmt::format(
        "eid_components[{}] needs exactly one of 'cov' or 'sigma'", index));
  }
  return c;
}

Side parse_side(const json& value) {
  const auto s = get_as<std::string>(value, "two_state.start");
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  throw std::invalid_argument("two_state.start must be \"left\" or \"right\"");
}

void apply_optimizer(const json& j, OptimizerConfig& opt) {
  if (!j.is_object()) {
    throw std::invalid_argument("config key 'optimizer' must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    const std::string where = "optimizer." + key;
    if (key == "max_iters") {
      opt.max_iters = get_as<int>(value, where);
    } else if (key == "score_target") {
      opt.score_target = value.is_null()
                             ? std::nullopt
                             : std::optional(get_as<double>(value, where));
    } else if (key == "grad_tol") {
      opt.grad_tol = get_as<double>(value, where);
    } else if (key == "control_penalty") {
      opt.control_penalty = get_as<double>(value, where);
    } else if (key == "barrier_weight") {
      opt.barrier_weight = get_as<double>(value, where);
    } else if (key == "step_init") {
      opt.step_init = get_as<double>(value, where);
    } else if (key == "armijo_c") {
      opt.armijo_c = get_as<double>(value, where);
    } else if (key == "backtrack_ratio") {
      opt.backtrack_ratio = get_as<double>(value, where);
    } else if (key == "seed") {
      opt.seed = get_as<std::uint64_t>(value, where);
    } else if (key == "weight_exponent") {
      opt.weight_exponent = value.is_null()
                                ? std::nullopt
                                : std::optional(get_as<double>(value, where));
    } else {
      throw std::invalid_argument("unknown config key: " + where);
    }
  }
}

void apply_two_state(const json& j, TwoStateSpec& spec) {
  if (!j.is_object()) {
    throw std::invalid_argument("config key 'two_state' must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    const std::string where = "two_state." + key;
    if (key == "info_left") {
      spec.info_left = get_as<double>(value, where);
    } else if (key == "info_right") {
      spec.info_right = get_as<double>(value, where);
    } else if (key == "rate") {
      spec.rate = get_as<double>(value, where);
    } else if (key == "switch_cost") {
      spec.switch_cost = get_as<double>(value, where);
    } else if (key == "start") {
      spec.start = parse_side(value);
    } else {
      throw std::invalid_argument("unknown config key: " + where);
    }
  }
}

void apply_two_post(const json& j, TwoPostSpec& spec) {
  if (!j.is_object()) {
    throw std::invalid_argument("config key 'two_post' must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    const std::string where = "two_post." + key;
    if (key == "sigma_left") {
      spec.sigma_left = get_as<double>(value, where);
    } else if (key == "sigma_right") {
      spec.sigma_right = get_as<double>(value, where);
    } else if (key == "n_measurements") {
      spec.n_measurements = get_as<int>(value, where);
    } else {
      throw std::invalid_argument("unknown config key: " + where);
    }
  }
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path,
                             const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) {
    throw parse_error("cannot open config " + path.string(), 0);
  }
  json j;
  try {
    j = json::parse(in, nullptr, /*allow_exceptions=*/true,
                    /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw parse_error(fmt::format("config {}: {}", path.string(), e.what()),
                      0);
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config root must be a JSON object");
  }
  ExperimentConfig cfg = base;
  for (const auto& [key, value] : j.items()) {
    if (key == "domain_lower") {
      cfg.domain_lower = get_as<std::vector<double>>(value, key);
    } else if (key == "domain_upper") {
      cfg.domain_upper = get_as<std::vector<double>>(value, key);
    } else if (key == "eid_components") {
      if (!value.is_array()) {
        throw std::invalid_argument("eid_components must be an array");
      }
      cfg.eid_components.clear();
      for (std::size_t i = 0; i < value.size(); ++i) {
        cfg.eid_components.push_back(parse_component(value[i], i));
      }
    } else if (key == "grid_resolution") {
      cfg.grid_resolution = get_as<std::vector<int>>(value, key);
    } else if (key == "field_resolution") {
      cfg.field_resolution = get_as<std::vector<int>>(value, key);
    } else if (key == "rate") {
      cfg.rate = get_as<double>(value, key);
    } else if (key == "order") {
      cfg.order = get_as<int>(value, key);
    } else if (key == "n_steps") {
      cfg.n_steps = get_as<int>(value, key);
    } else if (key == "dt") {
      cfg.dt = get_as<double>(value, key);
    } else if (key == "start") {
      cfg.start = get_as<std::vector<double>>(value, key);
    } else if (key == "optimizer") {
      apply_optimizer(value, cfg.optimizer);
    } else if (key == "score_targets") {
      cfg.score_targets = get_as<std::vector<double>>(value, key);
    } else if (key == "two_state") {
      apply_two_state(value, cfg.two_state);
    } else if (key == "two_post") {
      apply_two_post(value, cfg.two_post);
    } else if (key == "output_dir") {
      cfg.output_dir = get_as<std::string>(value, key);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  cfg.validate();
  return cfg;
}

SweepResult cmd_score_sweep(const ExperimentConfig& config) {
  config.validate();
  const auto outdir = prepare_outdir(config);
  const Domain dom = config.domain();
  const DensityField field =
      build_eid(config.eid(false), dom, config.field_resolution);
  const InfoGrid info =
      discretize(field, config.grid_resolution, config.rate);
  const OptimizerConfig base_opt = planner_config(config);
  const CoefficientSet field_coeffs =
      decompose_field(field, base_opt.order, base_opt.weight_exponent);
  const double total = info.initial_total();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  SweepResult result;
  for (std::size_t i = 0; i < config.score_targets.size(); ++i) {
    const double target = config.score_targets[i];
    OptimizerConfig opt = base_opt;
    opt.score_target = target;
    // Sweep rows chart the reachable span of the spectral score itself, so
    // the control-effort penalty is disabled here: any positive penalty puts
    // a floor on the achievable score and the tighter targets sit below it.
    // The optimize/horizon commands keep the configured penalty.
    opt.control_penalty = 0.0;
    SweepRow row{"pto", target, nan, nan, nan, "ok"};
    try {
      const OptimizeReport rep =
          optimize(config.start, config.n_steps, config.dt, field, opt);
      const CollectionResult sim = simulate_collection(info, rep.trajectory);
      row.achieved_score = rep.score_history.back();
      row.info_pct = pct(sim.collected, total);
      row.effort = effort(rep.trajectory);
      write_trajectory_csv(outdir / fmt::format("sweep_pto_{}.csv", i),
                           rep.trajectory, stamp(config));
      write_report_csv(outdir / fmt::format("sweep_pto_{}_report.csv", i), rep,
                       stamp(config));
    } catch (const std::exception& e) {
      row.status = e.what();
    }
    result.rows.push_back(std::move(row));
  }

  {
    SweepRow row{"greedy", std::nullopt, nan, nan, nan, "ok"};
    try {
      const Trajectory greedy =
          greedy_plan(info, config.start, config.n_steps, config.dt);
      const CollectionResult sim = simulate_collection(info, greedy);
      row.achieved_score = plain_score(greedy, field_coeffs, base_opt);
      row.info_pct = pct(sim.collected, total);
      row.effort = effort(greedy);
      write_trajectory_csv(outdir / "sweep_greedy.csv", greedy, stamp(config));
    } catch (const std::exception& e) {
      row.status = e.what();
    }
    result.rows.push_back(std::move(row));
  }

  result.rows.push_back(SweepRow{"external", std::nullopt,
                                 kExternalPlannerScore, kExternalPlannerInfoPct,
                                 nan, "ok"});

  result.csv_path = outdir / "score_sweep.csv";
  auto out = open_csv(result.csv_path, config,
                      "method,score_target,achieved_score,info_pct,effort,status");
  for (const auto& row : result.rows) {
    out << fmt::format("{},{},{},{},{},{}\n", row.method,
                       opt_str(row.score_target), num(row.achieved_score),
                       num(row.info_pct), num(row.effort), row.status);
  }
  return result;
}

HorizonResult cmd_horizon(const ExperimentConfig& config) {
  config.validate();
  if (config.n_steps % 2 != 0) {
    throw std::invalid_argument(
        "horizon comparison needs an even n_steps to split in half");
  }
  const auto outdir = prepare_outdir(config);
  const Domain dom = config.domain();
  const DensityField field =
      build_eid(config.eid(true), dom, config.field_resolution);
  const InfoGrid info =
      discretize(field, config.grid_resolution, config.rate);
  const OptimizerConfig opt = planner_config(config);
  const CoefficientSet field_coeffs =
      decompose_field(field, opt.order, opt.weight_exponent);
  const double total = info.initial_total();

  const OptimizeReport single =
      optimize(config.start, config.n_steps, config.dt, field, opt);
  const Trajectory composite =
      composite_plan(config.start, {config.n_steps / 2, config.n_steps / 2},
                     config.dt, field, opt);

  HorizonResult result;
  const CollectionResult sim_single = simulate_collection(info, single.trajectory);
  result.rows.push_back(HorizonRow{
      "single", pct(sim_single.collected, total), effort(single.trajectory), 0,
      plain_score(single.trajectory, field_coeffs, opt)});
  const CollectionResult sim_comp = simulate_collection(info, composite);
  result.rows.push_back(HorizonRow{"composite", pct(sim_comp.collected, total),
                                   effort(composite), 1,
                                   plain_score(composite, field_coeffs, opt)});

  write_trajectory_csv(outdir / "horizon_single.csv", single.trajectory,
                       stamp(config));
  write_trajectory_csv(outdir / "horizon_composite.csv", composite,
                       stamp(config));
  result.csv_path = outdir / "horizon.csv";
  auto out = open_csv(result.csv_path, config,
                      "variant,info_pct,effort,switches,achieved_score");
  for (const auto& row : result.rows) {
    out << fmt::format("{},{},{},{},{}\n", row.variant, row.info_pct,
                       row.effort, row.switches, row.achieved_score);
  }
  return result;
}

ReconstructResult cmd_reconstruct(const ExperimentConfig& config,
                                  const std::filesystem::path& field_file,
                                  const std::filesystem::path& traj_file,
                                  const std::vector<int>& orders) {
  config.validate();
  if (orders.empty()) {
    throw std::invalid_argument("reconstruct needs at least one order");
  }
  const auto outdir = prepare_outdir(config);
  const DensityField field = normalize(read_grid_file(field_file));
  const Trajectory traj =
      read_trajectory_csv(traj_file, field.domain(), config.dt);
  std::vector<std::vector<double>> points(traj.states().begin() + 1,
                                          traj.states().end());
  const DensityField hist = point_histogram(points, field.shape());

  ReconstructResult result;
  for (int k : orders) {
    if (k < 1) throw std::invalid_argument("orders must be >= 1");
    const RawField field_recon = reconstruct_field(
        decompose_field(field, k), field.shape().resolution());
    const RawField traj_recon = reconstruct_field(
        decompose_trajectory(traj, k), field.shape().resolution());
    result.rows.push_back(ReconstructRow{
        k, l2_distance(field_recon, field.raw()),
        l2_distance(traj_recon, hist.raw())});
    write_grid_file(outdir / fmt::format("reconstruct_field_k{}.grid", k),
                    field_recon);
    write_grid_file(outdir / fmt::format("reconstruct_traj_k{}.grid", k),
                    traj_recon);
  }

  result.csv_path = outdir / "reconstruct_errors.csv";
  auto out = open_csv(result.csv_path, config,
                      "order,field_l2_error,traj_l2_error");
  for (const auto& row : result.rows) {
    out << fmt::format("{},{},{}\n", row.order, row.field_l2_error,
                       row.traj_l2_error);
  }
  return result;
}

ResidualResult cmd_residual(const ExperimentConfig& config,
                            const std::filesystem::path& field_file,
                            const std::filesystem::path& traj_file,
                            double split_fraction) {
  config.validate();
  if (!(split_fraction > 0.0) || !(split_fraction < 1.0)) {
    throw std::invalid_argument("split fraction must be in (0, 1)");
  }
  const auto outdir = prepare_outdir(config);
  const DensityField field = normalize(read_grid_file(field_file));
  const Trajectory traj =
      read_trajectory_csv(traj_file, field.domain(), config.dt);
  if (traj.steps() < 2) {
    throw std::invalid_argument("splitting needs at least 2 steps");
  }
  int n_a = static_cast<int>(std::floor(split_fraction * traj.steps() + 0.5));
  n_a = std::clamp(n_a, 1, traj.steps() - 1);

  const Trajectory executed = traj.prefix(n_a);
  const PartialTrajectoryContext ctx(
      decompose_trajectory(executed, config.order), executed.horizon(),
      (traj.steps() - n_a) * traj.dt());
  const auto resolution = field.shape().resolution();
  const RawField resid = residual_field(ctx, field, config.order, resolution);
  ResidualResult result;
  result.oversampled_cells =
      oversampled_states(ctx, field, config.order, resolution);
  result.residual_integral = integral(resid);

  result.residual_grid_path = outdir / "residual.grid";
  write_grid_file(result.residual_grid_path, resid);
  result.oversampled_csv_path = outdir / "oversampled.csv";
  auto out = open_csv(result.oversampled_csv_path, config, "cell,x,y");
  for (std::size_t cell : result.oversampled_cells) {
    const auto center = resid.shape.cell_center(cell);
    out << fmt::format("{},{},{}\n", cell, center[0], center[1]);
  }
  return result;
}

ScenarioResult cmd_scenarios(const ExperimentConfig& config) {
  config.validate();
  const auto outdir = prepare_outdir(config);
  const TwoStateSpec& spec = config.two_state;

  // Step counts follow the rate: n1 steps can gather everything exactly when
  // the masses divide by the rate; n2 doubles the schedule.
  const int n1 = static_cast<int>(std::ceil(1.0 / spec.rate));
  const int n2 = 2 * n1;
  const int seg = (n1 % 2 == 0) ? n1 / 2 : n1;

  ScenarioResult result;
  result.two_state_labels = {fmt::format("repeated{}_n{}", seg, n1),
                             fmt::format("perfect_n{}", n1),
                             fmt::format("perfect_n{}", n2)};
  result.two_state_rows.push_back(
      two_state_schedule(spec, n1, SchedulePolicy::repeated_ergodic(seg)));
  result.two_state_rows.push_back(
      two_state_schedule(spec, n1, SchedulePolicy::perfectly_ergodic()));
  result.two_state_rows.push_back(
      two_state_schedule(spec, n2, SchedulePolicy::perfectly_ergodic()));

  result.two_state_csv_path = outdir / "two_state.csv";
  {
    auto out = open_csv(result.two_state_csv_path, config,
                        "label,collected,switches,steps_to_complete,"
                        "zero_collection_steps,switching_cost");
    for (std::size_t i = 0; i < result.two_state_rows.size(); ++i) {
      const auto& row = result.two_state_rows[i];
      out << fmt::format("{},{},{},{},{},{}\n", result.two_state_labels[i],
                         row.collected, row.switches,
                         row.steps_to_complete
                             ? fmt::format("{}", *row.steps_to_complete)
                             : std::string(),
                         row.zero_collection_steps, row.switching_cost);
    }
  }

  const TwoPostSpec& posts = config.two_post;
  result.allocation_ergodic = ergodic_allocation(posts);
  result.variance_ergodic = two_post_variance(posts, result.allocation_ergodic);
  result.variance_all_left = two_post_variance(posts, posts.n_measurements);
  result.two_post_csv_path = outdir / "two_post.csv";
  {
    auto out = open_csv(result.two_post_csv_path, config,
                        "strategy,n_left,variance");
    out << fmt::format("all_left,{},{}\n", posts.n_measurements,
                       result.variance_all_left);
    out << fmt::format("proportional,{},{}\n", result.allocation_ergodic,
                       result.variance_ergodic);
  }
  return result;
}

OptimizeCmdResult cmd_optimize(const ExperimentConfig& config) {
  config.validate();
  const auto outdir = prepare_outdir(config);
  const Domain dom = config.domain();
  const DensityField field =
      build_eid(config.eid(false), dom, config.field_resolution);
  const InfoGrid info =
      discretize(field, config.grid_resolution, config.rate);
  const OptimizerConfig opt = planner_config(config);

  const OptimizeReport rep =
      optimize(config.start, config.n_steps, config.dt, field, opt);
  const CollectionResult sim = simulate_collection(info, rep.trajectory);

  OptimizeCmdResult result;
  result.trajectory_csv_path = outdir / "trajectory.csv";
  result.report_csv_path = outdir / "report.csv";
  result.eid_grid_path = outdir / "eid.grid";
  write_trajectory_csv(result.trajectory_csv_path, rep.trajectory,
                       stamp(config));
  write_report_csv(result.report_csv_path, rep, stamp(config));
  write_grid_file(result.eid_grid_path, field);
  result.achieved_score = rep.score_history.back();
  result.info_pct = pct(sim.collected, info.initial_total());
  result.effort = effort(rep.trajectory);
  result.terminated_by = rep.terminated_by;
  return result;
}

SimulateCmdResult cmd_simulate(
    const ExperimentConfig& config, const std::filesystem::path& traj_file,
    const std::optional<std::filesystem::path>& grid_file) {
  config.validate();
  const auto outdir = prepare_outdir(config);
  std::optional<InfoGrid> grid;
  if (grid_file) {
    grid = read_info_grid(*grid_file);
  } else {
    const DensityField field =
        build_eid(config.eid(false), config.domain(), config.field_resolution);
    grid = discretize(field, config.grid_resolution, config.rate);
  }
  const Trajectory traj =
      read_trajectory_csv(traj_file, grid->shape().domain(), config.dt);
  const CollectionResult sim = simulate_collection(*grid, traj);

  SimulateCmdResult result;
  result.per_step_csv_path = outdir / "per_step.csv";
  {
    auto out = open_csv(result.per_step_csv_path, config, "step,collected");
    for (std::size_t n = 0; n < sim.per_step.size(); ++n) {
      out << fmt::format("{},{}\n", n + 1, sim.per_step[n]);
    }
  }
  result.remaining_grid_path = outdir / "remaining.grid";
  write_info_grid(result.remaining_grid_path, sim.remaining);
  result.collected = sim.collected;
  result.info_pct = pct(sim.collected, grid->initial_total());
  return result;
}

}  // namespace ergo
