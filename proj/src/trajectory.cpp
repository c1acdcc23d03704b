#include "ergo/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "ergo/errors.hpp"

namespace ergo {

Trajectory::Trajectory(std::vector<std::vector<double>> states,
                       std::vector<std::vector<double>> controls, double dt,
                       Domain domain)
    : states_(std::move(states)),
      controls_(std::move(controls)),
      dt_(dt),
      domain_(std::move(domain)) {}

Trajectory Trajectory::from_controls(std::span<const double> start,
                                     std::vector<std::vector<double>> controls,
                                     double dt, Domain domain) {
  require_dim(domain, start, "trajectory start");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("trajectory dt must be positive and finite");
  }
  const int s = domain.dim();
  std::vector<std::vector<double>> states;
  states.reserve(controls.size() + 1);
  states.emplace_back(start.begin(), start.end());
  for (std::size_t n = 0; n < controls.size(); ++n) {
    if (static_cast<int>(controls[n].size()) != s) {
      throw std::invalid_argument("control " + std::to_string(n) +
                                  " has wrong dimension");
    }
    std::vector<double> next(s);
    for (int a = 0; a < s; ++a) {
      next[a] = states.back()[a] + controls[n][a] * dt;
    }
    states.push_back(std::move(next));
  }
  return Trajectory(std::move(states), std::move(controls), dt,
                    std::move(domain));
}

Trajectory Trajectory::from_states(std::vector<std::vector<double>> states,
                                   std::vector<std::vector<double>> controls,
                                   double dt, Domain domain, double tol) {
  if (states.size() != controls.size() + 1) {
    throw std::invalid_argument(
        "trajectory needs exactly one more state than controls");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("trajectory dt must be positive and finite");
  }
  const int s = domain.dim();
  for (const auto& x : states) {
    if (static_cast<int>(x.size()) != s) {
      throw std::invalid_argument("state dimension mismatch");
    }
  }
  for (std::size_t n = 0; n < controls.size(); ++n) {
    if (static_cast<int>(controls[n].size()) != s) {
      throw std::invalid_argument("control dimension mismatch");
    }
    for (int a = 0; a < s; ++a) {
      const double predicted = states[n][a] + controls[n][a] * dt;
      if (std::abs(predicted - states[n + 1][a]) > tol) {
        throw std::invalid_argument(fmt::format(
            "states/controls are dynamically inconsistent at step {} axis {}: "
            "|{} - {}| > {}",
            n, a, predicted, states[n + 1][a], tol));
      }
    }
  }
  return Trajectory(std::move(states), std::move(controls), dt,
                    std::move(domain));
}

Trajectory Trajectory::prefix(int n_steps) const {
  if (n_steps < 0 || n_steps > steps()) {
    throw std::invalid_argument("prefix length out of range");
  }
  std::vector<std::vector<double>> states(states_.begin(),
                                          states_.begin() + n_steps + 1);
  std::vector<std::vector<double>> controls(controls_.begin(),
                                            controls_.begin() + n_steps);
  return Trajectory(std::move(states), std::move(controls), dt_, domain_);
}

Trajectory rollout(std::span<const double> start,
                   const std::vector<std::vector<double>>& controls, double dt,
                   Domain domain) {
  return Trajectory::from_controls(start, controls, dt, std::move(domain));
}

Trajectory concatenate(const Trajectory& a, const Trajectory& b) {
  if (!(a.domain() == b.domain())) {
    throw std::invalid_argument("concatenate: domains differ");
  }
  if (a.dt() != b.dt()) {
    throw std::invalid_argument("concatenate: dt differs");
  }
  const auto& junction_a = a.states().back();
  const auto& junction_b = b.states().front();
  for (std::size_t i = 0; i < junction_a.size(); ++i) {
    if (std::abs(junction_a[i] - junction_b[i]) > 1e-12) {
      throw std::invalid_argument(
          "concatenate: second trajectory does not start at the first's end");
    }
  }
  std::vector<std::vector<double>> states = a.states();
  states.insert(states.end(), b.states().begin() + 1, b.states().end());
  std::vector<std::vector<double>> controls = a.controls();
  controls.insert(controls.end(), b.controls().begin(), b.controls().end());
  // The junction state is taken from `a`; b's controls still integrate from
  // it because the two agree within 1e-12 -- re-verify rather than trust.
  return Trajectory::from_states(std::move(states), std::move(controls),
                                 a.dt(), a.domain(), 1e-9);
}

double effort(const Trajectory& traj, bool dt_weighted) {
  double total = 0.0;
  for (const auto& u : traj.controls()) {
    double sq = 0.0;
    for (double c : u) sq += c * c;
    total += std::sqrt(sq);
  }
  return dt_weighted ? total * traj.dt() : total;
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj, const std::string& comment) {
  if (traj.domain().dim() != 2) {
    throw std::invalid_argument("trajectory CSV is 2-D only");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write trajectory CSV " + path.string());
  }
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "n,x,y,ux,uy\n";
  const int n_steps = traj.steps();
  for (int n = 0; n <= n_steps; ++n) {
    const auto& x = traj.state(n);
    if (n < n_steps) {
      const auto& u = traj.controls()[n];
      out << fmt::format("{},{},{},{},{}\n", n, x[0], x[1], u[0], u[1]);
    } else {
      out << fmt::format("{},{},{},,\n", n, x[0], x[1]);
    }
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path,
                               const Domain& domain, double dt) {
  if (domain.dim() != 2) {
    throw std::invalid_argument("trajectory CSV is 2-D only");
  }
  std::ifstream in(path);
  if (!in) {
    throw parse_error("cannot open trajectory CSV " + path.string(), 0);
  }
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> controls;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  bool saw_last_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;  // header row: n,x,y,ux,uy
      continue;
    }
    if (saw_last_row) {
      throw parse_error("rows continue after the terminal state", line_no);
    }
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    // A trailing empty field ("...,,") is dropped by getline; restore it.
    while (cells.size() < 5) cells.emplace_back();
    if (cells.size() != 5) {
      throw parse_error("expected 5 columns (n,x,y,ux,uy)", line_no);
    }
    try {
      const int n = std::stoi(cells[0]);
      if (n != static_cast<int>(states.size())) {
        throw parse_error("row index " + cells[0] + " out of order", line_no);
      }
      states.push_back({std::stod(cells[1]), std::stod(cells[2])});
      const bool has_ux = !cells[3].empty();
      const bool has_uy = !cells[4].empty();
      if (has_ux != has_uy) {
        throw parse_error("control columns must be both present or both blank",
                          line_no);
      }
      if (has_ux) {
        controls.push_back({std::stod(cells[3]), std::stod(cells[4])});
      } else {
        saw_last_row = true;
      }
    } catch (const std::invalid_argument&) {
      throw parse_error("malformed numeric value", line_no);
    } catch (const std::out_of_range&) {
      throw parse_error("numeric value out of range", line_no);
    }
  }
  if (!saw_last_row || states.empty()) {
    throw parse_error("trajectory CSV missing its terminal (blank-control) row",
                      line_no);
  }
  // Text round-trips are exact (shortest-round-trip formatting), but accept
  // files from other writers that kept fewer digits.
  return Trajectory::from_states(std::move(states), std::move(controls), dt,
                                 domain, 1e-6);
}

}  // namespace ergo
