#include "ergo/infosim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "ergo/errors.hpp"

namespace ergo {

EidSpec::EidSpec(std::vector<GaussianComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw std::invalid_argument("mixture needs at least one component");
  }
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    if (c.mean.size() != 2) {
      throw std::invalid_argument("mixture components are 2-D (mean size 2)");
    }
    if (!(c.weight > 0.0)) {
      throw std::invalid_argument("component weights must be positive");
    }
    // 2x2 SPD: symmetric with positive diagonal and determinant.
    const double cxx = c.cov[0], cxy = c.cov[1], cyx = c.cov[2],
                 cyy = c.cov[3];
    const double det = cxx * cyy - cxy * cyx;
    if (cxy != cyx || !(cxx > 0.0) || !(cyy > 0.0) || !(det > 0.0)) {
      throw std::invalid_argument(fmt::format(
          "component {} covariance is not symmetric positive definite", i));
    }
    weight_sum += c.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    throw std::invalid_argument(
        fmt::format("component weights sum to {} instead of 1", weight_sum));
  }
}

DensityField build_eid(const EidSpec& spec, const Domain& domain,
                       const std::vector<int>& resolution) {
  if (domain.dim() != 2) {
    throw std::invalid_argument("mixture densities are 2-D");
  }
  GridShape shape(domain, resolution);
  std::vector<double> values(shape.cell_count(), 0.0);
  for (const auto& c : spec.components()) {
    const double det = c.cov[0] * c.cov[3] - c.cov[1] * c.cov[2];
    const double ixx = c.cov[3] / det;
    const double ixy = -c.cov[1] / det;
    const double iyy = c.cov[0] / det;
    const double norm =
        c.weight / (2.0 * std::numbers::pi * std::sqrt(det));
    for (std::size_t cell = 0; cell < values.size(); ++cell) {
      const auto x = shape.cell_center(cell);
      const double dx = x[0] - c.mean[0];
      const double dy = x[1] - c.mean[1];
      const double q = dx * (ixx * dx + ixy * dy) + dy * (ixy * dx + iyy * dy);
      values[cell] += norm * std::exp(-0.5 * q);
    }
  }
  // Renormalize: the domain truncates the tails, so the raw values integrate
  // to slightly less than 1.
  return normalize(RawField(std::move(shape), std::move(values)));
}

InfoGrid::InfoGrid(GridShape shape, std::vector<double> remaining, double rate)
    : shape_(std::move(shape)), remaining_(std::move(remaining)), rate_(rate) {
  if (remaining_.size() != shape_.cell_count()) {
    throw std::invalid_argument("info grid value count does not match grid");
  }
  if (!(rate_ > 0.0) || !std::isfinite(rate_)) {
    throw std::invalid_argument("collection rate must be positive and finite");
  }
  double total = 0.0;
  for (double m : remaining_) {
    if (!(m >= 0.0)) {
      throw std::invalid_argument("remaining information must be >= 0");
    }
    total += m;
  }
  initial_total_ = total;
}

double InfoGrid::total_remaining() const {
  double total = 0.0;
  for (double m : remaining_) total += m;
  return total;
}

InfoGrid replace_remaining(const InfoGrid& grid,
                           std::vector<double> remaining) {
  InfoGrid out(grid.shape(), std::move(remaining), grid.rate());
  out.initial_total_ = grid.initial_total_;
  return out;
}

InfoGrid discretize(const DensityField& field,
                    const std::vector<int>& resolution, double rate) {
  const GridShape& fine = field.shape();
  const int s = fine.dim();
  if (static_cast<int>(resolution.size()) != s) {
    throw std::invalid_argument("discretize: resolution dimension mismatch");
  }
  std::vector<int> factor(s);
  for (int a = 0; a < s; ++a) {
    if (resolution[a] <= 0 || fine.resolution()[a] % resolution[a] != 0) {
      throw std::invalid_argument(
          "discretize: field resolution must be an integer multiple of the "
          "target resolution on every axis");
    }
    factor[a] = fine.resolution()[a] / resolution[a];
  }
  GridShape coarse(fine.domain(), resolution);
  std::vector<double> mass(coarse.cell_count(), 0.0);
  // Sum fine-cell masses into their enclosing coarse cell; aggregation at
  // matching resolutions is the identity, so refining then re-aggregating
  // reproduces the direct discretization exactly.
  std::vector<int> fc(s), cc(s);
  for (std::size_t cell = 0; cell < fine.cell_count(); ++cell) {
    fine.cell_coords(cell, fc);
    for (int a = 0; a < s; ++a) cc[a] = fc[a] / factor[a];
    mass[coarse.flat_index(cc)] += field.value(cell) * fine.cell_volume();
  }
  return InfoGrid(std::move(coarse), std::move(mass), rate);
}

CollectionResult simulate_collection(const InfoGrid& grid,
                                     const Trajectory& traj) {
  const GridShape& shape = grid.shape();
  if (!(shape.domain() == traj.domain())) {
    throw std::invalid_argument(
        "simulate_collection: trajectory and grid domains differ");
  }
  const double rate = grid.rate();
  const int n_steps = traj.steps();
  // Closed-form depletion: per cell, remaining after t visits is
  // max(0, m - t*rate). Computing it fresh from the visit count (instead of
  // accumulating subtractions) keeps masses that are exact multiples of the
  // rate landing on exactly zero.
  std::vector<int> visits(shape.cell_count(), 0);
  std::vector<double> per_step(n_steps, 0.0);
  auto remaining_after = [&](std::size_t cell, int t) {
    return std::max(0.0, grid.remaining(cell) - static_cast<double>(t) * rate);
  };
  for (int n = 1; n <= n_steps; ++n) {
    const auto cell = shape.cell_of(traj.state(n));
    if (!cell) continue;  // outside the domain: nothing to collect
    const double before = remaining_after(*cell, visits[*cell]);
    ++visits[*cell];
    const double after = remaining_after(*cell, visits[*cell]);
    per_step[n - 1] = std::min(before - after, rate);
  }
  std::vector<double> final_remaining(shape.cell_count());
  double collected = 0.0;
  for (std::size_t cell = 0; cell < shape.cell_count(); ++cell) {
    final_remaining[cell] = remaining_after(cell, visits[cell]);
    collected += grid.remaining(cell) - final_remaining[cell];
  }
  return CollectionResult{collected,
                          replace_remaining(grid, std::move(final_remaining)),
                          std::move(per_step)};
}

void write_info_grid(const std::filesystem::path& path, const InfoGrid& grid) {
  if (grid.shape().dim() != 2) {
    throw std::invalid_argument("info grid files are 2-D only");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write info grid " + path.string());
  }
  const auto& d = grid.shape().domain();
  out << fmt::format("{} {} {} {} {} {} {}\n", grid.shape().resolution()[0],
                     grid.shape().resolution()[1], d.lower(0), d.lower(1),
                     d.upper(0), d.upper(1), grid.rate());
  const int rx = grid.shape().resolution()[0];
  const int ry = grid.shape().resolution()[1];
  for (int iy = 0; iy < ry; ++iy) {
    for (int ix = 0; ix < rx; ++ix) {
      if (ix) out << ' ';
      out << fmt::format("{}",
                         grid.remaining()[static_cast<std::size_t>(iy) * rx + ix]);
    }
    out << '\n';
  }
}

InfoGrid read_info_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw parse_error("cannot open info grid " + path.string(), 0);
  }
  int line_no = 0;
  std::string line;
  auto next_line = [&]() {
    while (std::getline(in, line)) {
      ++line_no;
      std::size_t i = line.find_first_not_of(" \t\r");
      if (i == std::string::npos || line[i] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line()) throw parse_error("info grid file is empty", line_no);
  std::istringstream header(line);
  int rx = 0, ry = 0;
  double x0, y0, x1, y1, rate;
  if (!(header >> rx >> ry >> x0 >> y0 >> x1 >> y1 >> rate)) {
    throw parse_error("info grid header must be: resX resY x0 y0 x1 y1 rate",
                      line_no);
  }
  if (rx <= 0 || ry <= 0) {
    throw parse_error("info grid resolutions must be positive", line_no);
  }
  GridShape shape(Domain({x0, y0}, {x1, y1}), {rx, ry});
  std::vector<double> remaining(shape.cell_count());
  for (int iy = 0; iy < ry; ++iy) {
    if (!next_line()) {
      throw parse_error("info grid ends before row " + std::to_string(iy),
                        line_no);
    }
    std::istringstream row(line);
    for (int ix = 0; ix < rx; ++ix) {
      if (!(row >> remaining[static_cast<std::size_t>(iy) * rx + ix])) {
        throw parse_error("row " + std::to_string(iy) + " is too short",
                          line_no);
      }
    }
  }
  return InfoGrid(std::move(shape), std::move(remaining), rate);
}

}  // namespace ergo
