#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ergo/grid.hpp"
#include "ergo/trajectory.hpp"

namespace ergo {

// One Gaussian component of an expected-information-density mixture (2-D).
// cov is row-major {cxx, cxy, cyx, cyy} and must be symmetric positive
// definite.
struct GaussianComponent {
  std::vector<double> mean;
  std::array<double, 4> cov;
  double weight;
};

// Mixture specification. Component weights must be positive and sum to 1
// (within 1e-9). Construction validates; throws std::invalid_argument.
class EidSpec {
 public:
  explicit EidSpec(std::vector<GaussianComponent> components);
  const std::vector<GaussianComponent>& components() const {
    return components_;
  }

 private:
  std::vector<GaussianComponent> components_;
};

// Evaluate the mixture at cell centers of a 2-D grid and renormalize so the
// truncated-to-domain density integrates to exactly 1 under the midpoint
// rule.
DensityField build_eid(const EidSpec& spec, const Domain& domain,
                       const std::vector<int>& resolution);

// Per-cell information that remains to be collected, plus the collection
// rate per step. Values are masses (cell density * cell volume), not
// densities. A freshly discretized grid totals 1 within 1e-9.
class InfoGrid {
 public:
  InfoGrid(GridShape shape, std::vector<double> remaining, double rate);

  const GridShape& shape() const { return shape_; }
  const std::vector<double>& remaining() const { return remaining_; }
  double remaining(std::size_t cell) const { return remaining_[cell]; }
  double rate() const { return rate_; }
  // Sum of `remaining` at construction; collection bookkeeping is relative
  // to this.
  double initial_total() const { return initial_total_; }
  double total_remaining() const;

 private:
  friend InfoGrid replace_remaining(const InfoGrid& grid,
                                    std::vector<double> remaining);

  GridShape shape_;
  std::vector<double> remaining_;
  double rate_;
  double initial_total_;
};

// Copy of `grid` with new remaining masses but the same shape, rate, and
// initial_total, so conservation bookkeeping stays anchored to the original
// starting total across collection passes.
InfoGrid replace_remaining(const InfoGrid& grid, std::vector<double> remaining);

// Aggregate a density's mass onto a coarser grid. The field's resolution
// must be a positive integer multiple of `resolution` on every axis, so that
// refining and re-aggregating commute exactly.
InfoGrid discretize(const DensityField& field,
                    const std::vector<int>& resolution, double rate);

struct CollectionResult {
  double collected;              // sum over cells of (before - after)
  InfoGrid remaining;            // grid state after the pass
  std::vector<double> per_step;  // amount gathered at each of the N steps
};

// Run the linear collection model over the trajectory's N step states
// (states[1..N]; the start collects nothing):
//
//   gain at step n = min(rate, remaining[cell(x_n)]),
//
// and zero when x_n is outside the domain. Within one pass the depletion of
// each cell is evaluated in closed form, remaining = max(0, m - visits*rate),
// so a cell whose mass is an exact multiple of the rate reaches exactly zero
// and later visits collect exactly nothing. `collected` is accumulated per
// cell (start mass minus final mass, summed in cell order), which makes it
// independent of the visit order for a fixed visit multiset.
CollectionResult simulate_collection(const InfoGrid& grid,
                                     const Trajectory& traj);

// --- Info grid file -----------------------------------------------------------
//
// Same layout as the density grid file with the rate appended to the header:
//
//   resX resY x0 y0 x1 y1 rate
//
// Values are remaining masses. initial_total is not stored; loading a grid
// restarts bookkeeping from the stored remaining values.

void write_info_grid(const std::filesystem::path& path, const InfoGrid& grid);
InfoGrid read_info_grid(const std::filesystem::path& path);

}  // namespace ergo
