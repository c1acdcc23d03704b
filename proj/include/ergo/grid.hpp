#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergo/domain.hpp"

namespace ergo {

// Uniform rectangular grid of cells over a Domain.
//
// Cells are indexed per axis by 0..resolution[a]-1 and flattened with axis 0
// fastest: flat = i0 + res0 * (i1 + res1 * (i2 + ...)). For a 2-D grid this
// makes a row (constant y) contiguous, matching the on-disk layout where each
// line holds one row and row 0 is the lowest y. "Row-major cell index" in tie
// break rules refers to this flat index.
class GridShape {
 public:
  GridShape(Domain domain, std::vector<int> resolution);

  const Domain& domain() const { return domain_; }
  const std::vector<int>& resolution() const { return res_; }
  int dim() const { return domain_.dim(); }
  std::size_t cell_count() const { return count_; }
  double cell_volume() const { return cell_volume_; }
  double cell_width(int axis) const {
    return domain_.extent(axis) / res_[axis];
  }

  std::vector<double> cell_center(std::size_t flat) const;
  void cell_coords(std::size_t flat, std::span<int> out) const;
  std::size_t flat_index(std::span<const int> coords) const;

  // Cell containing x. Cells are half-open [edge_i, edge_{i+1}) except the
  // last cell on each axis, which is closed so the upper boundary belongs to
  // the grid. Returns nullopt for points outside the domain.
  std::optional<std::size_t> cell_of(std::span<const double> x) const;

  bool operator==(const GridShape& other) const = default;

 private:
  Domain domain_;
  std::vector<int> res_;
  std::size_t count_;
  double cell_volume_;
};

// Signed per-cell values on a grid; no normalization or sign constraint.
// Used for raw reconstructions and other intermediate fields.
struct RawField {
  GridShape shape;
  std::vector<double> values;

  RawField(GridShape s, std::vector<double> v);
};

// Nonnegative per-cell density integrating to 1 over the domain
// (midpoint rule: sum(values) * cell_volume == 1 within 1e-9).
// Construction validates both properties; the payload is immutable after.
class DensityField {
 public:
  explicit DensityField(RawField raw);
  DensityField(GridShape shape, std::vector<double> values);

  const GridShape& shape() const { return raw_.shape; }
  const Domain& domain() const { return raw_.shape.domain(); }
  const std::vector<double>& values() const { return raw_.values; }
  double value(std::size_t flat) const { return raw_.values[flat]; }
  const RawField& raw() const { return raw_; }

 private:
  RawField raw_;
};

// Integral of a raw field under the midpoint rule.
double integral(const RawField& field);

// Rescale a nonnegative raw field to integrate to 1.
// Throws std::invalid_argument on negative values or zero total mass.
DensityField normalize(const RawField& field);

// Clamp negative values to zero, then normalize. The explicit name marks the
// (lossy) conversion from a signed reconstruction to a usable density.
DensityField clamp_normalize(const RawField& field);

// L2 distance between two fields on the same grid:
// sqrt(sum((a-b)^2) * cell_volume). Throws on shape mismatch.
double l2_distance(const RawField& a, const RawField& b);

// Empirical density of a point set: per-cell count / (n_points * cell_volume).
// Throws domain_violation if any point is outside the grid's domain.
DensityField point_histogram(const std::vector<std::vector<double>>& points,
                             const GridShape& shape);

// --- Grid file format (2-D) -------------------------------------------------
//
//   resX resY x0 y0 x1 y1
//   v(0,0)   v(1,0)   ... v(resX-1,0)      <- row 0, lowest y
//   ...
//   v(0,resY-1)       ... v(resX-1,resY-1)
//
// Lines starting with '#' are skipped. Values are whitespace separated.

RawField read_grid_file(const std::filesystem::path& path);
void write_grid_file(const std::filesystem::path& path, const RawField& field);
void write_grid_file(const std::filesystem::path& path,
                     const DensityField& field);

}  // namespace ergo
