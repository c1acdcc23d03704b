#include "ergo/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "ergo/errors.hpp"

namespace ergo {

GridShape::GridShape(Domain domain, std::vector<int> resolution)
    : domain_(std::move(domain)), res_(std::move(resolution)) {
  if (static_cast<int>(res_.size()) != domain_.dim()) {
    throw std::invalid_argument("grid resolution dimension mismatch");
  }
  count_ = 1;
  for (int r : res_) {
    if (r <= 0) throw std::invalid_argument("grid resolution must be positive");
    count_ *= static_cast<std::size_t>(r);
  }
  cell_volume_ = domain_.volume() / static_cast<double>(count_);
}

std::vector<double> GridShape::cell_center(std::size_t flat) const {
  std::vector<double> x(dim());
  for (int a = 0; a < dim(); ++a) {
    const std::size_t ia = flat % static_cast<std::size_t>(res_[a]);
    flat /= static_cast<std::size_t>(res_[a]);
    x[a] = domain_.lower(a) +
           (static_cast<double>(ia) + 0.5) * cell_width(a);
  }
  return x;
}

void GridShape::cell_coords(std::size_t flat, std::span<int> out) const {
  for (int a = 0; a < dim(); ++a) {
    out[a] = static_cast<int>(flat % static_cast<std::size_t>(res_[a]));
    flat /= static_cast<std::size_t>(res_[a]);
  }
}

std::size_t GridShape::flat_index(std::span<const int> coords) const {
  std::size_t flat = 0;
  for (int a = dim() - 1; a >= 0; --a) {
    if (coords[a] < 0 || coords[a] >= res_[a]) {
      throw std::invalid_argument("cell coordinate out of range");
    }
    flat = flat * static_cast<std::size_t>(res_[a]) +
           static_cast<std::size_t>(coords[a]);
  }
  return flat;
}

std::optional<std::size_t> GridShape::cell_of(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) {
    throw std::invalid_argument("cell_of: point dimension mismatch");
  }
  if (!domain_.contains(x)) return std::nullopt;
  std::size_t flat = 0;
  for (int a = dim() - 1; a >= 0; --a) {
    double t = (x[a] - domain_.lower(a)) / domain_.extent(a);
    int ia = static_cast<int>(std::floor(t * res_[a]));
    // The domain's upper face belongs to the last cell.
    if (ia >= res_[a]) ia = res_[a] - 1;
    if (ia < 0) ia = 0;
    flat = flat * static_cast<std::size_t>(res_[a]) +
           static_cast<std::size_t>(ia);
  }
  return flat;
}

RawField::RawField(GridShape s, std::vector<double> v)
    : shape(std::move(s)), values(std::move(v)) {
  if (values.size() != shape.cell_count()) {
    throw std::invalid_argument("field value count does not match grid");
  }
}

DensityField::DensityField(RawField raw) : raw_(std::move(raw)) {
  double sum = 0.0;
  for (double v : raw_.values) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("density field has a negative or NaN value");
    }
    sum += v;
  }
  const double mass = sum * raw_.shape.cell_volume();
  if (std::abs(mass - 1.0) > 1e-9) {
    throw std::invalid_argument(
        fmt::format("density field integrates to {} instead of 1", mass));
  }
}

DensityField::DensityField(GridShape shape, std::vector<double> values)
    : DensityField(RawField(std::move(shape), std::move(values))) {}

double integral(const RawField& field) {
  double sum = 0.0;
  for (double v : field.values) sum += v;
  return sum * field.shape.cell_volume();
}

DensityField normalize(const RawField& field) {
  for (double v : field.values) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("normalize: field has negative values; "
                                  "use clamp_normalize for signed fields");
    }
  }
  const double mass = integral(field);
  if (!(mass > 0.0)) {
    throw std::invalid_argument("normalize: field has zero total mass");
  }
  std::vector<double> scaled = field.values;
  for (double& v : scaled) v /= mass;
  return DensityField(field.shape, std::move(scaled));
}

DensityField clamp_normalize(const RawField& field) {
  RawField clamped = field;
  for (double& v : clamped.values) {
    if (v < 0.0) v = 0.0;
  }
  const double mass = integral(clamped);
  if (!(mass > 0.0)) {
    throw std::invalid_argument("clamp_normalize: no positive mass");
  }
  for (double& v : clamped.values) v /= mass;
  return DensityField(std::move(clamped));
}

double l2_distance(const RawField& a, const RawField& b) {
  if (!(a.shape == b.shape)) {
    throw std::invalid_argument("l2_distance: grid shapes differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    acc += d * d;
  }
  return std::sqrt(acc * a.shape.cell_volume());
}

DensityField point_histogram(const std::vector<std::vector<double>>& points,
                             const GridShape& shape) {
  if (points.empty()) {
    throw std::invalid_argument("point_histogram: empty point set");
  }
  std::vector<double> values(shape.cell_count(), 0.0);
  for (const auto& p : points) {
    auto cell = shape.cell_of(p);
    if (!cell) {
      throw domain_violation("point_histogram: point outside the domain");
    }
    values[*cell] += 1.0;
  }
  const double scale =
      1.0 / (static_cast<double>(points.size()) * shape.cell_volume());
  for (double& v : values) v *= scale;
  return DensityField(shape, std::move(values));
}

namespace {

// Read the next non-comment line; returns false at EOF.
bool next_data_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t i = line.find_first_not_of(" \t\r");
    if (i == std::string::npos) continue;
    if (line[i] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

RawField read_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw parse_error("cannot open grid file " + path.string(), 0);
  }
  int line_no = 0;
  std::string line;
  if (!next_data_line(in, line, line_no)) {
    throw parse_error("grid file is empty", line_no);
  }
  std::istringstream header(line);
  int rx = 0, ry = 0;
  double x0, y0, x1, y1;
  if (!(header >> rx >> ry >> x0 >> y0 >> x1 >> y1)) {
    throw parse_error("grid header must be: resX resY x0 y0 x1 y1", line_no);
  }
  if (rx <= 0 || ry <= 0) {
    throw parse_error("grid resolutions must be positive", line_no);
  }
  GridShape shape(Domain({x0, y0}, {x1, y1}), {rx, ry});
  std::vector<double> values(shape.cell_count());
  for (int iy = 0; iy < ry; ++iy) {
    if (!next_data_line(in, line, line_no)) {
      throw parse_error("grid file ends before row " + std::to_string(iy),
                        line_no);
    }
    std::istringstream row(line);
    for (int ix = 0; ix < rx; ++ix) {
      if (!(row >> values[static_cast<std::size_t>(iy) * rx + ix])) {
        throw parse_error("row " + std::to_string(iy) + " has fewer than " +
                              std::to_string(rx) + " values",
                          line_no);
      }
    }
    double extra;
    if (row >> extra) {
      throw parse_error("row " + std::to_string(iy) + " has more than " +
                            std::to_string(rx) + " values",
                        line_no);
    }
  }
  return RawField(std::move(shape), std::move(values));
}

namespace {

void write_grid_impl(const std::filesystem::path& path, const GridShape& shape,
                     const std::vector<double>& values) {
  if (shape.dim() != 2) {
    throw std::invalid_argument("grid files are 2-D only");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write grid file " + path.string());
  }
  const auto& d = shape.domain();
  out << fmt::format("{} {} {} {} {} {}\n", shape.resolution()[0],
                     shape.resolution()[1], d.lower(0), d.lower(1), d.upper(0),
                     d.upper(1));
  const int rx = shape.resolution()[0];
  const int ry = shape.resolution()[1];
  for (int iy = 0; iy < ry; ++iy) {
    for (int ix = 0; ix < rx; ++ix) {
      if (ix) out << ' ';
      out << fmt::format("{}", values[static_cast<std::size_t>(iy) * rx + ix]);
    }
    out << '\n';
  }
}

}  // namespace

void write_grid_file(const std::filesystem::path& path, const RawField& field) {
  write_grid_impl(path, field.shape, field.values);
}

void write_grid_file(const std::filesystem::path& path,
                     const DensityField& field) {
  write_grid_impl(path, field.shape(), field.values());
}

}  // namespace ergo
