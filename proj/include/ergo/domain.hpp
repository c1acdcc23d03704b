#pragma once

#include <span>
#include <vector>

namespace ergo {

// Axis-aligned box in R^s. All spatial quantities in the library (fields,
// trajectories, basis functions) are defined relative to one of these.
class Domain {
 public:
  // Throws std::invalid_argument unless lower/upper have equal nonzero
  // length and lower[i] < upper[i] on every axis.
  Domain(std::vector<double> lower, std::vector<double> upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  double extent(int axis) const { return upper_[axis] - lower_[axis]; }
  double volume() const;

  bool contains(std::span<const double> x) const;

  bool operator==(const Domain& other) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

// Throws std::invalid_argument if x.size() != domain.dim().
void require_dim(const Domain& domain, std::span<const double> x,
                 const char* what);

// Throws domain_violation if x is outside the closed box.
void require_inside(const Domain& domain, std::span<const double> x,
                    const char* what);

}  // namespace ergo
