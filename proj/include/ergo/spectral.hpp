#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergo/grid.hpp"
#include "ergo/trajectory.hpp"

namespace ergo {

// Separable cosine basis on an axis-aligned box X = prod_i [l_i, u_i]:
//
//   F_k(x) = (1/h_k) * prod_i cos(k_i * pi * (x_i - l_i) / L_i),   L_i = u_i - l_i
//
// indexed by multi-indices k in {0..K}^s (order K applies per axis, so a set
// of order K holds (K+1)^s coefficients). The normalizer
//
//   h_k = sqrt(prod_i (L_i        if k_i == 0
//                      L_i / 2    otherwise))
//
// makes the family orthonormal in L2(X): integral of F_k * F_k' over X equals
// delta(k, k'). Projections of a density and of a trajectory's empirical
// distribution onto this basis are directly comparable; both sides of the
// library (field decomposition, trajectory decomposition) meet here.
//
// Spatial frequency grows with |k|, so coefficient indices are ordered by the
// Euclidean norm |k| when a notion of "low/high frequency" is needed, and the
// default comparison weights
//
//   w_k = (1 + |k|^2)^(-(s+1)/2)
//
// decay with frequency (exponent configurable via `weight_exponent`).

double basis_norm(const Domain& domain, std::span<const int> k);
double basis_eval(const Domain& domain, std::span<const int> k,
                  std::span<const double> x);
std::vector<double> basis_grad(const Domain& domain, std::span<const int> k,
                               std::span<const double> x);

// Default weight exponent for dimension s: (s + 1) / 2.
double default_weight_exponent(int dim);

// Weights (1 + |k|^2)^(-exponent) over all (K+1)^s multi-indices,
// in the flat order described below.
std::vector<double> frequency_weights(int dim, int order, double exponent);

// Immutable coefficient vector over all multi-indices k in {0..K}^s, paired
// with its comparison weights. Flat storage is row-major in the multi-index
// (last axis fastest): flat = ((k_0*(K+1) + k_1)*(K+1) + ...) + k_{s-1}.
class CoefficientSet {
 public:
  CoefficientSet(Domain domain, int order, std::vector<double> coeffs,
                 std::vector<double> weights);

  const Domain& domain() const { return domain_; }
  int order() const { return order_; }
  int dim() const { return domain_.dim(); }
  std::size_t size() const { return coeffs_.size(); }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::vector<double>& weights() const { return weights_; }
  double coeff(std::size_t flat) const { return coeffs_[flat]; }
  double weight(std::size_t flat) const { return weights_[flat]; }

  std::size_t index_of(std::span<const int> k) const;
  std::vector<int> multi_index(std::size_t flat) const;

  // True when domain, order, and weights all match exactly; coefficient sets
  // are only comparable/combinable in that case.
  bool compatible(const CoefficientSet& other) const;

 private:
  Domain domain_;
  int order_;
  std::vector<double> coeffs_;
  std::vector<double> weights_;
};

// Projection of a gridded field onto the basis by the midpoint rule:
//
//   coeff_k = sum_cells value(cell) * F_k(center) * cell_volume.
//
// Accepts signed fields; a normalized density yields coeff_0 = 1/sqrt(V).
CoefficientSet decompose_field(const RawField& field, int order,
                               std::optional<double> weight_exponent = {});
CoefficientSet decompose_field(const DensityField& field, int order,
                               std::optional<double> weight_exponent = {});

// Projection of the trajectory's empirical distribution (equal point masses
// at states[1..N]):
//
//   coeff_k = (1/N) * sum_{n=1..N} F_k(states[n]).
//
// Throws domain_violation if any of those states leaves the domain.
CoefficientSet decompose_trajectory(const Trajectory& traj, int order,
                                    std::optional<double> weight_exponent = {});

// Same projection for a bare point set (each point one unit of weight).
CoefficientSet decompose_points(const std::vector<std::vector<double>>& points,
                                const Domain& domain, int order,
                                std::optional<double> weight_exponent = {});

// Truncated basis expansion sum_k coeff_k * F_k evaluated at cell centers of
// a fresh grid. The result is signed: truncation can undershoot zero.
RawField reconstruct_field(const CoefficientSet& coeffs,
                           const std::vector<int>& resolution);

// --- Coefficient CSV ----------------------------------------------------------
//
//   k1,...,ks,coeff,weight     (header row; one row per multi-index)
//
// The domain is not stored; readers supply it. Rows must form the complete
// set {0..K}^s for some K.

void write_coefficients_csv(const std::filesystem::path& path,
                            const CoefficientSet& coeffs,
                            const std::string& comment = "");
CoefficientSet read_coefficients_csv(const std::filesystem::path& path,
                                     const Domain& domain);

}  // namespace ergo
