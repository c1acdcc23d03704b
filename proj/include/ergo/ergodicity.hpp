#pragma once

#include <cstddef>
#include <vector>

#include "ergo/grid.hpp"
#include "ergo/spectral.hpp"

namespace ergo {

// Weighted spectral distance between a trajectory's empirical distribution
// (coefficients c) and a target density (coefficients phi):
//
//   E(c, phi) = sum_k w_k * (c_k - phi_k)^2.
//
// Zero iff every coefficient matches; small E means time spent in each region
// is proportional to the density's mass there, up to spatial frequency K.
struct ErgodicScore {
  double value;
};

ErgodicScore ergodic_metric(const CoefficientSet& traj_coeffs,
                            const CoefficientSet& field_coeffs);

// An already-executed trajectory prefix (its coefficients and duration) plus
// the duration still to be planned. Supports planning the remainder of a
// mission without re-optimizing the executed part.
class PartialTrajectoryContext {
 public:
  // horizon_a: duration of the executed prefix; horizon_b: duration of the
  // segment to plan. Both must be positive and finite.
  PartialTrajectoryContext(CoefficientSet coeffs_a, double horizon_a,
                           double horizon_b);

  const CoefficientSet& coeffs_a() const { return coeffs_a_; }
  double horizon_a() const { return horizon_a_; }
  double horizon_b() const { return horizon_b_; }
  double total_horizon() const { return horizon_a_ + horizon_b_; }

 private:
  CoefficientSet coeffs_a_;
  double horizon_a_;
  double horizon_b_;
};

// Time-weighted coefficients of the full trajectory given the second
// segment's coefficients:
//
//   c_k = (T_a * c^a_k + T_b * c^b_k) / (T_a + T_b).
//
// This is exactly what decomposing the concatenated trajectory yields.
CoefficientSet combined_coefficients(const PartialTrajectoryContext& ctx,
                                     const CoefficientSet& coeffs_b);

// Residual target for the remaining segment: the density the second segment
// must realize so that the full trajectory matches phi,
//
//   phi'_k = ((T_a + T_b) / T_b) * (phi_k - (T_a / (T_a + T_b)) * c^a_k).
//
// Minimizing E(c^b, phi') is equivalent to minimizing E over the full
// trajectory: the two objectives agree up to the factor (T_b/(T_a+T_b))^2.
// phi' integrates to 1 but can be locally negative wherever the prefix
// already spent more time than the target allots (oversampling).
CoefficientSet residual_coefficients(const PartialTrajectoryContext& ctx,
                                     const CoefficientSet& field_coeffs);

// Residual target as a signed field: decompose phi_field at `order`,
// apply residual_coefficients, reconstruct on `resolution`.
RawField residual_field(const PartialTrajectoryContext& ctx,
                        const DensityField& phi_field, int order,
                        const std::vector<int>& resolution);

// Reconstruction values above this are treated as nonnegative; values below
// are genuine negativity of the residual rather than truncation noise.
inline constexpr double kOversampledTolerance = -1e-9;

// Flat indices of cells where the reconstructed residual is negative beyond
// kOversampledTolerance, sorted ascending: the regions the executed prefix
// has oversampled relative to phi.
std::vector<std::size_t> oversampled_states(const PartialTrajectoryContext& ctx,
                                            const DensityField& phi_field,
                                            int order,
                                            const std::vector<int>& resolution);

}  // namespace ergo
