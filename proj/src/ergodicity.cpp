#include "ergo/ergodicity.hpp"

#include <cmath>
#include <stdexcept>

namespace ergo {

namespace {

void require_compatible(const CoefficientSet& a, const CoefficientSet& b,
                        const char* what) {
  if (!a.compatible(b)) {
    throw std::invalid_argument(std::string(what) +
                                ": coefficient sets differ in domain, order, "
                                "or weights");
  }
}

}  // namespace

ErgodicScore ergodic_metric(const CoefficientSet& traj_coeffs,
                            const CoefficientSet& field_coeffs) {
  require_compatible(traj_coeffs, field_coeffs, "ergodic_metric");
  double score = 0.0;
  for (std::size_t i = 0; i < traj_coeffs.size(); ++i) {
    const double d = traj_coeffs.coeff(i) - field_coeffs.coeff(i);
    score += traj_coeffs.weight(i) * d * d;
  }
  return ErgodicScore{score};
}

PartialTrajectoryContext::PartialTrajectoryContext(CoefficientSet coeffs_a,
                                                   double horizon_a,
                                                   double horizon_b)
    : coeffs_a_(std::move(coeffs_a)),
      horizon_a_(horizon_a),
      horizon_b_(horizon_b) {
  if (!(horizon_a_ > 0.0) || !std::isfinite(horizon_a_) ||
      !(horizon_b_ > 0.0) || !std::isfinite(horizon_b_)) {
    throw std::invalid_argument("both horizons must be positive and finite");
  }
}

CoefficientSet combined_coefficients(const PartialTrajectoryContext& ctx,
                                     const CoefficientSet& coeffs_b) {
  require_compatible(ctx.coeffs_a(), coeffs_b, "combined_coefficients");
  const double ta = ctx.horizon_a();
  const double tb = ctx.horizon_b();
  const double total = ta + tb;
  std::vector<double> combined(coeffs_b.size());
  for (std::size_t i = 0; i < combined.size(); ++i) {
    combined[i] =
        (ta * ctx.coeffs_a().coeff(i) + tb * coeffs_b.coeff(i)) / total;
  }
  return CoefficientSet(coeffs_b.domain(), coeffs_b.order(),
                        std::move(combined), coeffs_b.weights());
}

CoefficientSet residual_coefficients(const PartialTrajectoryContext& ctx,
                                     const CoefficientSet& field_coeffs) {
  require_compatible(ctx.coeffs_a(), field_coeffs, "residual_coefficients");
  const double ta = ctx.horizon_a();
  const double total = ctx.total_horizon();
  const double scale = total / ctx.horizon_b();
  const double frac_a = ta / total;
  std::vector<double> residual(field_coeffs.size());
  for (std::size_t i = 0; i < residual.size(); ++i) {
    residual[i] =
        scale * (field_coeffs.coeff(i) - frac_a * ctx.coeffs_a().coeff(i));
  }
  return CoefficientSet(field_coeffs.domain(), field_coeffs.order(),
                        std::move(residual), field_coeffs.weights());
}

RawField residual_field(const PartialTrajectoryContext& ctx,
                        const DensityField& phi_field, int order,
                        const std::vector<int>& resolution) {
  if (order != ctx.coeffs_a().order()) {
    throw std::invalid_argument(
        "residual_field: order differs from the executed prefix's order");
  }
  // Adopt the context's weights so custom weightings stay compatible; the
  // weights do not enter the reconstruction itself.
  CoefficientSet projected = decompose_field(phi_field, order);
  const CoefficientSet phi(projected.domain(), order, projected.coeffs(),
                           ctx.coeffs_a().weights());
  const CoefficientSet residual = residual_coefficients(ctx, phi);
  return reconstruct_field(residual, resolution);
}

std::vector<std::size_t> oversampled_states(const PartialTrajectoryContext& ctx,
                                            const DensityField& phi_field,
                                            int order,
                                            const std::vector<int>& resolution) {
  const RawField residual = residual_field(ctx, phi_field, order, resolution);
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < residual.values.size(); ++i) {
    if (residual.values[i] < kOversampledTolerance) {
      cells.push_back(i);
    }
  }
  return cells;
}

}  // namespace ergo
