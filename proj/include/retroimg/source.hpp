#pragma once

#include <Eigen/Dense>

#include "retroimg/grid.hpp"

namespace retroimg {

/// Two-photon amplitude B(i, j) ~ beta(x_i, x'_j); arm-1 coordinate is the row.
class BiphotonField {
 public:
  BiphotonField(const TransverseGrid& grid, Eigen::MatrixXcd values);

  const TransverseGrid& grid() const noexcept { return grid_; }
  const Eigen::MatrixXcd& values() const noexcept { return values_; }

  /// True when built by make_biphoton_delta_correlated(); enables the O(n)
  /// conditioning path.
  bool is_diagonal() const noexcept { return diagonal_; }

  /// Sum |B|^2 dx^2.
  double norm_squared() const;

 private:
  friend BiphotonField make_biphoton_delta_correlated(const TransverseGrid&, double);

  TransverseGrid grid_;
  Eigen::MatrixXcd values_;
  bool diagonal_ = false;
};

/// Delta-correlated source: B(i, j) = delta_ij / dx * sqrt(pi) * exp(-x_j^2 kappa^2 / 2).
/// Requires 2 dx <= 1/kappa <= L/8.
BiphotonField make_biphoton_delta_correlated(const TransverseGrid& grid, double kappa);

/// One-photon arm-2 amplitude beta1(x_j) = dx * sum_i conj(alpha3(x_i)) B(i, j).
/// Antilinear in alpha3, not normalised.
Field condition(const BiphotonField& source, const Field& alpha3);

}  // namespace retroimg
