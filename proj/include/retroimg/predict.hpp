#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "retroimg/elements.hpp"
#include "retroimg/retrodict.hpp"
#include "retroimg/source.hpp"

namespace retroimg {

/// Joint detection density P(x1, x2) over grid x grid, arm-1 index first.
struct JointDistribution {
  TransverseGrid grid;
  Eigen::MatrixXd density;  // sum density * dx^2 = 1
  /// Unnormalised sum |A|^2 dx^2; recovers absolute row weights.
  double total_weight = 0.0;
  /// Arm-1 detector family (shape); centres run over every grid point.
  DetectorProfile detector1;
};

/// Physical (crystal-to-detector) order of an arm listed detector-to-crystal,
/// as ImagingSetup::arm1 is.
std::vector<Element> physical_order(std::span<const Element> detector_to_crystal);

/// Forward-evolves the biphoton: arm-1 elements act on the row coordinate,
/// arm-2 elements on the column coordinate. Both arms in physical order.
BiphotonField evolve_joint(const BiphotonField& source, std::span<const Element> arm1,
                           std::span<const Element> arm2);

/// A(x1, x2) = dx * sum_x conj(alpha_{x1}(x)) Psi(x, x2) for a detector of the
/// given shape centred at every grid point; arm 2 is detected pointwise.
JointDistribution joint_distribution(const BiphotonField& evolved,
                                     const DetectorProfile& detector_family);

/// Convenience: evolve the setup's source through both arms and tabulate the
/// joint for the setup's detector shape.
JointDistribution predict_joint(const ImagingSetup& setup);

/// Bayes' rule on the nearest grid row: P(x2 | x1) = P(x1, x2) / P(x1).
/// Throws Error(DarkConditional) when the row's absolute weight is below 1e-300.
ConditionalDistribution conditional_from_joint(const JointDistribution& joint, double x1);

ConditionalDistribution marginal_arm2(const JointDistribution& joint);
ConditionalDistribution marginal_arm1(const JointDistribution& joint);

/// Mutual information (bits) of the joint after summing it into bins x bins
/// equal-width cells over the window.
double binned_mutual_information(const JointDistribution& joint, std::size_t bins);

}  // namespace retroimg
