#include "retroimg/predict.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "retroimg/error.hpp"

namespace retroimg {

namespace {

Field column_of(const Eigen::MatrixXcd& m, Eigen::Index j, const TransverseGrid& grid) {
  std::vector<cplx> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) v[static_cast<std::size_t>(i)] = m(i, j);
  return Field(grid, std::move(v));
}

Field row_of(const Eigen::MatrixXcd& m, Eigen::Index i, const TransverseGrid& grid) {
  std::vector<cplx> v(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) v[static_cast<std::size_t>(j)] = m(i, j);
  return Field(grid, std::move(v));
}

ConditionalDistribution normalised(const TransverseGrid& grid, std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  total *= grid.dx();
  for (double& w : weights) w /= total;
  return ConditionalDistribution{grid, std::move(weights), std::nullopt};
}

}  // namespace

std::vector<Element> physical_order(std::span<const Element> detector_to_crystal) {
  return std::vector<Element>(detector_to_crystal.rbegin(), detector_to_crystal.rend());
}

BiphotonField evolve_joint(const BiphotonField& source, std::span<const Element> arm1,
                           std::span<const Element> arm2) {
  const auto& grid = source.grid();
  Eigen::MatrixXcd psi = source.values();
  const Eigen::Index n = psi.rows();
  if (!arm1.empty()) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Field out = apply_chain_forward(arm1, column_of(psi, j, grid));
      for (Eigen::Index i = 0; i < n; ++i) psi(i, j) = out[static_cast<std::size_t>(i)];
    }
  }
  if (!arm2.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Field out = apply_chain_forward(arm2, row_of(psi, i, grid));
      for (Eigen::Index j = 0; j < n; ++j) psi(i, j) = out[static_cast<std::size_t>(j)];
    }
  }
  return BiphotonField(grid, std::move(psi));
}

JointDistribution joint_distribution(const BiphotonField& evolved,
                                     const DetectorProfile& detector_family) {
  const auto& grid = evolved.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double dx = grid.dx();

  // Column c holds the detector mode centred on grid point c.
  Eigen::MatrixXcd modes(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    DetectorProfile d = detector_family;
    d.center = grid.x(static_cast<std::size_t>(c));
    const Field mode = materialize_detector(d, grid);
    for (Eigen::Index i = 0; i < n; ++i) modes(i, c) = mode[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXcd amplitude = dx * (modes.adjoint() * evolved.values());

  Eigen::MatrixXd density = amplitude.cwiseAbs2();
  const double total = density.sum() * dx * dx;
  if (!(total >= kDarkThreshold)) {
    std::ostringstream msg;
    msg << "joint distribution has total weight " << total << "; nothing is ever detected";
    throw Error(ErrorCode::DarkConditional, msg.str());
  }
  density /= total;
  return JointDistribution{grid, std::move(density), total, detector_family};
}

JointDistribution predict_joint(const ImagingSetup& setup) {
  validate_setup(setup);
  const std::vector<Element> arm1 = physical_order(setup.arm1);
  return joint_distribution(evolve_joint(setup.source, arm1, setup.arm2), setup.detector1);
}

ConditionalDistribution conditional_from_joint(const JointDistribution& joint, double x1) {
  const auto& grid = joint.grid;
  const auto row = static_cast<Eigen::Index>(grid.nearest_index(x1));
  const double dx = grid.dx();
  const double row_weight = joint.density.row(row).sum() * dx;
  if (!(row_weight * joint.total_weight >= kDarkThreshold) || !(row_weight > 0.0)) {
    std::ostringstream msg;
    msg << "dark conditional: arm-1 detection at x1 = " << x1 << " has zero probability";
    throw Error(ErrorCode::DarkConditional, msg.str());
  }
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = joint.density(row, static_cast<Eigen::Index>(j)) / row_weight;
  return ConditionalDistribution{grid, std::move(out), grid.x(static_cast<std::size_t>(row))};
}

ConditionalDistribution marginal_arm2(const JointDistribution& joint) {
  const Eigen::VectorXd col = joint.density.colwise().sum().transpose();
  return normalised(joint.grid, std::vector<double>(col.data(), col.data() + col.size()));
}

ConditionalDistribution marginal_arm1(const JointDistribution& joint) {
  const Eigen::VectorXd row = joint.density.rowwise().sum();
  return normalised(joint.grid, std::vector<double>(row.data(), row.data() + row.size()));
}

double binned_mutual_information(const JointDistribution& joint, std::size_t bins) {
  const auto n = static_cast<std::size_t>(joint.density.rows());
  if (bins == 0 || bins > n || n % bins != 0)
    fail("mutual information needs a bin count that divides the grid size");
  const std::size_t per_bin = n / bins;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(bins),
                                            static_cast<Eigen::Index>(bins));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      p(static_cast<Eigen::Index>(i / per_bin), static_cast<Eigen::Index>(j / per_bin)) +=
          joint.density(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  p /= p.sum();
  const Eigen::VectorXd p1 = p.rowwise().sum();
  const Eigen::RowVectorXd p2 = p.colwise().sum();
  double mi = 0.0;
  for (Eigen::Index a = 0; a < p.rows(); ++a)
    for (Eigen::Index b = 0; b < p.cols(); ++b)
      if (p(a, b) > 0.0) mi += p(a, b) * std::log2(p(a, b) / (p1(a) * p2(b)));
  return std::max(mi, 0.0);
}

}  // namespace retroimg
