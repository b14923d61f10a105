#include "retroimg/source.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "retroimg/error.hpp"

namespace retroimg {

BiphotonField::BiphotonField(const TransverseGrid& grid, Eigen::MatrixXcd values)
    : grid_(grid), values_(std::move(values)) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (values_.rows() != n || values_.cols() != n) {
    std::ostringstream msg;
    msg << "biphoton amplitude must be " << n << " x " << n << ", got " << values_.rows()
        << " x " << values_.cols();
    fail(msg.str());
  }
  if (!values_.allFinite()) fail("biphoton amplitude has non-finite entries");
}

double BiphotonField::norm_squared() const {
  return values_.squaredNorm() * grid_.dx() * grid_.dx();
}

BiphotonField make_biphoton_delta_correlated(const TransverseGrid& grid, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) fail("pump spread kappa must be positive");
  const double width = 1.0 / kappa;
  if (width < 2.0 * grid.dx() || width > grid.extent() / 8.0) {
    std::ostringstream msg;
    msg << "source envelope width 1/kappa = " << width << " must lie in [" << 2.0 * grid.dx()
        << ", " << grid.extent() / 8.0 << "] (2 dx to L/8)";
    fail(msg.str());
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
  const double amp = std::sqrt(std::numbers::pi) / grid.dx();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = grid.x(static_cast<std::size_t>(j));
    b(j, j) = amp * std::exp(-0.5 * x * x * kappa * kappa);
  }
  BiphotonField out(grid, std::move(b));
  out.diagonal_ = true;
  return out;
}

Field condition(const BiphotonField& source, const Field& alpha3) {
  require_same_grid(source.grid(), alpha3.grid(), "condition");
  const auto& grid = source.grid();
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  Field beta1(grid);
  if (source.is_diagonal()) {
    const auto& b = source.values();
    for (std::size_t j = 0; j < n; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      beta1[j] = dx * std::conj(alpha3[j]) * b(jj, jj);
    }
    return beta1;
  }
  Eigen::Map<const Eigen::VectorXcd> a(alpha3.values().data(), static_cast<Eigen::Index>(n));
  const Eigen::RowVectorXcd row = a.adjoint() * source.values();
  for (std::size_t j = 0; j < n; ++j) beta1[j] = dx * row(static_cast<Eigen::Index>(j));
  return beta1;
}

}  // namespace retroimg
