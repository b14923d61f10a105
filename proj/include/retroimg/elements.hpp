#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "retroimg/grid.hpp"

namespace retroimg {

/// Free-space propagation over `distance`, applied as a k-space phase.
///
/// Forward multiplies the spectrum by exp(-i c k^2 z / k_z) with c = 1, or
/// c = 1/2 when `fresnel_half_factor` is set. Backward is the conjugate phase.
/// The constant phase exp(i k_z z) is dropped.
struct Propagate {
  double distance = 0.0;
  double k_z = 1.0;
  bool fresnel_half_factor = false;
};

/// Ideal f-f lens in the unit-scale convention: the k-content a(k) of the
/// field arriving at the lens becomes the position profile
/// (1/sqrt(2 pi)) \int dk a(k) exp(i k x) behind it. On position-sampled
/// fields that map is the identity on the samples, so the element is a
/// marker in a chain rather than a numerical step.
struct FourierLens {};

/// Thin-lens phase exp(-i k_z x^2 / (2 f)) applied in position space.
struct QuadraticPhase {
  double focal_length = 1.0;
  double k_z = 1.0;
};

/// Complex transfer function t(x) with |t| <= 1. Use make_mask() to build one.
struct Mask {
  Field transfer;
};

using Element = std::variant<Propagate, FourierLens, QuadraticPhase, Mask>;

/// Validates |t| <= 1 + 1e-12 everywhere.
Mask make_mask(Field transfer);

std::string describe(const Element& e);

/// Throws when the quadratic propagation phase changes by pi or more between
/// adjacent wavevector samples below the Nyquist bin. The message names the
/// largest admissible n and smallest admissible extent.
void check_sampling(const Propagate& p, const TransverseGrid& grid);

Field apply_forward(const Element& e, const Field& f);

/// Adjoint of apply_forward() under the dx-weighted inner product.
Field apply_backward(const Element& e, const Field& f);

/// Applies `chain` left to right with apply_forward().
Field apply_chain_forward(std::span<const Element> chain, const Field& f);

/// Adjoint of apply_chain_forward(): adjoints in reversed order.
Field apply_chain_backward(std::span<const Element> chain, const Field& f);

// Detector profiles -----------------------------------------------------------

struct GaussianShape {
  double sigma = 0.1;
};
struct TopHatShape {
  double width = 1.0;
};
struct PointShape {};

using DetectorShape = std::variant<GaussianShape, TopHatShape, PointShape>;

struct DetectorProfile {
  DetectorShape shape = GaussianShape{};
  double center = 0.0;
};

/// Samples the detector mode on the grid, using periodic distances.
///
/// Gaussian: (1/(pi sigma^2))^{1/4} exp(-(x - x1)^2 / (2 sigma^2)), requires
/// sigma >= 2 dx. TopHat: constant on [x1 - w/2, x1 + w/2), normalised on the
/// grid, requires w >= 2 dx. Point: 1/sqrt(dx) at the nearest sample.
Field materialize_detector(const DetectorProfile& d, const TransverseGrid& grid);

}  // namespace retroimg
