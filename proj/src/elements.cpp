#include "retroimg/elements.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "retroimg/error.hpp"

namespace retroimg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double phase_coefficient(const Propagate& p) {
  return (p.fresnel_half_factor ? 0.5 : 1.0) * p.distance / p.k_z;
}

Field propagate(const Propagate& p, const Field& f, double sign) {
  check_sampling(p, f.grid());
  if (p.distance == 0.0) return f;
  Spectrum g = dft(f);
  const double c = sign * phase_coefficient(p);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double k = f.grid().k_fft(m);
    g[m] *= std::polar(1.0, -c * k * k);
  }
  return idft(g);
}

Field quadratic_phase(const QuadraticPhase& q, const Field& f, double sign) {
  if (!(q.k_z > 0.0) || q.focal_length == 0.0 || !std::isfinite(q.focal_length))
    fail("quadratic phase needs k_z > 0 and a finite non-zero focal length");
  Field out = f;
  const double c = sign * q.k_z / (2.0 * q.focal_length);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = f.grid().x(i);
    out[i] *= std::polar(1.0, -c * x * x);
  }
  return out;
}

Field mask(const Mask& m, const Field& f, bool conjugate) {
  require_same_grid(m.transfer.grid(), f.grid(), "mask");
  Field out = f;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] *= conjugate ? std::conj(m.transfer[i]) : m.transfer[i];
  return out;
}

}  // namespace

Mask make_mask(Field transfer) {
  for (std::size_t i = 0; i < transfer.size(); ++i) {
    const double a = std::abs(transfer[i]);
    if (!(a <= 1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "mask transfer |t| = " << a << " exceeds 1 at x = " << transfer.grid().x(i);
      fail(msg.str());
    }
  }
  return Mask{std::move(transfer)};
}

std::string describe(const Element& e) {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const Propagate& p) {
                   out << "propagate(z=" << p.distance << ", k_z=" << p.k_z
                       << (p.fresnel_half_factor ? ", fresnel" : "") << ")";
                 },
                 [&](const FourierLens&) { out << "fourier_lens"; },
                 [&](const QuadraticPhase& q) {
                   out << "quadratic_phase(f=" << q.focal_length << ", k_z=" << q.k_z << ")";
                 },
                 [&](const Mask&) { out << "mask"; },
             },
             e);
  return out.str();
}

void check_sampling(const Propagate& p, const TransverseGrid& grid) {
  if (!(p.k_z > 0.0) || !std::isfinite(p.k_z)) fail("propagation needs k_z > 0");
  if (!std::isfinite(p.distance)) fail("propagation distance must be finite");
  if (p.distance == 0.0) return;
  // Largest adjacent-sample phase step for |k| below Nyquist:
  // c dk^2 ((n/2-1)^2 - (n/2-2)^2) = c dk^2 (n - 3).
  const double c = std::abs(phase_coefficient(p));
  const double n = static_cast<double>(grid.size());
  const double step = c * grid.dk() * grid.dk() * (n - 3.0);
  if (step < std::numbers::pi) return;

  std::size_t n_max = 8;
  while (c * grid.dk() * grid.dk() * (2.0 * static_cast<double>(n_max) - 3.0) < std::numbers::pi)
    n_max *= 2;
  const double min_extent = std::sqrt(4.0 * std::numbers::pi * c * (n - 3.0));
  std::ostringstream msg;
  msg << "propagation over z = " << p.distance << " undersamples its k-space phase (step "
      << step << " rad >= pi) on n = " << grid.size() << ", L = " << grid.extent();
  if (c * grid.dk() * grid.dk() * (static_cast<double>(n_max) - 3.0) < std::numbers::pi)
    msg << "; use n <= " << n_max;
  else
    msg << "; no power-of-two n >= 8 works";
  msg << " or extent > " << min_extent;
  fail(msg.str());
}

Field apply_forward(const Element& e, const Field& f) {
  return std::visit(overloaded{
                        [&](const Propagate& p) { return propagate(p, f, +1.0); },
                        [&](const FourierLens&) { return f; },
                        [&](const QuadraticPhase& q) { return quadratic_phase(q, f, +1.0); },
                        [&](const Mask& m) { return mask(m, f, false); },
                    },
                    e);
}

Field apply_backward(const Element& e, const Field& f) {
  return std::visit(overloaded{
                        [&](const Propagate& p) { return propagate(p, f, -1.0); },
                        [&](const FourierLens&) { return f; },
                        [&](const QuadraticPhase& q) { return quadratic_phase(q, f, -1.0); },
                        [&](const Mask& m) { return mask(m, f, true); },
                    },
                    e);
}

Field apply_chain_forward(std::span<const Element> chain, const Field& f) {
  Field out = f;
  for (const Element& e : chain) out = apply_forward(e, out);
  return out;
}

Field apply_chain_backward(std::span<const Element> chain, const Field& f) {
  Field out = f;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) out = apply_backward(*it, out);
  return out;
}

Field materialize_detector(const DetectorProfile& d, const TransverseGrid& grid) {
  if (!std::isfinite(d.center)) fail("detector centre must be finite");
  Field out(grid);
  const double dx = grid.dx();
  std::visit(
      overloaded{
          [&](const GaussianShape& g) {
            if (!(g.sigma >= 2.0 * dx)) {
              std::ostringstream msg;
              msg << "gaussian detector sigma = " << g.sigma << " is unresolved; minimum is "
                  << 2.0 * dx << " (2 dx)";
              fail(msg.str());
            }
            const double amp = std::pow(1.0 / (std::numbers::pi * g.sigma * g.sigma), 0.25);
            for (std::size_t i = 0; i < grid.size(); ++i) {
              const double u = grid.wrapped_offset(i, d.center);
              out[i] = amp * std::exp(-u * u / (2.0 * g.sigma * g.sigma));
            }
          },
          [&](const TopHatShape& t) {
            if (!(t.width >= 2.0 * dx)) {
              std::ostringstream msg;
              msg << "top-hat detector width = " << t.width << " is unresolved; minimum is "
                  << 2.0 * dx << " (2 dx)";
              fail(msg.str());
            }
            if (t.width > grid.extent()) fail("top-hat detector wider than the grid window");
            const double eps = 1e-9 * dx;
            std::size_t count = 0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
              const double u = grid.wrapped_offset(i, d.center);
              if (u >= -0.5 * t.width - eps && u < 0.5 * t.width - eps) {
                out[i] = 1.0;
                ++count;
              }
            }
            const double value = 1.0 / std::sqrt(static_cast<double>(count) * dx);
            for (cplx& v : out.values()) v *= value;
          },
          [&](const PointShape&) { out[grid.nearest_index(d.center)] = 1.0 / std::sqrt(dx); },
      },
      d.shape);
  return out;
}

}  // namespace retroimg
