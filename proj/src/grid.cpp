#include "retroimg/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "retroimg/error.hpp"

namespace retroimg {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// (-1)^m: the phase exp(i pi m) that recentres an FFT on x = 0.
void alternate_signs(std::span<cplx> v) {
  for (std::size_t m = 1; m < v.size(); m += 2) v[m] = -v[m];
}

}  // namespace

TransverseGrid::TransverseGrid(std::size_t n, double extent) : n_(n), extent_(extent) {
  if (!is_power_of_two(n) || n < 8) {
    std::ostringstream msg;
    msg << "grid size n = " << n << " must be a power of two >= 8";
    fail(msg.str());
  }
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    std::ostringstream msg;
    msg << "grid extent must be positive and finite, got " << extent;
    fail(msg.str());
  }
  dx_ = extent / static_cast<double>(n);
  dk_ = 2.0 * std::numbers::pi / extent;
}

std::vector<double> TransverseGrid::x_values() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
  return out;
}

std::vector<double> TransverseGrid::k_values_fft_order() const {
  std::vector<double> out(n_);
  for (std::size_t m = 0; m < n_; ++m) out[m] = k_fft(m);
  return out;
}

std::vector<double> TransverseGrid::k_values_monotone() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    out[i] = (static_cast<double>(i) - static_cast<double>(n_ / 2)) * dk_;
  return out;
}

std::size_t TransverseGrid::nearest_index(double x0) const {
  const double s = std::floor(x0 / dx_ + 0.5) + static_cast<double>(n_ / 2);
  if (s <= 0.0) return 0;
  if (s >= static_cast<double>(n_ - 1)) return n_ - 1;
  return static_cast<std::size_t>(s);
}

double TransverseGrid::wrapped_offset(std::size_t i, double x0) const {
  double d = x(i) - x0;
  d -= extent_ * std::floor(d / extent_ + 0.5);
  return d;
}

TransverseGrid make_grid(std::size_t n, double extent) { return TransverseGrid(n, extent); }

Field::Field(const TransverseGrid& grid) : grid_(grid), values_(grid.size()) {}

Field::Field(const TransverseGrid& grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    std::ostringstream msg;
    msg << "field has " << values_.size() << " samples but grid has " << grid_.size();
    fail(msg.str());
  }
}

double Field::norm_squared() const {
  double acc = 0.0;
  for (const cplx& v : values_) acc += std::norm(v);
  return acc * grid_.dx();
}

Spectrum::Spectrum(const TransverseGrid& grid) : grid_(grid), values_(grid.size()) {}

Spectrum::Spectrum(const TransverseGrid& grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    std::ostringstream msg;
    msg << "spectrum has " << values_.size() << " samples but grid has " << grid_.size();
    fail(msg.str());
  }
}

std::vector<cplx> Spectrum::monotone() const {
  const std::size_t n = values_.size();
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = values_[(i + n / 2) % n];
  return out;
}

double Spectrum::norm_squared() const {
  double acc = 0.0;
  for (const cplx& v : values_) acc += std::norm(v);
  return acc * grid_.dk();
}

void require_same_grid(const TransverseGrid& a, const TransverseGrid& b, const char* where) {
  if (!(a == b)) {
    std::ostringstream msg;
    msg << where << ": grid mismatch (n = " << a.size() << ", L = " << a.extent()
        << " vs n = " << b.size() << ", L = " << b.extent() << ")";
    fail(msg.str());
  }
}

Spectrum dft(const Field& f) {
  std::vector<cplx> v(f.values().begin(), f.values().end());
  detail::fft_inplace(v, detail::FftSign::Forward);
  alternate_signs(v);
  const double scale = 1.0 / std::sqrt(static_cast<double>(v.size()));
  for (cplx& c : v) c *= scale;
  return Spectrum(f.grid(), std::move(v));
}

Field idft(const Spectrum& g) {
  std::vector<cplx> v(g.values().begin(), g.values().end());
  alternate_signs(v);
  detail::fft_inplace(v, detail::FftSign::Backward);
  const double scale = 1.0 / std::sqrt(static_cast<double>(v.size()));
  for (cplx& c : v) c *= scale;
  return Field(g.grid(), std::move(v));
}

Spectrum dft_scaled(const Field& f) {
  Spectrum g = dft(f);
  const auto& grid = f.grid();
  const double scale =
      grid.dx() * std::sqrt(static_cast<double>(grid.size()) / (2.0 * std::numbers::pi));
  for (cplx& c : g.values()) c *= scale;
  return g;
}

Field idft_scaled(const Spectrum& g) {
  Field f = idft(g);
  const auto& grid = g.grid();
  const double scale =
      grid.dk() * std::sqrt(static_cast<double>(grid.size()) / (2.0 * std::numbers::pi));
  for (cplx& c : f.values()) c *= scale;
  return f;
}

Field convolve(const Field& f, const Field& kernel) {
  require_same_grid(f.grid(), kernel.grid(), "convolve");
  const std::size_t n = f.size();
  std::vector<cplx> a(f.values().begin(), f.values().end());
  // Kernel sample at offset d*dx sits at index d + n/2; rotate it to index d.
  std::vector<cplx> h(n);
  for (std::size_t m = 0; m < n; ++m) h[m] = kernel[(m + n / 2) % n];
  detail::fft_inplace(a, detail::FftSign::Forward);
  detail::fft_inplace(h, detail::FftSign::Forward);
  for (std::size_t m = 0; m < n; ++m) a[m] *= h[m];
  detail::fft_inplace(a, detail::FftSign::Backward);
  const double scale = f.grid().dx() / static_cast<double>(n);
  for (cplx& c : a) c *= scale;
  return Field(f.grid(), std::move(a));
}

cplx inner(const Field& u, const Field& v) {
  require_same_grid(u.grid(), v.grid(), "inner");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
  return acc * u.grid().dx();
}

double edge_leakage(const Field& f) {
  const auto& grid = f.grid();
  const double limit = 0.45 * grid.extent();
  double total = 0.0;
  double outer = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = std::norm(f[i]);
    total += w;
    if (std::abs(grid.x(i)) >= limit) outer += w;
  }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace retroimg
