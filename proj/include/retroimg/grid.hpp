#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace retroimg {

using cplx = std::complex<double>;

/// Uniform 1-D transverse window of n samples over a length `extent`.
///
/// Positions are x_i = (i - n/2) dx, so x = 0 is sample n/2. Wavevectors are
/// stored in FFT order (0, dk, ..., -dk); accessors named `*_monotone` return
/// ascending views.
class TransverseGrid {
 public:
  /// Throws Error(Validation) unless n is a power of two >= 8 and extent > 0.
  TransverseGrid(std::size_t n, double extent);

  std::size_t size() const noexcept { return n_; }
  double extent() const noexcept { return extent_; }
  double dx() const noexcept { return dx_; }
  double dk() const noexcept { return dk_; }

  double x(std::size_t i) const noexcept {
    return (static_cast<double>(i) - static_cast<double>(n_ / 2)) * dx_;
  }
  /// Wavevector of FFT bin m (m < n/2 positive, m >= n/2 negative).
  double k_fft(std::size_t m) const noexcept {
    const auto s = static_cast<double>(m);
    return (m < n_ / 2 ? s : s - static_cast<double>(n_)) * dk_;
  }

  std::vector<double> x_values() const;
  std::vector<double> k_values_fft_order() const;
  std::vector<double> k_values_monotone() const;

  /// Index of the grid point closest to x (ties round up), clamped to the window.
  std::size_t nearest_index(double x) const;

  /// Periodic (minimum-image) displacement x_i - x0, folded into [-L/2, L/2).
  double wrapped_offset(std::size_t i, double x0) const;

  bool operator==(const TransverseGrid& other) const noexcept {
    return n_ == other.n_ && extent_ == other.extent_;
  }

 private:
  std::size_t n_;
  double extent_;
  double dx_;
  double dk_;
};

TransverseGrid make_grid(std::size_t n, double extent);

/// Complex one-photon transverse amplitude sampled at grid positions.
class Field {
 public:
  explicit Field(const TransverseGrid& grid);
  Field(const TransverseGrid& grid, std::vector<cplx> values);

  const TransverseGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  cplx operator[](std::size_t i) const noexcept { return values_[i]; }
  cplx& operator[](std::size_t i) noexcept { return values_[i]; }

  /// Sum |f|^2 dx.
  double norm_squared() const;

 private:
  TransverseGrid grid_;
  std::vector<cplx> values_;
};

/// k-representation of a Field; values in FFT order.
class Spectrum {
 public:
  explicit Spectrum(const TransverseGrid& grid);
  Spectrum(const TransverseGrid& grid, std::vector<cplx> values);

  const TransverseGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  cplx operator[](std::size_t m) const noexcept { return values_[m]; }
  cplx& operator[](std::size_t m) noexcept { return values_[m]; }

  /// Values reordered to match k_values_monotone().
  std::vector<cplx> monotone() const;

  /// Sum |g|^2 dk.
  double norm_squared() const;

 private:
  TransverseGrid grid_;
  std::vector<cplx> values_;
};

void require_same_grid(const TransverseGrid& a, const TransverseGrid& b, const char* where);

/// Unitary DFT with kernel exp(-i k x) / sqrt(n), centred on x = 0.
Spectrum dft(const Field& f);
/// Inverse of dft().
Field idft(const Spectrum& g);

/// Continuum-normalised transform: dx / sqrt(2 pi) * sum f(x) exp(-i k x).
Spectrum dft_scaled(const Field& f);
/// Inverse of dft_scaled(): dk / sqrt(2 pi) * sum g(k) exp(+i k x).
Field idft_scaled(const Spectrum& g);

/// Circular convolution dx * sum_j f(x_j) h(x_i - x_j), evaluated with FFTs.
Field convolve(const Field& f, const Field& kernel);

/// Inner product dx * sum conj(u) v.
cplx inner(const Field& u, const Field& v);

/// Fraction of sum |f|^2 lying in the outer 10% of the window (5% per side).
/// Returns 0 for an all-zero field.
double edge_leakage(const Field& f);

}  // namespace retroimg
