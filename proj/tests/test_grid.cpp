#include <doctest.h>

#include "oracles.hpp"
#include "retroimg/error.hpp"
#include "retroimg/grid.hpp"

using namespace retroimg;

TEST_CASE("grid coordinates") {
  const TransverseGrid g(8, 4.0);
  CHECK(g.dx() == doctest::Approx(0.5));
  CHECK(g.dk() == doctest::Approx(2.0 * oracle::pi / 4.0));
  CHECK(g.x(0) == doctest::Approx(-2.0));
  CHECK(g.x(4) == doctest::Approx(0.0));
  CHECK(g.x(7) == doctest::Approx(1.5));
  CHECK(g.k_fft(3) == doctest::Approx(3.0 * g.dk()));
  CHECK(g.k_fft(4) == doctest::Approx(-4.0 * g.dk()));
  const auto km = g.k_values_monotone();
  for (std::size_t i = 1; i < km.size(); ++i) CHECK(km[i] > km[i - 1]);
  CHECK(g.nearest_index(0.26) == 5);
  CHECK(g.nearest_index(-100.0) == 0);
  CHECK(g.nearest_index(100.0) == 7);
  CHECK(g.wrapped_offset(0, 1.5) == doctest::Approx(0.5));
}

TEST_CASE("grid rejects bad sizes") {
  CHECK_THROWS_AS(TransverseGrid(500, 16.0), Error);
  CHECK_THROWS_AS(TransverseGrid(4, 16.0), Error);
  CHECK_THROWS_AS(TransverseGrid(64, 0.0), Error);
  CHECK_THROWS_AS(TransverseGrid(64, -1.0), Error);
  CHECK_NOTHROW(TransverseGrid(8, 1.0));
}

TEST_CASE("scaled transform matches direct summation") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {8u, 32u, 64u}) {
    const TransverseGrid g(n, 7.3);
    const Field f = oracle::random_field(g, rng);
    const auto ref = oracle::direct_scaled_transform(f);
    const Spectrum s = dft_scaled(f);
    double err = 0.0;
    for (std::size_t m = 0; m < n; ++m) err = std::max(err, std::abs(s[m] - ref[m]));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("transforms invert and obey Parseval") {
  std::mt19937_64 rng(2);
  const TransverseGrid g(256, 16.0);
  for (int rep = 0; rep < 5; ++rep) {
    const Field f = oracle::random_field(g, rng);
    const Spectrum s = dft_scaled(f);
    CHECK(std::abs(s.norm_squared() - f.norm_squared()) <= 1e-10 * f.norm_squared());
    CHECK(oracle::max_abs_diff(idft_scaled(s), f) < 1e-12);
    CHECK(oracle::max_abs_diff(idft(dft(f)), f) < 1e-12);
    double unit = 0.0;
    double plain = 0.0;
    const Spectrum u = dft(f);
    for (std::size_t m = 0; m < g.size(); ++m) unit += std::norm(u[m]);
    for (std::size_t i = 0; i < g.size(); ++i) plain += std::norm(f[i]);
    CHECK(unit == doctest::Approx(plain).epsilon(1e-12));
  }
}

TEST_CASE("Gaussian transforms to a Gaussian") {
  const TransverseGrid g(256, 40.0);
  const double sigma = 1.3;
  Field f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(-g.x(i) * g.x(i) / (2 * sigma * sigma));
  const Spectrum s = dft_scaled(f);
  double err = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double k = g.k_fft(m);
    err = std::max(err, std::abs(s[m] - sigma * std::exp(-k * k * sigma * sigma / 2)));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("convolution matches the direct sum") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {8u, 16u, 64u}) {
    const TransverseGrid g(n, 5.0);
    const Field f = oracle::random_field(g, rng);
    const Field h = oracle::random_field(g, rng);
    const Field fast = convolve(f, h);
    const Field slow = oracle::direct_convolve(f, h);
    CHECK(oracle::max_abs_diff(fast, slow) <= 1e-10);
  }
}

TEST_CASE("convolution with a discrete delta is the identity") {
  std::mt19937_64 rng(4);
  const TransverseGrid g(32, 4.0);
  Field delta(g);
  delta[g.size() / 2] = 1.0 / g.dx();
  const Field f = oracle::random_field(g, rng);
  CHECK(oracle::max_abs_diff(convolve(f, delta), f) < 1e-13);
}

TEST_CASE("mismatched grids are refused") {
  const TransverseGrid a(16, 1.0);
  const TransverseGrid b(16, 2.0);
  CHECK_THROWS_AS(convolve(Field(a), Field(b)), Error);
  CHECK_THROWS_AS(inner(Field(a), Field(b)), Error);
  CHECK_THROWS_AS(Field(a, std::vector<cplx>(3)), Error);
}

TEST_CASE("edge leakage counts the outer tenth") {
  const TransverseGrid g(64, 10.0);
  Field f(g);
  f[g.size() / 2] = 1.0;
  CHECK(edge_leakage(f) == 0.0);
  f[0] = 1.0;
  CHECK(edge_leakage(f) == doctest::Approx(0.5));
  CHECK(edge_leakage(Field(g)) == 0.0);
}
