#include <doctest.h>

#include "oracles.hpp"
#include "retroimg/elements.hpp"
#include "retroimg/error.hpp"

using namespace retroimg;

namespace {

Field random_mask(const TransverseGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.0, 1.0);
  std::uniform_real_distribution<double> ph(-oracle::pi, oracle::pi);
  Field t(g);
  for (std::size_t i = 0; i < g.size(); ++i) t[i] = std::polar(mag(rng), ph(rng));
  return t;
}

std::vector<Element> every_kind(const TransverseGrid& g, std::mt19937_64& rng) {
  return {Propagate{1.5, 40.0, false}, Propagate{0.7, 40.0, true}, FourierLens{},
          QuadraticPhase{2.0, 40.0}, make_mask(random_mask(g, rng))};
}

}  // namespace

TEST_CASE("propagation matches a mode-by-mode Fresnel sum") {
  std::mt19937_64 rng(10);
  const TransverseGrid g(64, 8.0);
  const Field f = oracle::random_field(g, rng);
  const Field fast = apply_forward(Propagate{1.0, 50.0, false}, f);
  CHECK(oracle::max_abs_diff(fast, oracle::direct_propagate(f, 1.0, 50.0)) < 1e-11);
  const Field half = apply_forward(Propagate{1.0, 50.0, true}, f);
  CHECK(oracle::max_abs_diff(half, oracle::direct_propagate(f, 1.0, 50.0, 0.5)) < 1e-11);
}

TEST_CASE("backward is the adjoint of forward for every element") {
  std::mt19937_64 rng(11);
  const TransverseGrid g(128, 16.0);
  for (const Element& e : every_kind(g, rng)) {
    const Field u = oracle::random_field(g, rng);
    const Field v = oracle::random_field(g, rng);
    const cplx lhs = inner(apply_forward(e, u), v);
    const cplx rhs = inner(u, apply_backward(e, v));
    CAPTURE(describe(e));
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs) + 1e-12);
  }
}

TEST_CASE("chains compose and the backward chain is the adjoint") {
  std::mt19937_64 rng(12);
  const TransverseGrid g(128, 16.0);
  const auto chain = every_kind(g, rng);
  const Field u = oracle::random_field(g, rng);
  const Field v = oracle::random_field(g, rng);
  Field step = u;
  for (const Element& e : chain) step = apply_forward(e, step);
  CHECK(oracle::max_abs_diff(step, apply_chain_forward(chain, u)) == 0.0);
  const cplx lhs = inner(apply_chain_forward(chain, u), v);
  const cplx rhs = inner(u, apply_chain_backward(chain, v));
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
}

TEST_CASE("unitary elements preserve the norm") {
  std::mt19937_64 rng(13);
  const TransverseGrid g(256, 16.0);
  const Field f = oracle::random_field(g, rng);
  const double n0 = f.norm_squared();
  const std::vector<Element> unitary = {Propagate{2.0, 50.0, false}, Propagate{3.0, 50.0, true},
                                        FourierLens{}, QuadraticPhase{2.0, 50.0}};
  for (const Element& e : unitary) {
    CAPTURE(describe(e));
    CHECK(std::abs(apply_forward(e, f).norm_squared() - n0) <= 1e-12 * n0);
    CHECK(std::abs(apply_backward(e, f).norm_squared() - n0) <= 1e-12 * n0);
    CHECK(oracle::max_abs_diff(apply_backward(e, apply_forward(e, f)), f) < 1e-12);
  }
}

TEST_CASE("masks never increase the norm") {
  std::mt19937_64 rng(14);
  const TransverseGrid g(64, 8.0);
  const Mask m = make_mask(random_mask(g, rng));
  const Field f = oracle::random_field(g, rng);
  CHECK(apply_forward(m, f).norm_squared() <= f.norm_squared());
  Field big(g);
  big[3] = 1.5;
  CHECK_THROWS_AS(make_mask(big), Error);
}

TEST_CASE("mask forward multiplies by t, backward by conj(t)") {
  const TransverseGrid g(8, 8.0);
  Field t(g);
  for (std::size_t i = 0; i < g.size(); ++i) t[i] = std::polar(0.5, 0.3 * static_cast<double>(i));
  const Element m = make_mask(t);
  Field ones(g);
  for (std::size_t i = 0; i < g.size(); ++i) ones[i] = 1.0;
  const Field fwd = apply_forward(m, ones);
  const Field bwd = apply_backward(m, ones);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(fwd[i] - t[i]) == 0.0);
    CHECK(std::abs(bwd[i] - std::conj(t[i])) == 0.0);
  }
}

TEST_CASE("quadratic phase is pointwise") {
  const TransverseGrid g(16, 4.0);
  Field ones(g);
  for (std::size_t i = 0; i < g.size(); ++i) ones[i] = 1.0;
  const Field out = apply_forward(QuadraticPhase{2.0, 50.0}, ones);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    CHECK(std::abs(out[i] - std::polar(1.0, -50.0 * x * x / 4.0)) < 1e-14);
  }
}

TEST_CASE("lens followed by back-propagation reproduces the closed-form Gaussian") {
  const TransverseGrid g(512, 40.0);
  const double f = 2.0;
  const double k_z = 50.0;
  for (double sigma : {0.5, 1.0, 2.0}) {
    const double x1 = 0.5;
    const Field alpha = materialize_detector({GaussianShape{sigma}, x1}, g);
    const std::vector<Element> arm = {Propagate{f, k_z, false}, FourierLens{}};
    Field out = alpha;
    for (const Element& e : arm) out = apply_backward(e, out);
    double err = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const cplx ref = oracle::gaussian_after_lens(g.x(i), x1, sigma, f, k_z);
      err = std::max(err, std::abs(out[i] - ref));
      peak = std::max(peak, std::abs(ref));
    }
    CAPTURE(sigma);
    CHECK(err / peak <= 1e-6);
  }
}

TEST_CASE("sampling guard") {
  const TransverseGrid g(512, 16.0);
  CHECK_NOTHROW(check_sampling(Propagate{2.0, 50.0, false}, g));
  CHECK_THROWS_AS(check_sampling(Propagate{4.0, 50.0, false}, g), Error);
  CHECK_NOTHROW(check_sampling(Propagate{4.0, 50.0, true}, g));
  CHECK_NOTHROW(check_sampling(Propagate{4.0, 50.0, false}, TransverseGrid(256, 16.0)));
  try {
    check_sampling(Propagate{4.0, 50.0, false}, g);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("n <= 256") != std::string::npos);
  }
}

TEST_CASE("detector modes are normalised and centred") {
  const TransverseGrid g(256, 16.0);
  for (double x1 : {0.0, 1.3, -7.9}) {
    const Field gauss = materialize_detector({GaussianShape{0.3}, x1}, g);
    CHECK(gauss.norm_squared() == doctest::Approx(1.0).epsilon(1e-10));
    const Field top = materialize_detector({TopHatShape{1.0}, x1}, g);
    CHECK(top.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    const Field point = materialize_detector({PointShape{}, x1}, g);
    CHECK(point.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(point[g.nearest_index(x1)]) == doctest::Approx(1.0 / std::sqrt(g.dx())));
  }
  // Periodic distance: a mode near the right edge wraps to the left edge.
  const Field edge = materialize_detector({GaussianShape{0.3}, 7.9}, g);
  CHECK(std::abs(edge[0]) > 0.1);
}

TEST_CASE("detector closed form") {
  const TransverseGrid g(128, 16.0);
  const double sigma = 0.5;
  const double x1 = 0.25;
  const Field d = materialize_detector({GaussianShape{sigma}, x1}, g);
  for (std::size_t i = 0; i < g.size(); i += 7) {
    const double u = g.x(i) - x1;
    const double ref =
        std::pow(1.0 / (oracle::pi * sigma * sigma), 0.25) * std::exp(-u * u / (2 * sigma * sigma));
    CHECK(std::abs(d[i] - ref) < 1e-14);
  }
}

TEST_CASE("unresolvable detectors are refused") {
  const TransverseGrid g(64, 16.0);  // dx = 0.25
  CHECK_THROWS_AS(materialize_detector({GaussianShape{0.4}, 0.0}, g), Error);
  CHECK_THROWS_AS(materialize_detector({TopHatShape{0.4}, 0.0}, g), Error);
  CHECK_NOTHROW(materialize_detector({GaussianShape{0.5}, 0.0}, g));
}

TEST_CASE("elements on the wrong grid are refused") {
  const TransverseGrid a(16, 1.0);
  const TransverseGrid b(16, 2.0);
  Field t(a);
  for (std::size_t i = 0; i < a.size(); ++i) t[i] = 1.0;
  const Element m = make_mask(t);
  CHECK_THROWS_AS(apply_forward(m, Field(b)), Error);
}
