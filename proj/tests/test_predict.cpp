#include <doctest.h>

#include "oracles.hpp"
#include "retroimg/error.hpp"
#include "retroimg/predict.hpp"

using namespace retroimg;

namespace {

Eigen::MatrixXcd outer(const Field& u, const Field& v) {
  Eigen::MatrixXcd m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = u[i] * v[j];
  return m;
}

Field bump(const TransverseGrid& g, double c, double w) {
  Field f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(-(g.x(i) - c) * (g.x(i) - c) / (2 * w * w));
  return f;
}

JointDistribution joint_from(const TransverseGrid& g, Eigen::MatrixXd p) {
  p /= p.sum() * g.dx() * g.dx();
  return JointDistribution{g, std::move(p), 1.0, DetectorProfile{PointShape{}, 0.0}};
}

}  // namespace

TEST_CASE("evolve_joint with empty arms is the identity") {
  std::mt19937_64 rng(40);
  const TransverseGrid g(16, 4.0);
  const BiphotonField b(g, outer(oracle::random_field(g, rng), oracle::random_field(g, rng)));
  CHECK(evolve_joint(b, {}, {}).values().isApprox(b.values(), 0.0));
}

TEST_CASE("evolve_joint factorises on product states") {
  std::mt19937_64 rng(41);
  const TransverseGrid g(64, 8.0);
  const Field u = oracle::random_field(g, rng);
  const Field v = oracle::random_field(g, rng);
  Field t(g);
  for (std::size_t i = 0; i < g.size(); ++i) t[i] = std::polar(0.5, 0.1 * static_cast<double>(i));
  const std::vector<Element> arm1 = {Propagate{1.0, 30.0, false}, make_mask(t)};
  const std::vector<Element> arm2 = {QuadraticPhase{2.0, 30.0}, Propagate{0.4, 30.0, true}};
  const BiphotonField out = evolve_joint(BiphotonField(g, outer(u, v)), arm1, arm2);
  const Eigen::MatrixXcd ref = outer(apply_chain_forward(arm1, u), apply_chain_forward(arm2, v));
  CHECK((out.values() - ref).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("unitary arms preserve the biphoton norm") {
  std::mt19937_64 rng(42);
  const TransverseGrid g(64, 8.0);
  Eigen::MatrixXcd m(g.size(), g.size());
  std::normal_distribution<double> nd;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = {nd(rng), nd(rng)};
  const BiphotonField b(g, m);
  const std::vector<Element> arm1 = {Propagate{1.0, 30.0, false}, FourierLens{}};
  const std::vector<Element> arm2 = {QuadraticPhase{2.0, 30.0}, Propagate{0.4, 30.0, false}};
  const BiphotonField out = evolve_joint(b, arm1, arm2);
  CHECK(std::abs(out.norm_squared() - b.norm_squared()) <= 1e-10 * b.norm_squared());
}

TEST_CASE("physical order reverses the detector-to-crystal list") {
  const std::vector<Element> arm = {Propagate{1.0, 2.0, false}, FourierLens{}, QuadraticPhase{3.0, 2.0}};
  const auto phys = physical_order(arm);
  REQUIRE(phys.size() == 3);
  CHECK(std::holds_alternative<QuadraticPhase>(phys[0]));
  CHECK(std::holds_alternative<FourierLens>(phys[1]));
  CHECK(std::holds_alternative<Propagate>(phys[2]));
}

TEST_CASE("product biphoton gives a product joint") {
  const TransverseGrid g(64, 16.0);
  const Field u = bump(g, -1.0, 1.0);
  const Field v = bump(g, 2.0, 0.7);
  const auto joint = joint_distribution(BiphotonField(g, outer(u, v)), {PointShape{}, 0.0});
  double total = joint.density.sum() * g.dx() * g.dx();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    nu += std::norm(u[i]) * g.dx();
    nv += std::norm(v[i]) * g.dx();
  }
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      err = std::max(err, std::abs(joint.density(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                   std::norm(u[i]) * std::norm(v[j]) / (nu * nv)));
  CHECK(err < 1e-12);
  const auto m2 = marginal_arm2(joint);
  for (double x1 : {-1.0, 0.0, 2.5}) {
    const auto c = conditional_from_joint(joint, x1);
    CHECK(c.total() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(c.density[j] == doctest::Approx(m2.density[j]).epsilon(1e-10));
  }
  CHECK(binned_mutual_information(joint, 16) < 1e-12);
}

TEST_CASE("unevolved delta-correlated source sits on the diagonal") {
  const TransverseGrid g(64, 16.0);
  const auto joint = joint_distribution(make_biphoton_delta_correlated(g, 0.5), {PointShape{}, 0.0});
  for (Eigen::Index i = 0; i < joint.density.rows(); ++i)
    for (Eigen::Index j = 0; j < joint.density.cols(); ++j)
      if (i != j) CHECK(joint.density(i, j) == 0.0);
  CHECK(joint.density.sum() * g.dx() * g.dx() == doctest::Approx(1.0).epsilon(1e-12));
  // Perfect correlation: the information equals the entropy of the bin marginal.
  const double left = joint.density.topLeftCorner(32, 32).sum() * g.dx() * g.dx();
  const double h = -left * std::log2(left) - (1 - left) * std::log2(1 - left);
  CHECK(binned_mutual_information(joint, 2) == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("marginals and conditionals are normalised") {
  std::mt19937_64 rng(43);
  const TransverseGrid g(32, 8.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Eigen::MatrixXd p(32, 32);
  for (Eigen::Index i = 0; i < 32; ++i)
    for (Eigen::Index j = 0; j < 32; ++j) p(i, j) = ud(rng);
  const auto joint = joint_from(g, p);
  CHECK(marginal_arm1(joint).total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(marginal_arm2(joint).total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(marginal_arm2(joint).conditioning_position.has_value());
  for (int rep = 0; rep < 10; ++rep) {
    const double x1 = -3.0 + 0.6 * rep;
    const auto c = conditional_from_joint(joint, x1);
    CHECK(c.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.conditioning_position.value() == doctest::Approx(g.x(g.nearest_index(x1))));
  }
}

TEST_CASE("mutual information against a hand computation") {
  const TransverseGrid g(8, 8.0);
  // Two bins per axis; cell masses 0.4, 0.1 / 0.1, 0.4.
  Eigen::MatrixXd p(8, 8);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) p(i, j) = ((i < 4) == (j < 4)) ? 0.4 : 0.1;
  const auto joint = joint_from(g, p);
  const double ref = 2 * 0.4 * std::log2(0.4 / 0.25) + 2 * 0.1 * std::log2(0.1 / 0.25);
  CHECK(binned_mutual_information(joint, 2) == doctest::Approx(ref).epsilon(1e-12));
  CHECK_THROWS_AS(binned_mutual_information(joint, 3), Error);
}

TEST_CASE("dark row is an error") {
  const TransverseGrid g(16, 4.0);
  Eigen::MatrixXd p = Eigen::MatrixXd::Ones(16, 16);
  p.row(3).setZero();
  const auto joint = joint_from(g, p);
  try {
    conditional_from_joint(joint, g.x(3));
    FAIL("expected dark conditional");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DarkConditional);
  }
  CHECK_NOTHROW(conditional_from_joint(joint, g.x(4)));
}
