#include "retroimg/hilbert.hpp"

#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "retroimg/error.hpp"

namespace retroimg::hilbert {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kTraceTol = 1e-10;

void require_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << what << " must be a non-empty square matrix, got " << m.rows() << " x " << m.cols();
    fail(msg.str());
  }
}

void require_hermitian_psd(const Matrix& m, const char* what) {
  if (!m.allFinite()) fail(std::string(what) + " has non-finite entries");
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    std::ostringstream msg;
    msg << what << " is not Hermitian (max |M - M^dagger| = " << herm << ")";
    fail(msg.str());
  }
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const double lowest = eig.eigenvalues().minCoeff();
  if (lowest < -kPsdTol) {
    std::ostringstream msg;
    msg << what << " is not positive semidefinite (eigenvalue " << lowest << ")";
    fail(msg.str());
  }
}

void require_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    std::ostringstream msg;
    msg << where << ": dimension mismatch (" << a << " vs " << b << ")";
    fail(msg.str());
  }
}

// Re Tr(A B) without forming the product.
double trace_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().cwiseProduct(b)).sum().real();
}

double clip_probability(double p) {
  if (p < 0.0 && p > -1e-12) return 0.0;
  if (p > 1.0 && p < 1.0 + 1e-12) return 1.0;
  return p;
}

Matrix ginibre(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index c = 0; c < g.cols(); ++c)
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = {re, im};
    }
  return g;
}

}  // namespace

DensityOperator::DensityOperator(Matrix rho) : rho_(std::move(rho)) {
  require_square(rho_, "density operator");
  require_hermitian_psd(rho_, "density operator");
  const double tr = rho_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream msg;
    msg << "density operator has trace " << tr << ", expected 1";
    fail(msg.str());
  }
}

PomSet::PomSet(std::vector<Matrix> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) fail("POM needs at least one element");
  require_square(elements_.front(), "POM element");
  dim_ = static_cast<std::size_t>(elements_.front().rows());
  Matrix total = Matrix::Zero(elements_.front().rows(), elements_.front().cols());
  for (const Matrix& e : elements_) {
    require_square(e, "POM element");
    require_dim(static_cast<std::size_t>(e.rows()), dim_, "POM element");
    require_hermitian_psd(e, "POM element");
    total += e;
  }
  const auto d = static_cast<Eigen::Index>(dim_);
  const double dev = (total - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > 1e-10) {
    std::ostringstream msg;
    msg << "POM elements do not sum to the identity (max deviation " << dev << ")";
    fail(msg.str());
  }
}

Ensemble::Ensemble(std::vector<double> priors, std::vector<DensityOperator> states)
    : priors_(std::move(priors)), states_(std::move(states)) {
  if (states_.empty()) fail("ensemble needs at least one state");
  if (priors_.size() != states_.size()) fail("ensemble needs one prior per state");
  double sum = 0.0;
  for (double p : priors_) {
    if (!(p >= 0.0)) fail("ensemble priors must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "ensemble priors sum to " << sum << ", expected 1";
    fail(msg.str());
  }
  for (const auto& s : states_) require_dim(s.dim(), states_.front().dim(), "ensemble state");
}

UnitaryEvolution::UnitaryEvolution(Matrix u, double elapsed) : u_(std::move(u)), elapsed_(elapsed) {
  require_square(u_, "evolution operator");
  const double dev = (u_.adjoint() * u_ - Matrix::Identity(u_.rows(), u_.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-10) {
    std::ostringstream msg;
    msg << "evolution operator is not unitary (max |U^dagger U - 1| = " << dev << ")";
    fail(msg.str());
  }
}

UnitaryEvolution UnitaryEvolution::identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return UnitaryEvolution(Matrix::Identity(d, d));
}

std::vector<double> predictive_conditional(const DensityOperator& rho, const PomSet& pom,
                                           const UnitaryEvolution& u) {
  require_dim(rho.dim(), pom.dim(), "predictive_conditional");
  require_dim(rho.dim(), u.dim(), "predictive_conditional");
  const Matrix evolved = u.matrix() * rho.matrix() * u.matrix().adjoint();
  std::vector<double> out(pom.size());
  for (std::size_t j = 0; j < pom.size(); ++j)
    out[j] = clip_probability(trace_product(evolved, pom.element(j)));
  return out;
}

std::vector<double> retrodictive_conditional(const Ensemble& ensemble, const PomSet& pom,
                                             std::size_t j, const UnitaryEvolution& u) {
  require_dim(ensemble.dim(), pom.dim(), "retrodictive_conditional");
  require_dim(ensemble.dim(), u.dim(), "retrodictive_conditional");
  if (j >= pom.size()) fail("retrodictive_conditional: outcome index out of range");
  const Matrix& pi = pom.element(j);
  const double tr = pi.trace().real();
  if (!(tr > 0.0)) {
    std::ostringstream msg;
    msg << "outcome " << j << " has a zero POM element; no retrodictive state exists";
    throw Error(ErrorCode::DarkConditional, msg.str());
  }
  // Retrodictive state at the preparation time.
  const Matrix retro = u.matrix().adjoint() * (pi / tr) * u.matrix();
  std::vector<double> out(ensemble.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    out[i] = ensemble.priors()[i] * trace_product(ensemble.state(i).matrix(), retro);
    denom += out[i];
  }
  if (!(denom > 1e-300)) {
    std::ostringstream msg;
    msg << "outcome " << j << " is impossible for this ensemble (total weight " << denom << ")";
    throw Error(ErrorCode::DarkConditional, msg.str());
  }
  for (double& p : out) p = clip_probability(p / denom);
  return out;
}

Eigen::MatrixXd bayes_invert(std::span<const double> priors, const Eigen::MatrixXd& forward) {
  const auto states = static_cast<Eigen::Index>(priors.size());
  if (forward.cols() != states) {
    std::ostringstream msg;
    msg << "bayes_invert: forward matrix has " << forward.cols() << " columns for "
        << priors.size() << " priors";
    fail(msg.str());
  }
  Eigen::MatrixXd out(states, forward.rows());
  for (Eigen::Index j = 0; j < forward.rows(); ++j) {
    double evidence = 0.0;
    for (Eigen::Index i = 0; i < states; ++i) {
      out(i, j) = priors[static_cast<std::size_t>(i)] * forward(j, i);
      evidence += out(i, j);
    }
    if (!(evidence > 0.0)) {
      std::ostringstream msg;
      msg << "bayes_invert: outcome " << j << " has zero total probability";
      throw Error(ErrorCode::DarkConditional, msg.str());
    }
    out.col(j) /= evidence;
  }
  return out;
}

Eigen::MatrixXd predictive_matrix(const Ensemble& ensemble, const PomSet& pom,
                                  const UnitaryEvolution& u) {
  Eigen::MatrixXd forward(static_cast<Eigen::Index>(pom.size()),
                          static_cast<Eigen::Index>(ensemble.size()));
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto p = predictive_conditional(ensemble.state(i), pom, u);
    for (std::size_t j = 0; j < p.size(); ++j)
      forward(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = p[j];
  }
  return forward;
}

Matrix haar_unitary(std::size_t dim, std::mt19937_64& rng) {
  const Matrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phases of R's diagonal so Q is Haar distributed.
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    const std::complex<double> d = r(c, c);
    const double a = std::abs(d);
    if (a > 0.0) q.col(c) *= d / a;
  }
  return q;
}

DensityOperator random_density_operator(std::size_t dim, std::mt19937_64& rng, std::size_t rank) {
  const Matrix g = ginibre(dim, rank == 0 ? dim : rank, rng);
  Matrix rho = g * g.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace().real();
  return DensityOperator(std::move(rho));
}

PomSet random_pom(std::size_t dim, std::size_t outcomes, std::mt19937_64& rng,
                  std::size_t dilation) {
  const std::size_t big = dim * std::max<std::size_t>(dilation, 1);
  if (outcomes == 0 || outcomes > big) fail("random_pom: outcome count must be in [1, dim * dilation]");
  const Matrix u = haar_unitary(big, rng);
  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<Matrix> elements(outcomes, Matrix::Zero(d, d));
  for (std::size_t m = 0; m < big; ++m) {
    const std::size_t group = m * outcomes / big;
    const Eigen::VectorXcd v = u.col(static_cast<Eigen::Index>(m)).head(d);
    elements[group] += v * v.adjoint();
  }
  for (Matrix& e : elements) e = 0.5 * (e + e.adjoint());
  return PomSet(std::move(elements));
}

std::vector<double> random_priors(std::size_t count, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(count);
  for (double& v : p) v = expo(rng);
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  // Put the rounding residue on the largest entry so the sum is 1 to 1e-12.
  auto it = std::max_element(p.begin(), p.end());
  *it += 1.0 - std::accumulate(p.begin(), p.end(), 0.0);
  return p;
}

}  // namespace retroimg::hilbert
