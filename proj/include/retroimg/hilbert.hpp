#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace retroimg::hilbert {

using Matrix = Eigen::MatrixXcd;

/// Hermitian, positive semidefinite (eigenvalues >= -1e-10), unit trace.
class DensityOperator {
 public:
  explicit DensityOperator(Matrix rho);
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rho_.rows()); }
  const Matrix& matrix() const noexcept { return rho_; }

 private:
  Matrix rho_;
};

/// Probability operator measure: PSD elements summing to the identity.
class PomSet {
 public:
  explicit PomSet(std::vector<Matrix> elements);
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return elements_.size(); }
  const Matrix& element(std::size_t j) const { return elements_.at(j); }
  const std::vector<Matrix>& elements() const noexcept { return elements_; }

 private:
  std::vector<Matrix> elements_;
  std::size_t dim_ = 0;
};

/// Preparation ensemble {P(i), rho_i}.
class Ensemble {
 public:
  Ensemble(std::vector<double> priors, std::vector<DensityOperator> states);
  std::size_t size() const noexcept { return states_.size(); }
  std::size_t dim() const noexcept { return states_.front().dim(); }
  std::span<const double> priors() const noexcept { return priors_; }
  const DensityOperator& state(std::size_t i) const { return states_.at(i); }

 private:
  std::vector<double> priors_;
  std::vector<DensityOperator> states_;
};

/// U(tau) with U^dagger U = 1 to 1e-10. `elapsed` is t_m - t_p, kept for the record.
class UnitaryEvolution {
 public:
  explicit UnitaryEvolution(Matrix u, double elapsed = 0.0);
  static UnitaryEvolution identity(std::size_t dim);
  std::size_t dim() const noexcept { return static_cast<std::size_t>(u_.rows()); }
  const Matrix& matrix() const noexcept { return u_; }
  double elapsed() const noexcept { return elapsed_; }

 private:
  Matrix u_;
  double elapsed_;
};

/// P(j|i) = Tr(U rho U^dagger Pi_j) for every outcome j.
std::vector<double> predictive_conditional(const DensityOperator& rho, const PomSet& pom,
                                           const UnitaryEvolution& u);

/// P(i|j) for every prepared state i, from the retrodictive state
/// Pi_j / Tr Pi_j evolved back to the preparation time. Throws
/// Error(DarkConditional) when outcome j is impossible.
std::vector<double> retrodictive_conditional(const Ensemble& ensemble, const PomSet& pom,
                                             std::size_t j, const UnitaryEvolution& u);

/// Column-stochastic forward(j, i) = P(j|i) to column-stochastic result(i, j) = P(i|j).
/// Throws Error(DarkConditional) naming the first outcome with zero total probability.
Eigen::MatrixXd bayes_invert(std::span<const double> priors, const Eigen::MatrixXd& forward);

/// forward(j, i) = P(j|i) for every ensemble member.
Eigen::MatrixXd predictive_matrix(const Ensemble& ensemble, const PomSet& pom,
                                  const UnitaryEvolution& u);

// Seeded random instances ------------------------------------------------------

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
Matrix haar_unitary(std::size_t dim, std::mt19937_64& rng);

/// Normalised Wishart state G G^dagger / Tr; `rank` columns (0 = full rank).
DensityOperator random_density_operator(std::size_t dim, std::mt19937_64& rng,
                                        std::size_t rank = 0);

/// POM from projectors of a Haar unitary on a dim * dilation space, grouped
/// into `outcomes` sets and compressed to the first `dim` basis vectors.
PomSet random_pom(std::size_t dim, std::size_t outcomes, std::mt19937_64& rng,
                  std::size_t dilation = 2);

/// Priors drawn uniformly from the simplex.
std::vector<double> random_priors(std::size_t count, std::mt19937_64& rng);

}  // namespace retroimg::hilbert
