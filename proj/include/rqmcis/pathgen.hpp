#pragma once

#include <cstddef>
#include <string_view>

#include <Eigen/Core>

namespace rqmcis {

enum class PathMethod { Cholesky, BrownianBridge, PCA };

std::string_view path_method_name(PathMethod method) noexcept;
/// Accepts "cholesky", "bridge"/"brownian_bridge", "pca". Throws DomainError.
PathMethod parse_path_method(std::string_view name);

/// A with A*A^T equal to the covariance of (B_{t_1}, ..., B_{t_d}).
struct PathFactor {
  PathMethod method = PathMethod::Cholesky;
  std::size_t steps = 0;
  double maturity = 0.0;
  Eigen::MatrixXd matrix;
};

/// Factor C of the covariance of (B_{t_2}-B_{t_1}, ..., B_{t_d}-B_{t_1}),
/// the increments left after conditioning on the first time step.
struct ConditionalFactor {
  PathMethod method = PathMethod::Cholesky;
  std::size_t steps = 0;  // d of the full path; matrix is (d-1)x(d-1)
  double maturity = 0.0;
  Eigen::MatrixXd matrix;
};

/// Sigma_ij = (T/d) * min(i, j) with 1-based i, j.
Eigen::MatrixXd bm_covariance(std::size_t steps, double maturity);

PathFactor cholesky_factor(const Eigen::MatrixXd& cov);
PathFactor brownian_bridge_factor(std::size_t steps, double maturity);
/// Columns are eigenvectors scaled by sqrt(eigenvalue), eigenvalues descending.
/// Each column's sign is chosen so that its entries sum to a nonnegative value.
PathFactor pca_factor(const Eigen::MatrixXd& cov);

/// Eigenvalues of a symmetric matrix in descending order.
Eigen::VectorXd descending_eigenvalues(const Eigen::MatrixXd& cov);

PathFactor make_path_factor(PathMethod method, std::size_t steps, double maturity);

/// Empty 0x0 factor for steps == 1: the conditioning variable then carries
/// all the randomness.
ConditionalFactor conditional_factor(PathMethod method, std::size_t steps, double maturity);

/// Full d x d factor [sqrt(t_1) * 1 | (0; C)]: coordinate 1 drives B_{t_1}
/// and the remaining coordinates drive the conditional increments.
PathFactor conditional_path_factor(const ConditionalFactor& cond);

/// max_ij |(A A^T - cov)_ij|
double factor_residual(const Eigen::MatrixXd& factor, const Eigen::MatrixXd& cov);

}  // namespace rqmcis
