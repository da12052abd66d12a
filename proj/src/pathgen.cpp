#include "rqmcis/pathgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rqmcis/errors.hpp"

namespace rqmcis {

std::string_view path_method_name(PathMethod method) noexcept {
  switch (method) {
    case PathMethod::Cholesky: return "cholesky";
    case PathMethod::BrownianBridge: return "bridge";
    case PathMethod::PCA: return "pca";
  }
  return "unknown";
}

PathMethod parse_path_method(std::string_view name) {
  if (name == "cholesky") return PathMethod::Cholesky;
  if (name == "bridge" || name == "brownian_bridge") return PathMethod::BrownianBridge;
  if (name == "pca") return PathMethod::PCA;
  throw DomainError("unknown path method '" + std::string(name) + "'");
}

Eigen::MatrixXd bm_covariance(std::size_t steps, double maturity) {
  if (steps == 0) throw DomainError("bm_covariance: steps must be positive");
  if (!(maturity > 0.0)) throw DomainError("bm_covariance: maturity must be positive");
  const double dt = maturity / static_cast<double>(steps);
  const auto d = static_cast<Eigen::Index>(steps);
  Eigen::MatrixXd cov(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) cov(i, j) = dt * static_cast<double>(std::min(i, j) + 1);
  return cov;
}

PathFactor cholesky_factor(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) throw DomainError("cholesky_factor: matrix must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericError("cholesky_factor: matrix is not positive definite");
  PathFactor f;
  f.method = PathMethod::Cholesky;
  f.steps = static_cast<std::size_t>(cov.rows());
  f.maturity = cov(cov.rows() - 1, cov.cols() - 1);
  f.matrix = llt.matrixL();
  return f;
}

PathFactor brownian_bridge_factor(std::size_t steps, double maturity) {
  if (steps == 0) throw DomainError("brownian_bridge_factor: steps must be positive");
  if (!(maturity > 0.0)) throw DomainError("brownian_bridge_factor: maturity must be positive");
  const std::size_t d = steps;
  const double dt = maturity / static_cast<double>(d);
  auto t = [dt](std::size_t i) { return dt * static_cast<double>(i + 1); };

  // Construction order: variable 0 fixes the terminal point, then each later
  // variable fills the midpoint of the leftmost unfilled gap, sweeping right.
  std::vector<std::size_t> filled(d, 0), target(d), left(d), right(d);
  std::vector<double> left_weight(d, 0.0), right_weight(d, 0.0), stddev(d);
  filled[d - 1] = 1;
  target[0] = d - 1;
  stddev[0] = std::sqrt(t(d - 1));
  std::size_t j = 0;
  for (std::size_t i = 1; i < d; ++i) {
    while (filled[j]) ++j;
    std::size_t k = j;
    while (!filled[k]) ++k;
    const std::size_t l = j + ((k - 1 - j) >> 1);
    filled[l] = i + 1;
    target[i] = l;
    left[i] = j;
    right[i] = k;
    const double t_left = j == 0 ? 0.0 : t(j - 1);
    left_weight[i] = (t(k) - t(l)) / (t(k) - t_left);
    right_weight[i] = (t(l) - t_left) / (t(k) - t_left);
    stddev[i] = std::sqrt((t(l) - t_left) * (t(k) - t(l)) / (t(k) - t_left));
    j = k + 1;
    if (j >= d) j = 0;
  }

  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  // Column c of A is the path produced by the unit vector e_c; build all
  // columns at once by propagating rows.
  a.row(static_cast<Eigen::Index>(d - 1))(0) = stddev[0];
  for (std::size_t i = 1; i < d; ++i) {
    const auto l = static_cast<Eigen::Index>(target[i]);
    Eigen::RowVectorXd row = right_weight[i] * a.row(static_cast<Eigen::Index>(right[i]));
    if (left[i] != 0) row += left_weight[i] * a.row(static_cast<Eigen::Index>(left[i] - 1));
    row(static_cast<Eigen::Index>(i)) += stddev[i];
    a.row(l) = row;
  }
  return {PathMethod::BrownianBridge, d, maturity, std::move(a)};
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve_symmetric(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) throw DomainError("eigen decomposition: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("eigen decomposition did not converge");
  return solver;
}

}  // namespace

Eigen::VectorXd descending_eigenvalues(const Eigen::MatrixXd& cov) {
  return solve_symmetric(cov).eigenvalues().reverse();
}

PathFactor pca_factor(const Eigen::MatrixXd& cov) {
  const auto solver = solve_symmetric(cov);
  const Eigen::Index n = cov.rows();
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index src = n - 1 - c;  // Eigen sorts ascending
    const double lambda = solver.eigenvalues()(src);
    if (lambda <= 0.0) throw NumericError("pca_factor: matrix is not positive definite");
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    if (v.sum() < 0.0) v = -v;
    a.col(c) = std::sqrt(lambda) * v;
  }
  return {PathMethod::PCA, static_cast<std::size_t>(n), cov(n - 1, n - 1), std::move(a)};
}

PathFactor make_path_factor(PathMethod method, std::size_t steps, double maturity) {
  switch (method) {
    case PathMethod::Cholesky: {
      PathFactor f = cholesky_factor(bm_covariance(steps, maturity));
      f.maturity = maturity;
      return f;
    }
    case PathMethod::BrownianBridge: return brownian_bridge_factor(steps, maturity);
    case PathMethod::PCA: {
      PathFactor f = pca_factor(bm_covariance(steps, maturity));
      f.maturity = maturity;
      return f;
    }
  }
  throw DomainError("make_path_factor: unknown method");
}

ConditionalFactor conditional_factor(PathMethod method, std::size_t steps, double maturity) {
  if (steps == 0) throw DomainError("conditional_factor: steps must be positive");
  if (!(maturity > 0.0)) throw DomainError("conditional_factor: maturity must be positive");
  ConditionalFactor cf;
  cf.method = method;
  cf.steps = steps;
  cf.maturity = maturity;
  if (steps == 1) return cf;
  // t_{min(i,j)+1} - t_1 = dt * min(i,j): a Brownian covariance on d-1 steps
  // over the horizon T - dt.
  const double dt = maturity / static_cast<double>(steps);
  cf.matrix = make_path_factor(method, steps - 1, maturity - dt).matrix;
  return cf;
}

PathFactor conditional_path_factor(const ConditionalFactor& cond) {
  const std::size_t d = cond.steps;
  if (d == 0) throw DomainError("conditional_path_factor: empty factor");
  const auto n = static_cast<Eigen::Index>(d);
  const double dt = cond.maturity / static_cast<double>(d);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.col(0).setConstant(std::sqrt(dt));
  if (d > 1) a.bottomRightCorner(n - 1, n - 1) = cond.matrix;
  return {cond.method, d, cond.maturity, std::move(a)};
}

double factor_residual(const Eigen::MatrixXd& factor, const Eigen::MatrixXd& cov) {
  return (factor * factor.transpose() - cov).cwiseAbs().maxCoeff();
}

}  // namespace rqmcis
