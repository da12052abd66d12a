#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>

#include "rqmcis/models.hpp"
#include "rqmcis/pathgen.hpp"

namespace rqmcis {

using NormalFunction = std::function<double(std::span<const double>)>;

/// A payoff with its first driving normal integrated out analytically.
/// Values are discounted and nonnegative.
struct PreintegratedIntegrand {
  std::string_view model;
  std::size_t dimension = 0;
  bool discounted = true;
  NormalFunction fn;

  double operator()(std::span<const double> z) const { return fn(z); }
};

/// Conditional expectation of the discounted Asian payoff given the
/// increments after t_1; z has d-1 entries driving C.
double bs_asian_preint(const BsAsianSpec& spec, const ConditionalFactor& cond, std::span<const double> z);

struct PsiSolveResult {
  double psi = 0.0;  // may be -inf (always in the money) or +inf (never)
  int iterations = 0;
  double lower = 0.0, upper = 0.0;  // final bracket
};

/// Root psi of basket-average(z_1; z_rest) = K in the first coordinate.
/// The factor's first column must be strictly positive.
PsiSolveResult solve_psi_basket(const BasketSpec& spec, const PathFactor& factor, std::span<const double> z_rest);

/// z_rest = (z_2, ..., z_2d).
double basket_preint(const BasketSpec& spec, const PathFactor& factor, std::span<const double> z_rest);

/// z_rest = (z_2, ..., z_2d), raw increments.
double heston_preint(const HestonSpec& spec, std::span<const double> z_rest);
/// z_rest mapped through `factors`; z_1 still drives only the first increment.
double heston_preint(const HestonSpec& spec, const HestonFactors& factors, std::span<const double> z_rest);

/// Numerical conditional expectation of payoff(x) over x_j ~ N(0,1) with the
/// other coordinates fixed at x_rest (x_j is inserted at 0-based position j).
/// The payoff is assumed to switch on once as x_j increases; the switch
/// point is bracketed by bisection and the integral split there. The domain
/// is truncated to |x_j| <= 12.
double quadrature_preint(const NormalFunction& payoff, std::size_t j, std::span<const double> x_rest,
                         double abs_tol = 1e-11);

/// Factor used for the basket: coordinate 1 loads sqrt(dt) on every step
/// and the conditional increments are factored with `method`. For Cholesky
/// this is exactly the Cholesky factor of the Brownian covariance.
PathFactor basket_factor(PathMethod method, std::size_t steps, double maturity);

/// Closed-form preintegrated integrand of the given model.
PreintegratedIntegrand make_preintegrated(const ModelSpec& spec, PathMethod method);

/// Full-dimensional payoff on normals whose first coordinate is the one the
/// preintegrated integrand integrates out.
NormalFunction make_conditioned_payoff(const ModelSpec& spec, PathMethod method);

}  // namespace rqmcis
