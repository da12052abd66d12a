#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "rqmcis/pathgen.hpp"

namespace rqmcis {

/// Arithmetic Asian call under Black-Scholes, monitored at t_i = i*T/d.
struct BsAsianSpec {
  double s0 = 100.0;
  double sigma = 0.4;
  double rate = 0.1;
  double maturity = 1.0;
  std::size_t steps = 80;
  double strike = 100.0;

  void validate() const;
};

/// Two-asset basket Asian call. Asset 1 loads on both driving motions,
/// asset 2 on the second one only.
struct BasketSpec {
  double s0_1 = 100.0, s0_2 = 100.0;
  double sigma1 = 0.3, sigma2 = 0.1;
  double rho = 0.5;
  double w1 = 0.7, w2 = 0.3;
  double rate = 0.05;
  double maturity = 1.0;
  std::size_t steps = 15;
  double strike = 100.0;

  void validate() const;
};

/// Arithmetic Asian call under Heston, Euler-discretised with full truncation.
struct HestonSpec {
  double s0 = 50.0;
  double v0 = 0.2;
  double theta = 0.2;
  double kappa = 1.0;       // mean-reversion speed
  double vol_of_vol = 0.2;
  double rho = 0.5;
  double rate = 0.05;
  double maturity = 1.0;
  std::size_t steps = 5;
  double strike = 50.0;

  void validate() const;
};

using ModelSpec = std::variant<BsAsianSpec, BasketSpec, HestonSpec>;

std::string_view model_name(const ModelSpec& spec) noexcept;
void validate(const ModelSpec& spec);
std::size_t steps_of(const ModelSpec& spec) noexcept;
double strike_of(const ModelSpec& spec) noexcept;
void set_strike(ModelSpec& spec, double strike) noexcept;
/// Number of standard normals one path consumes (d or 2d).
std::size_t normal_dimension(const ModelSpec& spec) noexcept;

/// Payoff in the factored form g(x) * 1{phi(x) >= 0}: phi is the average
/// minus the strike, g the discounted value of the same difference.
struct PayoffParts {
  double g = 0.0;
  double phi = 0.0;

  double value() const noexcept { return phi >= 0.0 ? g : 0.0; }
};

/// S_i = S0 exp((r - sigma^2/2) i dt + sigma (A x)_i), i = 1..d.
std::vector<double> bs_asset_path(const BsAsianSpec& spec, const PathFactor& factor, std::span<const double> x);
PayoffParts bs_asian_parts(const BsAsianSpec& spec, const PathFactor& factor, std::span<const double> x);
double bs_asian_payoff(const BsAsianSpec& spec, const PathFactor& factor, std::span<const double> x);

/// z has 2d entries; z_{1..d} is the independent part of asset 1 and
/// z_{d+1..2d} the common driver.
PayoffParts basket_parts(const BasketSpec& spec, const PathFactor& factor, std::span<const double> z);
double basket_payoff(const BasketSpec& spec, const PathFactor& factor, std::span<const double> z);

struct HestonPath {
  std::vector<double> price;     // S_1..S_d
  std::vector<double> variance;  // V_0..V_d (unfloored Euler values)
};

/// z_{2j+1} drives the asset's independent part and z_{2j+2} the variance at
/// step j (1-based z). Negative variances enter square roots and the drift
/// as zero.
/// z[2j] drives the independent asset component of step j+1 and z[2j+1]
/// the variance; both enter the recursion as raw increments.
HestonPath heston_path(const HestonSpec& spec, std::span<const double> z);
PayoffParts heston_parts(const HestonSpec& spec, std::span<const double> z);
double heston_payoff(const HestonSpec& spec, std::span<const double> z);

/// Path factors for the two Heston Brownian motions. The asset factor keeps
/// z[0] on the first increment only; with Cholesky both are the identity on
/// increments and reproduce heston_path exactly.
struct HestonFactors {
  PathMethod method = PathMethod::Cholesky;
  PathFactor asset;
  PathFactor variance;
};

HestonFactors heston_factors(PathMethod method, std::size_t steps, double maturity);

/// Maps z through the factors to the raw increment normals of heston_path.
std::vector<double> heston_increments(const HestonFactors& factors, std::span<const double> z);

double heston_payoff(const HestonSpec& spec, const HestonFactors& factors, std::span<const double> z);

/// Black-Scholes European call price.
double black_scholes_call(double s0, double strike, double rate, double sigma, double maturity);

}  // namespace rqmcis
