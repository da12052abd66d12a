#include "rqmcis/models.hpp"

#include <cmath>
#include <limits>

#include "rqmcis/errors.hpp"
#include "rqmcis/mathfn.hpp"

namespace rqmcis {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

void BsAsianSpec::validate() const {
  require(s0 > 0.0, "S0 must be positive");
  require(sigma > 0.0, "sigma must be positive");
  require(maturity > 0.0, "T must be positive");
  require(steps >= 1, "d must be at least 1");
  require(strike >= 0.0, "K must be nonnegative");
  require(std::isfinite(rate), "r must be finite");
}

void BasketSpec::validate() const {
  require(s0_1 > 0.0 && s0_2 > 0.0, "initial prices must be positive");
  require(sigma1 > 0.0 && sigma2 > 0.0, "volatilities must be positive");
  require(std::fabs(rho) < 1.0, "|rho| must be below 1");
  require(w1 >= 0.0 && w2 >= 0.0, "weights must be nonnegative");
  require(std::fabs(w1 + w2 - 1.0) <= 1e-12, "weights must sum to 1");
  require(maturity > 0.0, "T must be positive");
  require(steps >= 1, "d must be at least 1");
  require(strike >= 0.0, "K must be nonnegative");
  require(std::isfinite(rate), "r must be finite");
}

void HestonSpec::validate() const {
  require(s0 > 0.0, "S0 must be positive");
  require(v0 >= 0.0 && theta >= 0.0 && kappa >= 0.0 && vol_of_vol >= 0.0,
          "V0, theta, nu and sigma must be nonnegative");
  require(std::fabs(rho) < 1.0, "|rho| must be below 1");
  require(maturity > 0.0, "T must be positive");
  require(steps >= 1, "d must be at least 1");
  require(strike >= 0.0, "K must be nonnegative");
  require(std::isfinite(rate), "r must be finite");
}

std::string_view model_name(const ModelSpec& spec) noexcept {
  static constexpr std::string_view names[] = {"bs_asian", "basket", "heston"};
  return names[spec.index()];
}

void validate(const ModelSpec& spec) {
  std::visit([](const auto& s) { s.validate(); }, spec);
}

std::size_t steps_of(const ModelSpec& spec) noexcept {
  return std::visit([](const auto& s) { return s.steps; }, spec);
}

double strike_of(const ModelSpec& spec) noexcept {
  return std::visit([](const auto& s) { return s.strike; }, spec);
}

void set_strike(ModelSpec& spec, double strike) noexcept {
  std::visit([strike](auto& s) { s.strike = strike; }, spec);
}

std::size_t normal_dimension(const ModelSpec& spec) noexcept {
  return std::holds_alternative<BsAsianSpec>(spec) ? steps_of(spec) : 2 * steps_of(spec);
}

std::vector<double> bs_asset_path(const BsAsianSpec& spec, const PathFactor& factor, std::span<const double> x) {
  const std::size_t d = spec.steps;
  if (x.size() != d || static_cast<std::size_t>(factor.matrix.rows()) != d)
    throw DomainError("bs_asset_path: dimension mismatch");
  const double dt = spec.maturity / static_cast<double>(d);
  const double drift = spec.rate - 0.5 * spec.sigma * spec.sigma;
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(d));
  const Eigen::VectorXd b = factor.matrix * xv;
  std::vector<double> s(d);
  for (std::size_t i = 0; i < d; ++i)
    s[i] = spec.s0 * std::exp(drift * static_cast<double>(i + 1) * dt + spec.sigma * b(static_cast<Eigen::Index>(i)));
  return s;
}

PayoffParts bs_asian_parts(const BsAsianSpec& spec, const PathFactor& factor, std::span<const double> x) {
  const std::vector<double> s = bs_asset_path(spec, factor, x);
  double sum = 0.0;
  for (double v : s) sum += v;
  const double diff = sum / static_cast<double>(s.size()) - spec.strike;
  return {std::exp(-spec.rate * spec.maturity) * diff, diff};
}

double bs_asian_payoff(const BsAsianSpec& spec, const PathFactor& factor, std::span<const double> x) {
  return bs_asian_parts(spec, factor, x).value();
}

PayoffParts basket_parts(const BasketSpec& spec, const PathFactor& factor, std::span<const double> z) {
  const std::size_t d = spec.steps;
  if (z.size() != 2 * d || static_cast<std::size_t>(factor.matrix.rows()) != d)
    throw DomainError("basket_payoff: dimension mismatch");
  const auto n = static_cast<Eigen::Index>(d);
  const Eigen::Map<const Eigen::VectorXd> own(z.data(), n);
  const Eigen::Map<const Eigen::VectorXd> common(z.data() + d, n);
  const Eigen::VectorXd b_own = factor.matrix * own;
  const Eigen::VectorXd b_common = factor.matrix * common;
  const double dt = spec.maturity / static_cast<double>(d);
  const double rho_bar = std::sqrt(1.0 - spec.rho * spec.rho);
  const double mu1 = spec.rate - 0.5 * spec.sigma1 * spec.sigma1;
  const double mu2 = spec.rate - 0.5 * spec.sigma2 * spec.sigma2;
  double sum1 = 0.0, sum2 = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double t = static_cast<double>(j + 1) * dt;
    sum1 += spec.s0_1 * std::exp(mu1 * t + spec.sigma1 * (spec.rho * b_common(j) + rho_bar * b_own(j)));
    sum2 += spec.s0_2 * std::exp(mu2 * t + spec.sigma2 * b_common(j));
  }
  const double average = (spec.w1 * sum1 + spec.w2 * sum2) / static_cast<double>(d);
  const double diff = average - spec.strike;
  return {std::exp(-spec.rate * spec.maturity) * diff, diff};
}

double basket_payoff(const BasketSpec& spec, const PathFactor& factor, std::span<const double> z) {
  return basket_parts(spec, factor, z).value();
}

HestonPath heston_path(const HestonSpec& spec, std::span<const double> z) {
  const std::size_t d = spec.steps;
  if (z.size() != 2 * d) throw DomainError("heston_path: dimension mismatch");
  const double dt = spec.maturity / static_cast<double>(d);
  const double sqrt_dt = std::sqrt(dt);
  const double rho_hat = std::sqrt(1.0 - spec.rho * spec.rho);
  HestonPath path;
  path.price.resize(d);
  path.variance.resize(d + 1);
  path.variance[0] = spec.v0;
  double log_s = std::log(spec.s0);
  double v = spec.v0;
  for (std::size_t j = 0; j < d; ++j) {
    const double v_pos = std::max(v, 0.0);
    const double root_v = std::sqrt(v_pos);
    const double z_asset = z[2 * j];
    const double z_var = z[2 * j + 1];
    log_s += spec.rate * dt - 0.5 * v_pos * dt + sqrt_dt * root_v * (rho_hat * z_asset + spec.rho * z_var);
    v += spec.kappa * (spec.theta - v_pos) * dt + spec.vol_of_vol * sqrt_dt * root_v * z_var;
    path.price[j] = std::exp(log_s);
    path.variance[j + 1] = v;
  }
  return path;
}

PayoffParts heston_parts(const HestonSpec& spec, std::span<const double> z) {
  const HestonPath path = heston_path(spec, z);
  double sum = 0.0;
  for (double s : path.price) sum += s;
  const double diff = sum / static_cast<double>(spec.steps) - spec.strike;
  return {std::exp(-spec.rate * spec.maturity) * diff, diff};
}

double heston_payoff(const HestonSpec& spec, std::span<const double> z) { return heston_parts(spec, z).value(); }

HestonFactors heston_factors(PathMethod method, std::size_t steps, double maturity) {
  HestonFactors f;
  f.method = method;
  f.asset = conditional_path_factor(conditional_factor(method, steps, maturity));
  f.variance = make_path_factor(method, steps, maturity);
  return f;
}

std::vector<double> heston_increments(const HestonFactors& factors, std::span<const double> z) {
  const auto d = static_cast<Eigen::Index>(factors.asset.matrix.rows());
  if (z.size() != 2 * static_cast<std::size_t>(d)) throw DomainError("heston_increments: dimension mismatch");
  if (factors.method == PathMethod::Cholesky) return {z.begin(), z.end()};
  Eigen::VectorXd za(d), zv(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    za(j) = z[static_cast<std::size_t>(2 * j)];
    zv(j) = z[static_cast<std::size_t>(2 * j + 1)];
  }
  const Eigen::VectorXd ba = factors.asset.matrix * za;
  const Eigen::VectorXd bv = factors.variance.matrix * zv;
  const double inv_sqrt_dt = std::sqrt(static_cast<double>(d) / factors.asset.maturity);
  std::vector<double> out(z.size());
  for (Eigen::Index j = 0; j < d; ++j) {
    const double prev_a = j > 0 ? ba(j - 1) : 0.0;
    const double prev_v = j > 0 ? bv(j - 1) : 0.0;
    out[static_cast<std::size_t>(2 * j)] = (ba(j) - prev_a) * inv_sqrt_dt;
    out[static_cast<std::size_t>(2 * j + 1)] = (bv(j) - prev_v) * inv_sqrt_dt;
  }
  return out;
}

double heston_payoff(const HestonSpec& spec, const HestonFactors& factors, std::span<const double> z) {
  return heston_payoff(spec, heston_increments(factors, z));
}

double black_scholes_call(double s0, double strike, double rate, double sigma, double maturity) {
  const double discount = std::exp(-rate * maturity);
  if (strike <= 0.0) return s0;
  const double vol = sigma * std::sqrt(maturity);
  const double d1 = (std::log(s0 / strike) + (rate + 0.5 * sigma * sigma) * maturity) / vol;
  const double d2 = d1 - vol;
  return s0 * std_normal_cdf(d1) - strike * discount * std_normal_cdf(d2);
}

}  // namespace rqmcis
