#include "rqmcis/preint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rqmcis/errors.hpp"
#include "rqmcis/mathfn.hpp"
#include "rqmcis/quadrature.hpp"

namespace rqmcis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Upper tail 1 - Phi(x), accurate for large x.
double upper_tail(double x) { return std_normal_cdf(-x); }

}  // namespace

double bs_asian_preint(const BsAsianSpec& spec, const ConditionalFactor& cond, std::span<const double> z) {
  const std::size_t d = spec.steps;
  if (z.size() + 1 != d) throw DomainError("bs_asian_preint: z must have d-1 entries");
  if (d > 1 && static_cast<std::size_t>(cond.matrix.rows()) != d - 1)
    throw DomainError("bs_asian_preint: conditional factor has wrong size");
  const double dt = spec.maturity / static_cast<double>(d);
  const double omega = spec.rate - 0.5 * spec.sigma * spec.sigma;

  double sum = spec.s0;  // j = 1: no increment after t_1
  if (d > 1) {
    const auto n = static_cast<Eigen::Index>(d - 1);
    const Eigen::VectorXd incr = cond.matrix * Eigen::Map<const Eigen::VectorXd>(z.data(), n);
    for (Eigen::Index j = 0; j < n; ++j)
      sum += spec.s0 * std::exp(omega * static_cast<double>(j + 1) * dt + spec.sigma * incr(j));
  }
  const double s_tilde = sum / static_cast<double>(d);
  const double vol = spec.sigma * std::sqrt(dt);
  const double psi =
      spec.strike > 0.0 ? (std::log(spec.strike) - std::log(s_tilde) - omega * dt) / vol : -kInf;
  const double value = std::exp(spec.rate * (dt - spec.maturity)) * s_tilde * upper_tail(psi - vol) -
                       std::exp(-spec.rate * spec.maturity) * spec.strike * upper_tail(psi);
  return std::max(value, 0.0);
}

namespace {

// Basket average as sum_j a_j exp(b_j z_1) + c.
struct BasketAverage {
  std::vector<double> a, b;
  double c = 0.0;

  double operator()(double z1) const {
    double s = c;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::exp(b[j] * z1);
    return s;
  }
  double derivative(double z1) const {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j] * std::exp(b[j] * z1);
    return s;
  }
};

BasketAverage basket_average(const BasketSpec& spec, const PathFactor& factor, std::span<const double> z_rest) {
  const std::size_t d = spec.steps;
  if (z_rest.size() + 1 != 2 * d) throw DomainError("basket_preint: z_rest must have 2d-1 entries");
  if (static_cast<std::size_t>(factor.matrix.rows()) != d) throw DomainError("basket_preint: factor has wrong size");
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::VectorXd own(n);
  own(0) = 0.0;
  for (Eigen::Index k = 1; k < n; ++k) own(k) = z_rest[static_cast<std::size_t>(k - 1)];
  const Eigen::Map<const Eigen::VectorXd> common(z_rest.data() + (d - 1), n);
  const Eigen::VectorXd b_own = factor.matrix * own;
  const Eigen::VectorXd b_common = factor.matrix * common;

  const double dt = spec.maturity / static_cast<double>(d);
  const double rho_bar = std::sqrt(1.0 - spec.rho * spec.rho);
  const double mu1 = spec.rate - 0.5 * spec.sigma1 * spec.sigma1;
  const double mu2 = spec.rate - 0.5 * spec.sigma2 * spec.sigma2;
  const double scale = 1.0 / static_cast<double>(d);
  BasketAverage avg;
  avg.a.resize(d);
  avg.b.resize(d);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double t = static_cast<double>(j + 1) * dt;
    const auto ju = static_cast<std::size_t>(j);
    avg.a[ju] = spec.w1 * scale * spec.s0_1 *
                std::exp(mu1 * t + spec.sigma1 * (spec.rho * b_common(j) + rho_bar * b_own(j)));
    avg.b[ju] = spec.sigma1 * rho_bar * factor.matrix(j, 0);
    avg.c += spec.w2 * scale * spec.s0_2 * std::exp(mu2 * t + spec.sigma2 * b_common(j));
  }
  return avg;
}

PsiSolveResult solve_psi(const BasketAverage& avg, double strike) {
  PsiSolveResult res;
  if (strike <= 0.0 || avg.c >= strike) {
    res.psi = -kInf;
    res.lower = res.upper = -kInf;
    return res;
  }
  double weight = 0.0;
  for (std::size_t j = 0; j < avg.a.size(); ++j) {
    if (avg.b[j] <= 0.0 && avg.a[j] > 0.0)
      throw DomainError("solve_psi_basket: first factor column must be strictly positive");
    weight += avg.a[j];
  }
  if (weight <= 0.0) {
    res.psi = kInf;
    res.lower = res.upper = kInf;
    return res;
  }
  auto residual = [&](double z) { return avg(z) - strike; };
  constexpr double kLimit = 1 << 20;
  double lo = 0.0, hi = 0.0;
  if (residual(0.0) > 0.0) {
    double step = 1.0;
    lo = -step;
    while (residual(lo) > 0.0) {
      hi = lo;
      step *= 2.0;
      lo = -step;
      ++res.iterations;
      if (step > kLimit) throw NumericError("solve_psi_basket: no sign change found below z1 = -2^20");
    }
  } else {
    double step = 1.0;
    hi = step;
    while (residual(hi) <= 0.0) {
      lo = hi;
      step *= 2.0;
      hi = step;
      ++res.iterations;
      if (step > kLimit) throw NumericError("solve_psi_basket: no sign change found above z1 = 2^20");
    }
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (residual(mid) > 0.0 ? hi : lo) = mid;
    ++res.iterations;
  }
  double psi = 0.5 * (lo + hi);
  const double log_k = std::log(strike);
  for (int k = 0; k < 2; ++k) {
    const double value = avg(psi);
    const double slope = avg.derivative(psi) / value;
    if (!(slope > 0.0)) break;
    const double next = psi - (std::log(value) - log_k) / slope;
    if (!std::isfinite(next)) throw NumericError("solve_psi_basket: Newton polish produced a non-finite root");
    psi = next;
    ++res.iterations;
  }
  res.psi = psi;
  res.lower = lo;
  res.upper = hi;
  return res;
}

}  // namespace

PsiSolveResult solve_psi_basket(const BasketSpec& spec, const PathFactor& factor, std::span<const double> z_rest) {
  return solve_psi(basket_average(spec, factor, z_rest), spec.strike);
}

double basket_preint(const BasketSpec& spec, const PathFactor& factor, std::span<const double> z_rest) {
  const BasketAverage avg = basket_average(spec, factor, z_rest);
  const double psi = solve_psi(avg, spec.strike).psi;
  double asset1 = 0.0;
  for (std::size_t j = 0; j < avg.a.size(); ++j)
    asset1 += avg.a[j] * std::exp(0.5 * avg.b[j] * avg.b[j]) * upper_tail(psi - avg.b[j]);
  const double value = std::exp(-spec.rate * spec.maturity) * (asset1 + (avg.c - spec.strike) * upper_tail(psi));
  return std::max(value, 0.0);
}

double heston_preint(const HestonSpec& spec, std::span<const double> z_rest) {
  return heston_preint(spec, heston_factors(PathMethod::Cholesky, spec.steps, spec.maturity), z_rest);
}

double heston_preint(const HestonSpec& spec, const HestonFactors& factors, std::span<const double> z_rest) {
  const std::size_t d = spec.steps;
  if (z_rest.size() + 1 != 2 * d) throw DomainError("heston_preint: z_rest must have 2d-1 entries");
  if (static_cast<std::size_t>(factors.asset.matrix.rows()) != d) throw DomainError("heston_preint: factor has wrong size");
  std::vector<double> z(2 * d);
  z[0] = 0.0;
  std::copy(z_rest.begin(), z_rest.end(), z.begin() + 1);
  const HestonPath path = heston_path(spec, heston_increments(factors, z));
  double sum = 0.0;
  for (double s : path.price) sum += s;
  const double s_tilde = sum / static_cast<double>(d);

  const double dt = spec.maturity / static_cast<double>(d);
  const double rho_hat = std::sqrt(1.0 - spec.rho * spec.rho);
  const double loading = rho_hat * std::sqrt(spec.v0 * dt);
  const double discount = std::exp(-spec.rate * spec.maturity);
  if (!(loading > 0.0)) return discount * std::max(s_tilde - spec.strike, 0.0);
  const double psi = spec.strike > 0.0 ? std::log(spec.strike / s_tilde) / loading : -kInf;
  const double value = discount * (s_tilde * std::exp(0.5 * loading * loading) * upper_tail(psi - loading) -
                                   spec.strike * upper_tail(psi));
  return std::max(value, 0.0);
}

double quadrature_preint(const NormalFunction& payoff, std::size_t j, std::span<const double> x_rest,
                         double abs_tol) {
  if (j > x_rest.size()) throw DomainError("quadrature_preint: coordinate index out of range");
  constexpr double kBound = 12.0;
  std::vector<double> x(x_rest.size() + 1);
  std::copy(x_rest.begin(), x_rest.begin() + static_cast<std::ptrdiff_t>(j), x.begin());
  std::copy(x_rest.begin() + static_cast<std::ptrdiff_t>(j), x_rest.end(), x.begin() + static_cast<std::ptrdiff_t>(j) + 1);
  auto f = [&](double t) {
    x[j] = t;
    return payoff(x);
  };
  auto weighted = [&](double t) { return f(t) * std_normal_pdf(t); };

  double lo = -kBound, hi = kBound;
  if (f(lo) > 0.0) return integrate_adaptive(weighted, -kBound, kBound, abs_tol).value;
  if (!(f(hi) > 0.0)) return integrate_adaptive(weighted, -kBound, kBound, abs_tol).value;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  const double left = integrate_adaptive(weighted, -kBound, hi, 0.5 * abs_tol).value;
  const double right = integrate_adaptive(weighted, hi, kBound, 0.5 * abs_tol).value;
  return left + right;
}

PathFactor basket_factor(PathMethod method, std::size_t steps, double maturity) {
  return conditional_path_factor(conditional_factor(method, steps, maturity));
}

PreintegratedIntegrand make_preintegrated(const ModelSpec& spec, PathMethod method) {
  validate(spec);
  PreintegratedIntegrand out;
  out.model = model_name(spec);
  out.dimension = normal_dimension(spec) - 1;
  if (const auto* bs = std::get_if<BsAsianSpec>(&spec)) {
    out.fn = [s = *bs, cond = conditional_factor(method, bs->steps, bs->maturity)](std::span<const double> z) {
      return bs_asian_preint(s, cond, z);
    };
  } else if (const auto* basket = std::get_if<BasketSpec>(&spec)) {
    out.fn = [s = *basket, a = basket_factor(method, basket->steps, basket->maturity)](std::span<const double> z) {
      return basket_preint(s, a, z);
    };
  } else {
    const auto& h = std::get<HestonSpec>(spec);
    out.fn = [s = h, f = heston_factors(method, h.steps, h.maturity)](std::span<const double> z) {
      return heston_preint(s, f, z);
    };
  }
  return out;
}

NormalFunction make_conditioned_payoff(const ModelSpec& spec, PathMethod method) {
  validate(spec);
  if (const auto* bs = std::get_if<BsAsianSpec>(&spec)) {
    return [s = *bs, a = conditional_path_factor(conditional_factor(method, bs->steps, bs->maturity))](
               std::span<const double> x) { return bs_asian_payoff(s, a, x); };
  }
  if (const auto* basket = std::get_if<BasketSpec>(&spec)) {
    return [s = *basket, a = basket_factor(method, basket->steps, basket->maturity)](std::span<const double> z) {
      return basket_payoff(s, a, z);
    };
  }
  const auto& h = std::get<HestonSpec>(spec);
  return [s = h, f = heston_factors(method, h.steps, h.maturity)](std::span<const double> z) {
    return heston_payoff(s, f, z);
  };
}

}  // namespace rqmcis
