#include "rqmcis/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rqmcis/analysis.hpp"
#include "rqmcis/estimators.hpp"
#include "rqmcis/mathfn.hpp"
#include "rqmcis/odis.hpp"
#include "rqmcis/preint.hpp"
#include "rqmcis/rng.hpp"

namespace rqmcis {

ValidationHooks::ValidationHooks()
    : bs_preint(&bs_asian_preint), basket_preint(&rqmcis::basket_preint), heston_preint(static_cast<double (*)(const HestonSpec&, const HestonFactors&, std::span<const double>)>(
          &rqmcis::heston_preint)) {}

namespace {

CheckResult at_most(std::string name, double measured, double threshold) {
  return {std::move(name), measured, threshold, measured <= threshold};
}

// Scaled discrepancy: relative error for values above 1e-2, absolute error
// divided by 1e-2 below, so a threshold of 1e-8 means max(1e-10, 1e-8 |v|).
double scaled_gap(double closed, double reference) {
  return std::fabs(closed - reference) / std::max(1e-2, std::fabs(reference));
}

template <class ClosedForm>
double max_preint_gap(const DirectionNumbers& dirs, std::size_t dim, const NormalFunction& payoff,
                      ClosedForm&& closed, std::size_t points, std::uint64_t seed) {
  const SobolGenerator gen(dirs, dim, seed, true);
  std::vector<double> u(dim), z(dim);
  double worst = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    gen.point(k, u);
    for (std::size_t i = 0; i < dim; ++i) z[i] = std_normal_inv_cdf(u[i]);
    worst = std::max(worst, scaled_gap(closed(z), quadrature_preint(payoff, 0, z)));
  }
  return worst;
}

struct MeanSe {
  double mean = 0.0, se = 0.0;
};

MeanSe mc_mean(const UnitFunction& f, std::size_t dim, std::size_t n, std::uint64_t seed) {
  const CounterRng rng(seed);
  std::vector<double> u(dim);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < dim; ++i) u[i] = rng.uniform(j * dim + i);
    const double v = f(u);
    const double delta = v - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (v - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n))};
}

}  // namespace

std::vector<CheckResult> run_validation_suite(const DirectionNumbers& directions, const ValidationHooks& hooks) {
  std::vector<CheckResult> out;

  // Closed-form preintegration against the quadrature oracle.
  {
    double worst_bs = 0.0, worst_basket = 0.0, worst_heston = 0.0;
    for (PathMethod method : {PathMethod::Cholesky, PathMethod::BrownianBridge, PathMethod::PCA}) {
      const auto salt = static_cast<std::uint64_t>(method) * 101;
      for (std::size_t d : {2u, 4u, 8u}) {
        BsAsianSpec bs;
        bs.steps = d;
        bs.strike = 120.0;
        const ConditionalFactor cond = conditional_factor(method, d, bs.maturity);
        worst_bs = std::max(worst_bs, max_preint_gap(directions, d - 1, make_conditioned_payoff(bs, method),
                                                     [&](std::span<const double> z) { return hooks.bs_preint(bs, cond, z); },
                                                     100, salt + 11 + d));
        BasketSpec basket;
        basket.steps = d;
        basket.strike = 110.0;
        const PathFactor a = basket_factor(method, d, basket.maturity);
        worst_basket = std::max(
            worst_basket, max_preint_gap(directions, 2 * d - 1, make_conditioned_payoff(basket, method),
                                         [&](std::span<const double> z) { return hooks.basket_preint(basket, a, z); },
                                         100, salt + 23 + d));
        HestonSpec heston;
        heston.steps = d;
        heston.strike = 60.0;
        const HestonFactors f = heston_factors(method, d, heston.maturity);
        worst_heston = std::max(
            worst_heston, max_preint_gap(directions, 2 * d - 1, make_conditioned_payoff(heston, method),
                                         [&](std::span<const double> z) { return hooks.heston_preint(heston, f, z); },
                                         100, salt + 37 + d));
      }
    }
    out.push_back(at_most("preint_vs_quadrature/bs_asian", worst_bs, 1e-8));
    out.push_back(at_most("preint_vs_quadrature/basket", worst_basket, 1e-8));
    out.push_back(at_most("preint_vs_quadrature/heston", worst_heston, 1e-8));
  }

  // Factorisation residuals at d = 80.
  {
    const Eigen::MatrixXd cov = bm_covariance(80, 1.0);
    for (PathMethod m : {PathMethod::Cholesky, PathMethod::BrownianBridge, PathMethod::PCA})
      out.push_back(at_most("factor_residual/" + std::string(path_method_name(m)),
                            factor_residual(make_path_factor(m, 80, 1.0).matrix, cov), 1e-9));
  }

  // One-dimensional stratification of the first 2^m points, m <= 12.
  {
    double violations = 0.0;
    for (int variant = 0; variant < 3; ++variant) {
      const SobolGenerator gen(directions, 10, 1000 + static_cast<std::uint64_t>(variant), variant > 0);
      const PointMatrix pts = gen.block(std::size_t{1} << 12);
      for (Eigen::Index j = 0; j < 10; ++j)
        for (int m = 0; m <= 12; ++m) {
          const std::size_t cells = std::size_t{1} << m;
          std::vector<int> hits(cells, 0);
          for (std::size_t i = 0; i < cells; ++i)
            ++hits[static_cast<std::size_t>(std::ldexp(pts(static_cast<Eigen::Index>(i), j), m))];
          violations += static_cast<double>(std::count_if(hits.begin(), hits.end(), [](int h) { return h != 1; }));
        }
    }
    out.push_back(at_most("sobol_stratification/violations", violations, 0.0));
  }

  // Soft clamp: value and slope continuity at the four knots.
  {
    double jump = 0.0;
    for (double R : {1.5, 2.0, 5.0}) {
      for (double knot : {-R, -R + 1.0, R - 1.0, R}) {
        const double eps = 1e-12 * std::max(1.0, R);
        jump = std::max(jump, std::fabs(smooth_clip(knot - eps, R) - smooth_clip(knot + eps, R)));
        jump = std::max(jump, std::fabs(smooth_clip_derivative(knot - eps, R) - smooth_clip_derivative(knot + eps, R)));
      }
    }
    out.push_back(at_most("smooth_clip/knot_jump", jump, 1e-9));
  }

  // Likelihood-ratio unbiasedness: preintegrated integrand with and without IS.
  {
    BsAsianSpec bs;
    bs.steps = 4;
    bs.strike = 120.0;
    const Problem p = make_problem(bs, PathMethod::PCA, nullptr);
    const std::size_t dim = p.dimension(Method::CQMC);
    const MeanSe plain = mc_mean(p.integrand(Method::CQMC), dim, 100000, 101);
    const MeanSe weighted = mc_mean(p.integrand(Method::CQMC_IS), dim, 100000, 202);
    const double z = std::fabs(plain.mean - weighted.mean) / std::hypot(plain.se, weighted.se);
    out.push_back(at_most("is_unbiasedness/z_score", z, 4.0));
  }

  // Gaussian proposals: tail moments decay under a C exp(-R^2/4) envelope.
  {
    double worst = -std::numeric_limits<double>::infinity();
    bool finite = true;
    const double radii[] = {3.0, 4.0, 5.0, 6.0};
    for (double mu_norm : {0.0, 2.0})
      for (double B : {0.0, 1.0}) {
        ISProposal q;
        q.mu = {mu_norm, 0.0};
        double values[4];
        for (int k = 0; k < 4; ++k) values[k] = tail_moment_estimate(q, B, radii[k], 200000, 77);
        const TailDecayFit fit = fit_tail_decay(radii, values, 0.0, 0.25, 2.0);
        finite = finite && std::isfinite(fit.log_c);
        for (int k = 1; k < 4; ++k) worst = std::max(worst, fit.residuals[static_cast<std::size_t>(k)]);
        for (int k = 1; k < 4; ++k) finite = finite && values[k] < values[k - 1];
      }
    out.push_back(at_most("tail_decay/max_log_residual", finite ? worst : std::numeric_limits<double>::infinity(), 0.0));
  }

  // d = 1: preintegration consumes the only normal, giving the BS call.
  {
    BsAsianSpec bs;
    bs.steps = 1;
    const ConditionalFactor cond = conditional_factor(PathMethod::Cholesky, 1, bs.maturity);
    const double exact = black_scholes_call(bs.s0, bs.strike, bs.rate, bs.sigma, bs.maturity);
    out.push_back(at_most("bs_d1_anchor/abs_error", std::fabs(hooks.bs_preint(bs, cond, {}) - exact), 1e-12));
  }
  return out;
}

}  // namespace rqmcis
