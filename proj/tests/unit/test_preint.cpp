#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "rqmcis/errors.hpp"
#include "rqmcis/models.hpp"
#include "rqmcis/pathgen.hpp"
#include "rqmcis/preint.hpp"
#include "support.hpp"

using namespace rqmcis;

namespace {

constexpr PathMethod kMethods[] = {PathMethod::Cholesky, PathMethod::BrownianBridge, PathMethod::PCA};

bool within_oracle(double closed, double oracle) {
  return std::fabs(closed - oracle) <= std::max(1e-10, 1e-8 * std::fabs(oracle));
}

std::vector<std::vector<double>> conditioning_points(std::size_t dim, std::size_t count, std::uint64_t seed) {
  const SobolGenerator gen(*testing::directions(), dim, seed, true);
  std::vector<std::vector<double>> pts;
  std::vector<double> u(dim);
  for (std::size_t k = 0; k < count; ++k) {
    gen.point(k, u);
    std::vector<double> z(dim);
    for (std::size_t i = 0; i < dim; ++i) z[i] = std_normal_inv_cdf(u[i]);
    pts.push_back(std::move(z));
  }
  return pts;
}

}  // namespace

TEST_SUITE("preint") {
  TEST_CASE("quadrature oracle basics") {
    const std::vector<double> rest{0.3, -1.0};
    CHECK(quadrature_preint([](std::span<const double>) { return 1.0; }, 1, rest) == doctest::Approx(1.0).epsilon(1e-12));
    const double half_mean = quadrature_preint([](std::span<const double> x) { return x[1] >= 0.0 ? x[1] : 0.0; }, 1, rest);
    CHECK(half_mean == doctest::Approx(kInvSqrt2Pi).epsilon(1e-12));
    CHECK_THROWS_AS(quadrature_preint([](std::span<const double>) { return 1.0; }, 3, rest), DomainError);
  }

  TEST_CASE("Black-Scholes preintegration at d = 1 is the Black-Scholes price") {
    for (double k : {0.0, 60.0, 100.0, 140.0}) {
      BsAsianSpec spec;
      spec.steps = 1;
      spec.strike = k;
      const auto cond = conditional_factor(PathMethod::PCA, 1, 1.0);
      const double cf = bs_asian_preint(spec, cond, {});
      CHECK(std::fabs(cf - black_scholes_call(spec.s0, k, spec.rate, spec.sigma, spec.maturity)) <= 1e-12);
    }
  }

  TEST_CASE("Black-Scholes preintegration with K = 0") {
    BsAsianSpec spec;
    spec.steps = 8;
    spec.strike = 0.0;
    const auto cond = conditional_factor(PathMethod::BrownianBridge, 8, 1.0);
    const auto f = conditional_path_factor(cond);
    const double dt = 1.0 / 8.0;
    for (const auto& z : conditioning_points(7, 20, 3)) {
      // Path average with the conditioning variable at 0, times E[exp(sigma sqrt(dt) Z)].
      std::vector<double> x(8, 0.0);
      std::copy(z.begin(), z.end(), x.begin() + 1);
      const auto s = bs_asset_path(spec, f, x);
      double s_tilde = 0.0;
      for (std::size_t j = 0; j < 8; ++j) s_tilde += s[j] * std::exp(0.5 * spec.sigma * spec.sigma * dt) / 8.0;
      CHECK(bs_asian_preint(spec, cond, z) == doctest::Approx(std::exp(-spec.rate) * s_tilde).epsilon(1e-13));
    }
  }

  TEST_CASE("closed forms match the quadrature oracle") {
    for (PathMethod m : kMethods)
      for (std::size_t d : {2u, 4u, 8u}) {
        BsAsianSpec bs;
        bs.steps = d;
        bs.strike = 110.0;
        BasketSpec basket;
        basket.steps = d;
        basket.strike = 105.0;
        HestonSpec heston;
        heston.steps = d;
        heston.strike = 55.0;
        const ModelSpec specs[] = {bs, basket, heston};
        for (const auto& spec : specs) {
          const auto pre = make_preintegrated(spec, m);
          const auto payoff = make_conditioned_payoff(spec, m);
          for (const auto& z : conditioning_points(pre.dimension, 100, 17 + d)) {
            const double cf = pre(z), q = quadrature_preint(payoff, 0, z);
            REQUIRE_MESSAGE(within_oracle(cf, q), model_name(spec) << " d=" << d << " method=" << path_method_name(m)
                                                                   << " closed=" << cf << " quad=" << q);
          }
        }
      }
  }

  TEST_CASE("basket root solve") {
    BasketSpec spec;
    spec.steps = 4;
    const auto a = basket_factor(PathMethod::Cholesky, 4, 1.0);
    const auto pts = conditioning_points(7, 30, 29);
    for (const auto& z : pts) {
      // Set K to the average at z1 = 0 so that the root is exactly zero.
      std::vector<double> full(8, 0.0);
      std::copy(z.begin(), z.end(), full.begin() + 1);
      BasketSpec at = spec;
      at.strike = 0.0;
      const auto parts = basket_parts(at, a, full);
      at.strike = parts.phi;
      const auto res = solve_psi_basket(at, a, z);
      CHECK(std::fabs(res.psi) <= 1e-10);
    }
    for (const auto& z : pts) {
      const auto res = solve_psi_basket(spec, a, z);
      if (!std::isfinite(res.psi)) continue;
      auto avg = [&](double z1) {
        std::vector<double> full(8);
        full[0] = z1;
        std::copy(z.begin(), z.end(), full.begin() + 1);
        return basket_parts(spec, a, full).phi + spec.strike;
      };
      CHECK(avg(res.psi + 0.1) > spec.strike);
      CHECK(avg(res.psi - 0.1) < spec.strike);
      CHECK(res.lower <= res.upper);
    }
  }

  TEST_CASE("basket always in the money") {
    BasketSpec spec;
    spec.steps = 4;
    spec.w1 = 0.5;
    spec.w2 = 0.5;
    spec.strike = 20.0;  // asset 2 alone averages about 50 > K
    const auto a = basket_factor(PathMethod::Cholesky, 4, 1.0);
    const std::vector<double> z(7, 0.0);
    const auto res = solve_psi_basket(spec, a, z);
    CHECK(res.psi == -std::numeric_limits<double>::infinity());
    // Value is the conditional expectation of the average minus K.
    const double v = basket_preint(spec, a, z);
    const double q = quadrature_preint(make_conditioned_payoff(spec, PathMethod::Cholesky), 0, z);
    CHECK(within_oracle(v, q));
    spec.strike = 0.0;
    CHECK(solve_psi_basket(spec, a, z).psi == -std::numeric_limits<double>::infinity());
  }

  TEST_CASE("basket with rho = 0 and w1 = 1 equals the single-asset preintegration") {
    BasketSpec basket;
    basket.rho = 0.0;
    basket.w1 = 1.0;
    basket.w2 = 0.0;
    basket.steps = 6;
    basket.strike = 105.0;
    BsAsianSpec bs;
    bs.s0 = basket.s0_1;
    bs.sigma = basket.sigma1;
    bs.rate = basket.rate;
    bs.steps = 6;
    bs.strike = 105.0;
    for (PathMethod m : kMethods) {
      const auto cond = conditional_factor(m, 6, 1.0);
      const auto a = basket_factor(m, 6, 1.0);
      for (const auto& z : conditioning_points(11, 20, 31)) {
        CHECK(basket_preint(basket, a, z) ==
              doctest::Approx(bs_asian_preint(bs, cond, std::span<const double>(z).first(5))).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("Heston preintegration with K = 0") {
    HestonSpec spec;
    spec.steps = 4;
    spec.strike = 0.0;
    const double dt = 0.25;
    for (const auto& z : conditioning_points(7, 10, 37)) {
      std::vector<double> full(8, 0.0);
      std::copy(z.begin(), z.end(), full.begin() + 1);
      const auto path = heston_path(spec, full);
      double s_tilde = 0.0;
      for (double s : path.price) s_tilde += s / 4.0;
      const double expected = std::exp(-spec.rate) * s_tilde * std::exp((1.0 - spec.rho * spec.rho) * spec.v0 * dt / 2.0);
      CHECK(heston_preint(spec, z) == doctest::Approx(expected).epsilon(1e-13));
    }
  }

  TEST_CASE("Heston preintegration as |rho| -> 1") {
    for (double rho : {1.0 - 1e-6, -1.0 + 1e-6}) {
      HestonSpec spec;
      spec.steps = 4;
      spec.rho = rho;
      for (const auto& z : conditioning_points(7, 20, 41)) {
        std::vector<double> full(8, 0.0);
        std::copy(z.begin(), z.end(), full.begin() + 1);
        const double direct = heston_payoff(spec, full);
        CHECK(std::fabs(heston_preint(spec, z) - direct) <= 1e-3 * std::max(1.0, direct));
      }
    }
  }

  TEST_CASE("preintegrated values are nonnegative and decrease in K") {
    for (PathMethod m : kMethods) {
      for (const ModelSpec& base : {ModelSpec{BsAsianSpec{}}, ModelSpec{BasketSpec{}}, ModelSpec{HestonSpec{}}}) {
        ModelSpec spec = base;
        std::visit([](auto& s) { s.steps = 4; }, spec);
        const double k0 = strike_of(spec);
        std::vector<PreintegratedIntegrand> ladder;
        for (double scale : {0.0, 0.6, 0.9, 1.0, 1.2, 1.6}) {
          set_strike(spec, scale * k0);
          ladder.push_back(make_preintegrated(spec, m));
        }
        for (const auto& z : conditioning_points(ladder[0].dimension, 50, 43)) {
          double prev = std::numeric_limits<double>::infinity();
          for (const auto& f : ladder) {
            const double v = f(z);
            CHECK(v >= 0.0);
            CHECK(v <= prev);
            prev = v;
          }
        }
      }
    }
  }

  TEST_CASE("preintegration removes the kink") {
    BsAsianSpec spec;
    spec.steps = 4;
    spec.strike = 100.0;
    const auto pre = make_preintegrated(spec, PathMethod::PCA);
    const auto payoff = make_conditioned_payoff(spec, PathMethod::PCA);
    constexpr double h = 1e-3;
    // Second differences along one coordinate: O(h^2) for a smooth function,
    // O(h) across the kink of the raw payoff.
    auto worst_second = [&](const NormalFunction& f, std::size_t dim, std::size_t coord) {
      std::vector<double> x(dim, 0.0);
      double worst = 0.0, worst_first = 0.0;
      for (double t = -4.0; t <= 4.0; t += h) {
        x[coord] = t - h;
        const double a = f(x);
        x[coord] = t;
        const double b = f(x);
        x[coord] = t + h;
        const double c = f(x);
        worst = std::max(worst, std::fabs(a - 2.0 * b + c));
        worst_first = std::max(worst_first, std::fabs(c - b));
      }
      return std::pair{worst_first, worst};
    };
    const auto [first_pre, second_pre] = worst_second(pre.fn, 3, 0);
    const auto [first_raw, second_raw] = worst_second(payoff, 4, 0);
    CHECK(first_pre <= 100.0 * h);
    CHECK(second_pre <= 100.0 * h * h);
    CHECK(second_raw > 1e-3);
    CHECK(first_raw <= 100.0 * h);
  }
}
