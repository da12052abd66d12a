#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rqmcis/analysis.hpp"
#include "rqmcis/cli.hpp"
#include "rqmcis/estimators.hpp"
#include "rqmcis/lds.hpp"
#include "rqmcis/mathfn.hpp"
#include "rqmcis/models.hpp"
#include "rqmcis/odis.hpp"
#include "rqmcis/pathgen.hpp"
#include "rqmcis/preint.hpp"
#include "rqmcis/rng.hpp"

using namespace rqmcis;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMasterSeed = 20240917;
constexpr PathMethod kMethods[] = {PathMethod::Cholesky, PathMethod::BrownianBridge, PathMethod::PCA};

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<RmseRow> rows_of(const StudyResult& r, Method m) {
  std::vector<RmseRow> out;
  for (const auto& row : r.rows)
    if (row.method == m) out.push_back(row);
  return out;
}

std::vector<std::size_t> desk_grid() {
  std::vector<std::size_t> g;
  for (int m = 7; m <= 13; ++m) g.push_back(std::size_t{1} << m);
  return g;
}

StudyResult desk_study(const Problem& p, std::span<const Method> methods) {
  const double ref = reference_value(p, kMasterSeed, 16, 8);
  const auto grid = desk_grid();
  return rmse_study(p, methods, grid, 30, ref, kMasterSeed, resolve_threads(0));
}

std::shared_ptr<const DirectionNumbers> g_dirs;

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  BsAsianSpec spec;
  spec.steps = 16;
  spec.strike = 100.0;
  const Problem p = make_problem(spec, PathMethod::PCA, g_dirs);
  const std::vector<Method> methods{Method::MC, Method::CQMC_IS};
  const auto r = desk_study(p, methods);
  const auto mc = rows_of(r, Method::MC), is = rows_of(r, Method::CQMC_IS);
  const double s_is = fit_slope(is).slope, s_mc = fit_slope(mc).slope;
  bool dominated = true;
  for (std::size_t k = 0; k < mc.size(); ++k)
    if (mc[k].n >= 512) dominated = dominated && is[k].rmse < mc[k].rmse;
  const double secs = seconds_since(t0);
  Outcome o;
  o.require(s_is <= -0.85, "CQMC_IS slope " + fmt("%.3f", s_is) + " <= -0.85");
  o.require(s_mc >= -0.62 && s_mc <= -0.38, "MC slope " + fmt("%.3f", s_mc) + " in [-0.62, -0.38]");
  o.require(dominated, "rmse(CQMC_IS) < rmse(MC) for n >= 2^9");
  o.require(secs <= 180.0, "runtime " + fmt("%.1f", secs) + " s <= 180 s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const std::vector<Method> methods{Method::CQMC_IS};
  {
    const auto t0 = std::chrono::steady_clock::now();
    BasketSpec spec;
    spec.steps = 8;
    spec.strike = 110.0;
    const auto r = desk_study(make_problem(spec, PathMethod::PCA, g_dirs), methods);
    const double s = fit_slope(rows_of(r, Method::CQMC_IS)).slope;
    const double secs = seconds_since(t0);
    o.require(s <= -0.8, "basket CQMC_IS slope " + fmt("%.3f", s) + " <= -0.8");
    o.require(secs <= 300.0, "basket runtime " + fmt("%.1f", secs) + " s <= 300 s");
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    HestonSpec spec;
    spec.steps = 8;
    spec.strike = 60.0;
    const auto r = desk_study(make_problem(spec, PathMethod::PCA, g_dirs), methods);
    const double s = fit_slope(rows_of(r, Method::CQMC_IS)).slope;
    const double secs = seconds_since(t0);
    o.require(s <= -0.8, "Heston CQMC_IS slope " + fmt("%.3f", s) + " <= -0.8");
    o.require(secs <= 300.0, "Heston runtime " + fmt("%.1f", secs) + " s <= 300 s");
  }
  return o;
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t points = 0, violations = 0;
  for (PathMethod method : kMethods)
    for (std::size_t d : {2u, 4u, 8u}) {
      BsAsianSpec bs;
      bs.steps = d;
      bs.strike = 120.0;
      BasketSpec basket;
      basket.steps = d;
      basket.strike = 110.0;
      HestonSpec heston;
      heston.steps = d;
      heston.strike = 60.0;
      const std::uint64_t seed = hash_words({d, static_cast<std::uint64_t>(method), 3});
      auto check = [&](const ModelSpec& spec, const NormalFunction& closed) {
        const NormalFunction payoff = make_conditioned_payoff(spec, method);
        const std::size_t dim = normal_dimension(spec) - 1;
        const SobolGenerator gen(*g_dirs, dim, seed, true);
        std::vector<double> u(dim), z(dim);
        for (std::size_t k = 0; k < 100; ++k) {
          gen.point(k, u);
          for (std::size_t i = 0; i < z.size(); ++i) z[i] = std_normal_inv_cdf(u[i]);
          const double q = quadrature_preint(payoff, 0, z);
          const double scaled = std::fabs(closed(z) - q) / std::max(1e-2, std::fabs(q));
          worst = std::max(worst, scaled);
          violations += scaled > 1e-8;
          ++points;
        }
      };
      const ConditionalFactor cond = conditional_factor(method, d, bs.maturity);
      check(bs, [&](std::span<const double> z) { return bs_asian_preint(bs, cond, z); });
      const PathFactor bf = basket_factor(method, d, basket.maturity);
      check(basket,
            [&](std::span<const double> z) { return basket_preint(basket, bf, z); });
      const HestonFactors hf = heston_factors(method, d, heston.maturity);
      check(heston,
            [&](std::span<const double> z) { return heston_preint(heston, hf, z); });
    }
  const double secs = seconds_since(t0);
  Outcome o;
  o.require(violations == 0, std::to_string(points) + " points, worst |cf-q|/max(1e-2,|q|) " + fmt("%.2e", worst) +
                                 " <= 1e-8");
  o.require(secs <= 60.0, "runtime " + fmt("%.1f", secs) + " s <= 60 s");
  return o;
}

Outcome criterion4() {
  Outcome o;
  BsAsianSpec d1;
  d1.steps = 1;
  const Problem p1 = make_problem(d1, PathMethod::PCA, g_dirs);
  const double bs = black_scholes_call(d1.s0, d1.strike, d1.rate, d1.sigma, d1.maturity);
  const double err1 = std::fabs(run_method(p1, Method::CQMC, 1024, kMasterSeed).estimate - bs);
  o.require(err1 <= 1e-12, "d=1 CQMC vs Black-Scholes " + fmt("%.1e", err1) + " <= 1e-12");

  BsAsianSpec k0;
  k0.steps = 16;
  k0.strike = 0.0;
  const Problem p0 = make_problem(k0, PathMethod::PCA, g_dirs);
  double forward = 0.0;
  const double dt = k0.maturity / 16.0;
  for (int j = 1; j <= 16; ++j) forward += std::exp(k0.rate * j * dt);
  forward *= std::exp(-k0.rate * k0.maturity) * k0.s0 / 16.0;
  const double est = run_method(p0, Method::CQMC_IS, 1 << 14, kMasterSeed).estimate;
  const double rel = std::fabs(est - forward) / forward;
  o.require(rel <= 1e-6, "K=0 CQMC_IS vs forward value rel " + fmt("%.1e", rel) + " <= 1e-6");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto one = find_drift([](std::span<const double>) { return 1.0; }, std::vector<double>{0.5, -0.5, 1.0});
  double n1 = 0.0;
  for (double m : one.mu) n1 += m * m;
  n1 = std::sqrt(n1);
  o.require(n1 <= 1e-6, "h=1: |mu*| " + fmt("%.1e", n1) + " <= 1e-6");

  const std::vector<double> a{0.7, -1.1, 0.3, 1.9};
  const auto expo = find_drift(
      [&](std::span<const double> z) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * z[i];
        return std::exp(s);
      },
      std::vector<double>(4, 0.0));
  double e2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e2 = std::max(e2, std::fabs(expo.mu[i] - a[i]));
  o.require(e2 <= 1e-6, "h=exp(a.z): max|mu*-a| " + fmt("%.1e", e2) + " <= 1e-6");

  BsAsianSpec spec;
  spec.steps = 4;
  spec.strike = 120.0;
  const Problem p = make_problem(spec, PathMethod::PCA, g_dirs);
  auto mc_mean = [&](Method m, std::uint64_t seed) {
    const auto f = p.integrand(m);
    const std::size_t dim = p.dimension(m);
    const CounterRng rng(seed);
    std::vector<double> u(dim);
    double mean = 0.0, m2 = 0.0;
    constexpr std::size_t n = 100000;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < dim; ++i) u[i] = rng.uniform(j * dim + i);
      const double v = f(u);
      const double delta = v - mean;
      mean += delta / static_cast<double>(j + 1);
      m2 += delta * (v - mean);
    }
    return std::pair{mean, std::sqrt(m2 / (n - 1) / n)};
  };
  const auto [plain, se_plain] = mc_mean(Method::CQMC, 11);
  const auto [weighted, se_weighted] = mc_mean(Method::CQMC_IS, 12);
  const double z = std::fabs(plain - weighted) / std::hypot(se_plain, se_weighted);
  o.require(z <= 4.0, "IS unbiasedness at n=1e5: " + fmt("%.2f", z) + " SE <= 4");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const std::vector<double> radii{3.0, 4.0, 5.0, 6.0};
  const std::vector<std::vector<double>> mus{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {1.2, -1.6}};
  double worst = -1e300;
  bool monotone = true, finite = true;
  for (const auto& mu : mus)
    for (double B : {0.0, 0.5, 1.0}) {
      ISProposal q;
      q.mu = mu;
      std::vector<double> values;
      for (double R : radii) values.push_back(tail_moment_estimate(q, B, R, 200000, 77));
      for (std::size_t i = 1; i < values.size(); ++i) monotone = monotone && values[i] < values[i - 1];
      const auto fit = fit_tail_decay(radii, values, 0.0, 0.25, 2.0);
      finite = finite && std::isfinite(fit.log_c);
      for (std::size_t i = 1; i < radii.size(); ++i) worst = std::max(worst, fit.residuals[i]);
    }
  o.require(finite, "fitted C finite for |mu| <= 2, B <= 1");
  o.require(worst <= 0.0, "max log-residual for R >= 4 " + fmt("%.3f", worst) + " <= 0");
  o.require(monotone, "tail moment decreasing in R");
  return o;
}

Outcome criterion7() {
  Outcome o;
  double jump = 0.0, bound_excess = -1e300;
  bool identity = true;
  for (double R : {1.5, 2.0, 3.0, 7.5}) {
    for (double knot : {-R, -R + 1.0, R - 1.0, R}) {
      constexpr double eps = 1e-12;
      jump = std::max(jump, std::fabs(smooth_clip(knot + eps, R) - smooth_clip(knot - eps, R)));
      jump = std::max(jump, std::fabs(smooth_clip_derivative(knot + eps, R) - smooth_clip_derivative(knot - eps, R)));
    }
    for (double x = -4.0 * R; x <= 4.0 * R; x += 1e-4) {
      const double v = smooth_clip(x, R);
      bound_excess = std::max(bound_excess, std::fabs(v) - (R - 0.5));
      if (std::fabs(x) <= R - 1.0) identity = identity && v == x;
    }
  }
  o.require(jump <= 1e-9, "knot value/derivative jump " + fmt("%.1e", jump) + " <= 1e-9");
  o.require(bound_excess <= 0.0, "|P_R| <= R - 1/2 on dense grid");
  o.require(identity, "identity on [-R+1, R-1]");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion8() {
  Outcome o;
  std::size_t violations = 0;
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const SobolGenerator gen(*g_dirs, 10, seed, seed != 0);
    const PointMatrix pts = gen.block(4096);
    for (unsigned m = 0; m <= 12; ++m) {
      const std::size_t n = std::size_t{1} << m;
      for (Eigen::Index j = 0; j < 10; ++j) {
        std::vector<int> hits(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
          const auto cell = static_cast<std::size_t>(pts(static_cast<Eigen::Index>(i), j) * static_cast<double>(n));
          if (cell < n) ++hits[cell];
        }
        for (int h : hits) violations += h != 1;
      }
    }
  }
  o.require(violations == 0, "Sobol 1-D stratification violations " + std::to_string(violations) + " == 0");

  double residual = 0.0;
  for (PathMethod m : kMethods)
    residual = std::max(residual, factor_residual(make_path_factor(m, 80, 1.0).matrix, bm_covariance(80, 1.0)));
  o.require(residual <= 1e-9, "factor residual at d=80 " + fmt("%.1e", residual) + " <= 1e-9");

  const fs::path root = fs::temp_directory_path() / "rqmcis_acceptance_determinism";
  fs::remove_all(root);
  auto cfg = parse_config("{model: heston, d: 4, K: [50, 60], n_min: 7, n_max: 10, reps: 6, ref_log2n: 12}");
  std::ostringstream sink;
  std::string first;
  bool identical = true;
  for (unsigned threads : {1u, 3u, 1u}) {
    cfg.threads = threads;
    cfg.out = root / std::to_string(threads);
    cmd_converge(cfg, sink);
    std::string bytes;
    for (const char* k : {"K50", "K60"})
      for (const char* f : {"runs.csv", "rmse.csv"}) bytes += slurp(cfg.out / k / f);
    if (first.empty()) first = bytes;
    identical = identical && !bytes.empty() && bytes == first;
  }
  fs::remove_all(root);
  o.require(identical, "converge CSVs byte-identical across reruns and thread counts");
  return o;
}

}  // namespace

int main() {
  g_dirs = std::make_shared<const DirectionNumbers>(load_direction_numbers(default_direction_file()));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 convergence slopes, Black-Scholes Asian", criterion1},
      {"2 convergence slopes, basket and Heston", criterion2},
      {"3 closed-form preintegration vs quadrature", criterion3},
      {"4 analytic anchors", criterion4},
      {"5 optimal drift", criterion5},
      {"6 Gaussian tail decay", criterion6},
      {"7 soft clamp", criterion7},
      {"8 structural invariants", criterion8},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.passed;
    std::printf("%s criterion %s: %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
