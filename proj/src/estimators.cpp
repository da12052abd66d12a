#include "rqmcis/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "rqmcis/errors.hpp"
#include "rqmcis/mathfn.hpp"
#include "rqmcis/rng.hpp"

namespace rqmcis {

std::string_view method_name(Method method) noexcept {
  switch (method) {
    case Method::MC: return "MC";
    case Method::QMC: return "QMC";
    case Method::CQMC: return "CQMC";
    case Method::CQMC_IS: return "CQMC_IS";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "CQMC+IS") upper = "CQMC_IS";
  for (Method m : kAllMethods)
    if (method_name(m) == upper) return m;
  throw DomainError("unknown method '" + std::string(name) + "'");
}

std::size_t Problem::dimension(Method method) const noexcept {
  return method == Method::MC || method == Method::QMC ? preintegrated.dimension + 1 : preintegrated.dimension;
}

namespace {

UnitFunction through_inverse_cdf(NormalFunction fn) {
  return [fn = std::move(fn)](std::span<const double> u) {
    std::vector<double> x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = std_normal_inv_cdf(u[i]);
    return fn(x);
  };
}

}  // namespace

UnitFunction Problem::integrand(Method method) const {
  switch (method) {
    case Method::MC:
    case Method::QMC: return through_inverse_cdf(payoff);
    case Method::CQMC: return through_inverse_cdf(preintegrated.fn);
    case Method::CQMC_IS: return is_transform(preintegrated.fn, drift);
  }
  throw DomainError("Problem::integrand: unknown method");
}

Problem make_problem(const ModelSpec& spec, PathMethod path, std::shared_ptr<const DirectionNumbers> directions,
                     const DriftOptions& drift_options) {
  validate(spec);
  Problem p;
  p.spec = spec;
  p.path = path;
  p.directions = std::move(directions);
  if (p.directions) p.directions->require(normal_dimension(spec));
  if (const auto* bs = std::get_if<BsAsianSpec>(&spec)) {
    p.payoff = [s = *bs, a = make_path_factor(path, bs->steps, bs->maturity)](std::span<const double> x) {
      return bs_asian_payoff(s, a, x);
    };
  } else {
    p.payoff = make_conditioned_payoff(spec, path);
  }
  p.preintegrated = make_preintegrated(spec, path);
  const std::vector<double> origin(p.preintegrated.dimension, 0.0);
  p.drift = find_drift(p.preintegrated.fn, origin, drift_options);
  return p;
}

double estimate(const UnitFunction& integrand, std::size_t dimension, const PointSource& source, std::size_t n) {
  if (n == 0) throw DomainError("estimate: n must be positive");
  std::vector<double> u(dimension);
  double sum = 0.0, comp = 0.0;
  auto accumulate = [&](std::size_t j, double value) {
    if (!std::isfinite(value))
      throw NumericError("estimate: non-finite integrand value at index " + std::to_string(j));
    // Neumaier compensated summation.
    const double t = sum + value;
    if (std::fabs(sum) >= std::fabs(value))
      comp += (sum - t) + value;
    else
      comp += (value - t) + sum;
    sum = t;
  };
  if (const auto* mc = std::get_if<McSource>(&source)) {
    const CounterRng rng(mc->seed);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < dimension; ++i) u[i] = rng.uniform(static_cast<std::uint64_t>(j) * dimension + i);
      accumulate(j, integrand(u));
    }
  } else {
    const auto& gen = std::get<SobolGenerator>(source);
    if (gen.dimension() != dimension) throw DomainError("estimate: generator dimension mismatch");
    for (std::size_t j = 0; j < n; ++j) {
      gen.point(j, u);
      accumulate(j, integrand(u));
    }
  }
  return (sum + comp) / static_cast<double>(n);
}

RunRecord run_method(const Problem& problem, Method method, std::size_t n, std::uint64_t seed) {
  const std::size_t dim = problem.dimension(method);
  const UnitFunction f = problem.integrand(method);
  RunRecord rec{method, n, 0, seed, 0.0};
  if (method == Method::MC || dim == 0) {
    rec.estimate = estimate(f, dim, McSource{seed}, n);
  } else {
    if (!problem.directions) throw DomainError("run_method: quasi-Monte Carlo requires direction numbers");
    rec.estimate = estimate(f, dim, SobolGenerator(*problem.directions, dim, seed, true), n);
  }
  return rec;
}

double reference_value(const Problem& problem, std::uint64_t seed, unsigned log2n, std::size_t scrambles) {
  if (scrambles == 0) throw DomainError("reference_value: scrambles must be positive");
  const std::size_t n = std::size_t{1} << log2n;
  double total = 0.0;
  for (std::size_t k = 0; k < scrambles; ++k)
    total += run_method(problem, Method::CQMC_IS, n, hash_words({seed, 0x726566ULL, k})).estimate;
  return total / static_cast<double>(scrambles);
}

std::uint64_t repetition_seed(std::uint64_t master, Method method, std::size_t n, std::size_t rep) noexcept {
  return hash_words({master, static_cast<std::uint64_t>(method), n, rep});
}

StudyResult rmse_study(const Problem& problem, std::span<const Method> methods, std::span<const std::size_t> n_grid,
                       std::size_t reps, double reference, std::uint64_t master_seed, unsigned threads) {
  if (reps < 2) throw DomainError("rmse_study: at least 2 repetitions required");
  if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end())
    throw DomainError("rmse_study: sample sizes must be strictly ascending");

  std::vector<Method> sorted_methods(methods.begin(), methods.end());
  std::sort(sorted_methods.begin(), sorted_methods.end());
  sorted_methods.erase(std::unique(sorted_methods.begin(), sorted_methods.end()), sorted_methods.end());

  StudyResult result;
  for (Method m : sorted_methods)
    for (std::size_t n : n_grid)
      for (std::size_t r = 0; r < reps; ++r) result.runs.push_back({m, n, r, repetition_seed(master_seed, m, n, r), 0.0});

  // Integrands are built once per method and shared read-only by workers.
  std::vector<UnitFunction> integrands;
  for (Method m : sorted_methods) integrands.push_back(problem.integrand(m));
  auto method_slot = [&](Method m) {
    return static_cast<std::size_t>(std::find(sorted_methods.begin(), sorted_methods.end(), m) - sorted_methods.begin());
  };

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < result.runs.size(); t = next++) {
      RunRecord& rec = result.runs[t];
      try {
        const std::size_t dim = problem.dimension(rec.method);
        const UnitFunction& f = integrands[method_slot(rec.method)];
        if (rec.method == Method::MC || dim == 0)
          rec.estimate = estimate(f, dim, McSource{rec.seed}, rec.n);
        else
          rec.estimate = estimate(f, dim, SobolGenerator(*problem.directions, dim, rec.seed, true), rec.n);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = result.runs.size();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, result.runs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t start = 0; start < result.runs.size(); start += reps) {
    double sq = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double err = result.runs[start + r].estimate - reference;
      sq += err * err;
    }
    const RunRecord& first = result.runs[start];
    result.rows.push_back({first.method, first.n, std::sqrt(sq / static_cast<double>(reps)), reps, reference});
  }
  return result;
}

SlopeFit fit_slope(std::span<const RmseRow> rows) {
  SlopeFit fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const RmseRow& row : rows) {
    if (!(row.rmse > 0.0)) {
      ++fit.excluded;
      continue;
    }
    const double x = std::log2(static_cast<double>(row.n));
    const double y = std::log2(row.rmse);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++fit.used;
  }
  if (fit.used < 4) throw InsufficientDataError("fit_slope: fewer than 4 rows with positive rmse");
  const double m = static_cast<double>(fit.used);
  const double denom = m * sxx - sx * sx;
  if (!(denom > 0.0)) throw InsufficientDataError("fit_slope: sample sizes must not all coincide");
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

}  // namespace rqmcis
