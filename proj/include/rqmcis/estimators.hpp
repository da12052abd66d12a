#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "rqmcis/lds.hpp"
#include "rqmcis/models.hpp"
#include "rqmcis/odis.hpp"
#include "rqmcis/pathgen.hpp"
#include "rqmcis/preint.hpp"

namespace rqmcis {

enum class Method { MC, QMC, CQMC, CQMC_IS };

inline constexpr std::array<Method, 4> kAllMethods = {Method::MC, Method::QMC, Method::CQMC, Method::CQMC_IS};

std::string_view method_name(Method method) noexcept;
/// Accepts the canonical names (MC, QMC, CQMC, CQMC_IS) in any case. Throws DomainError.
Method parse_method(std::string_view name);

/// A pricing problem assembled for all four estimators.
///
/// MC and QMC integrate `payoff` over d (or 2d) normals; CQMC integrates the
/// preintegrated integrand over one fewer; CQMC_IS additionally samples from
/// N(mu*, I) with mu* found once at assembly.
struct Problem {
  ModelSpec spec;
  PathMethod path = PathMethod::PCA;
  std::shared_ptr<const DirectionNumbers> directions;
  NormalFunction payoff;
  PreintegratedIntegrand preintegrated;
  ISProposal drift;

  std::size_t dimension(Method method) const noexcept;
  /// Integrand over (0,1)^dimension(method).
  UnitFunction integrand(Method method) const;
};

/// For Black-Scholes Asians the MC/QMC payoff uses the full `path` factor of
/// the Brownian covariance; the basket uses basket_factor(path) throughout.
Problem make_problem(const ModelSpec& spec, PathMethod path, std::shared_ptr<const DirectionNumbers> directions,
                     const DriftOptions& drift_options = {});

/// Pseudo-random uniforms from a counter-based generator.
struct McSource {
  std::uint64_t seed = 0;
};

using PointSource = std::variant<McSource, SobolGenerator>;

/// (1/n) sum_{j<n} integrand(u_j), compensated summation in index order.
/// Throws NumericError naming the index of a non-finite integrand value.
double estimate(const UnitFunction& integrand, std::size_t dimension, const PointSource& source, std::size_t n);

struct RunRecord {
  Method method = Method::MC;
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
};

RunRecord run_method(const Problem& problem, Method method, std::size_t n, std::uint64_t seed);

/// Average of `scrambles` independent CQMC_IS estimates with 2^log2n points.
double reference_value(const Problem& problem, std::uint64_t seed, unsigned log2n = 19, std::size_t scrambles = 8);

struct RmseRow {
  Method method = Method::MC;
  std::size_t n = 0;
  double rmse = 0.0;
  std::size_t reps = 0;
  double reference = 0.0;
};

struct StudyResult {
  std::vector<RunRecord> runs;  // sorted by (method, n, rep)
  std::vector<RmseRow> rows;    // sorted by (method, n)
};

std::uint64_t repetition_seed(std::uint64_t master, Method method, std::size_t n, std::size_t rep) noexcept;

/// RMSE of each method against `reference` over `reps` independent
/// randomisations per sample size. Repetitions run on `threads` workers
/// (0 = hardware concurrency); output does not depend on the thread count.
StudyResult rmse_study(const Problem& problem, std::span<const Method> methods, std::span<const std::size_t> n_grid,
                       std::size_t reps, double reference, std::uint64_t master_seed, unsigned threads = 1);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // rows dropped for rmse == 0
};

/// Least-squares slope of log2(rmse) against log2(n). Zero-rmse rows are
/// skipped; fewer than 4 remaining rows throws InsufficientDataError.
SlopeFit fit_slope(std::span<const RmseRow> rows);

}  // namespace rqmcis
