#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rqmcis/lds.hpp"
#include "rqmcis/models.hpp"
#include "rqmcis/pathgen.hpp"

namespace rqmcis {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// Closed forms under test; replaceable so that a deliberately broken
/// formula can be shown to fail the suite.
struct ValidationHooks {
  std::function<double(const BsAsianSpec&, const ConditionalFactor&, std::span<const double>)> bs_preint;
  std::function<double(const BasketSpec&, const PathFactor&, std::span<const double>)> basket_preint;
  std::function<double(const HestonSpec&, const HestonFactors&, std::span<const double>)> heston_preint;

  ValidationHooks();
};

/// Oracle checks: closed-form preintegration against quadrature, factor
/// residuals, Sobol stratification, soft-clamp continuity, IS unbiasedness,
/// Gaussian tail decay and the d = 1 Black-Scholes anchor.
std::vector<CheckResult> run_validation_suite(const DirectionNumbers& directions, const ValidationHooks& hooks = {});

}  // namespace rqmcis
