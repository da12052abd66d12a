#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rqmcis {

using NormalFunction = std::function<double(std::span<const double>)>;

/// C^1 soft clamp of the real line onto [-R + 1/2, R - 1/2]: identity on
/// [-R+1, R-1], quadratic blends on the unit-width shoulders, constant
/// beyond |x| >= R. Throws DomainError for R <= 1.
double smooth_clip(double x, double R);
double smooth_clip_derivative(double x, double R);
std::vector<double> smooth_clip_vec(std::span<const double> x, double R);

/// Central-difference estimate of the mixed partial d^u fn(x), each
/// coordinate in u differentiated once, step h_i = step (1 + |x_i|).
/// |u| is limited to 4.
double mixed_partial(const NormalFunction& fn, std::span<const double> x, std::span<const std::size_t> u,
                     double step = 1e-4);

/// Empirical check of sup_{|u|<=2} |d^u fn(x)| <= C exp(A|x|^2 + B|x|).
///
/// log C is fitted (least-max) on the samples whose radius is at most the
/// median radius; residuals log|d^u fn| - (A|x|^2 + B|x| + log C) are then
/// measured on every sample, so a growth rate faster than the envelope shows
/// up as positive residuals on the outer samples.
struct GrowthFit {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double max_residual = 0.0;
  std::size_t samples = 0;

  bool passes() const noexcept { return max_residual <= 0.0; }
};

GrowthFit growth_check(const NormalFunction& fn, const std::vector<std::vector<double>>& samples, double A,
                       double B);

/// Upper envelope value <= C R^alpha exp(-beta R^gamma) over tabulated tail
/// moments, with C the least-max constant.
struct TailDecayFit {
  double log_c = 0.0;
  std::vector<double> residuals;  // same order as the inputs
};

TailDecayFit fit_tail_decay(std::span<const double> radii, std::span<const double> values, double alpha,
                            double beta, double gamma);

}  // namespace rqmcis
