#pragma once

#include <numbers>
#include <span>

namespace rqmcis {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;

/// Standard normal density.
double std_normal_pdf(double x) noexcept;

/// Standard normal distribution function, computed through erfc so that the
/// lower tail keeps full relative precision.
double std_normal_cdf(double x) noexcept;

/// Inverse of the standard normal distribution function.
///
/// Wichura's AS241 rational approximation followed by one Newton step.
/// Throws DomainError unless 0 < u < 1; boundary values are never clamped.
double std_normal_inv_cdf(double u);

/// log of the N(mu, I) density evaluated at x.
double shifted_normal_logdensity(std::span<const double> x, std::span<const double> mu);

}  // namespace rqmcis
