#include "rqmcis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rqmcis/errors.hpp"

namespace rqmcis {

double smooth_clip(double x, double R) {
  if (!(R > 1.0)) throw DomainError("smooth_clip: R must exceed 1");
  if (x <= -R) return -R + 0.5;
  if (x < -R + 1.0) {
    const double t = x + R;
    return -R + 0.5 + 0.5 * t * t;
  }
  if (x <= R - 1.0) return x;
  if (x < R) {
    const double t = R - x;
    return R - 0.5 - 0.5 * t * t;
  }
  return R - 0.5;
}

double smooth_clip_derivative(double x, double R) {
  if (!(R > 1.0)) throw DomainError("smooth_clip: R must exceed 1");
  if (x <= -R || x >= R) return 0.0;
  if (x < -R + 1.0) return x + R;
  if (x <= R - 1.0) return 1.0;
  return R - x;
}

std::vector<double> smooth_clip_vec(std::span<const double> x, double R) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [R](double v) { return smooth_clip(v, R); });
  return out;
}

double mixed_partial(const NormalFunction& fn, std::span<const double> x, std::span<const std::size_t> u,
                     double step) {
  if (u.size() > 4) throw DomainError("mixed_partial: at most 4 directions");
  for (std::size_t i : u)
    if (i >= x.size()) throw DomainError("mixed_partial: direction out of range");
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> h(u.size());
  double denom = 1.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    h[k] = step * (1.0 + std::fabs(x[u[k]]));
    denom *= 2.0 * h[k];
  }
  double acc = 0.0;
  const std::size_t corners = std::size_t{1} << u.size();
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double sign = 1.0;
    std::copy(x.begin(), x.end(), point.begin());
    for (std::size_t k = 0; k < u.size(); ++k) {
      const bool up = (mask >> k) & 1u;
      point[u[k]] += up ? h[k] : -h[k];
      if (!up) sign = -sign;
    }
    const double value = fn(point);
    if (!std::isfinite(value)) throw NumericError("mixed_partial: non-finite function value");
    acc += sign * value;
  }
  return acc / denom;
}

GrowthFit growth_check(const NormalFunction& fn, const std::vector<std::vector<double>>& samples, double A,
                       double B) {
  GrowthFit fit;
  fit.A = A;
  fit.B = B;
  fit.samples = samples.size();
  if (samples.empty()) return fit;

  std::vector<double> radius(samples.size()), raw(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& x = samples[s];
    double sq = 0.0;
    for (double v : x) sq += v * v;
    radius[s] = std::sqrt(sq);

    double sup = std::fabs(fn(x));
    std::size_t dirs[2];
    for (std::size_t i = 0; i < x.size(); ++i) {
      dirs[0] = i;
      sup = std::max(sup, std::fabs(mixed_partial(fn, x, std::span<const std::size_t>(dirs, 1))));
      for (std::size_t j = i + 1; j < x.size(); ++j) {
        dirs[1] = j;
        sup = std::max(sup, std::fabs(mixed_partial(fn, x, std::span<const std::size_t>(dirs, 2))));
      }
    }
    raw[s] = std::log(sup) - A * sq - B * radius[s];
  }

  std::vector<double> sorted = radius;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];
  double log_c = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples.size(); ++s)
    if (radius[s] <= median) log_c = std::max(log_c, raw[s]);
  fit.C = std::exp(log_c);
  fit.max_residual = -std::numeric_limits<double>::infinity();
  for (double r : raw) fit.max_residual = std::max(fit.max_residual, r - log_c);
  return fit;
}

TailDecayFit fit_tail_decay(std::span<const double> radii, std::span<const double> values, double alpha,
                            double beta, double gamma) {
  if (radii.size() != values.size() || radii.empty()) throw DomainError("fit_tail_decay: size mismatch");
  TailDecayFit fit;
  std::vector<double> model_free(values.size());
  fit.log_c = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    model_free[i] = std::log(values[i]) - alpha * std::log(radii[i]) + beta * std::pow(radii[i], gamma);
    fit.log_c = std::max(fit.log_c, model_free[i]);
  }
  fit.residuals.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) fit.residuals[i] = model_free[i] - fit.log_c;
  return fit;
}

}  // namespace rqmcis
