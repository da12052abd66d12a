#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "rqmcis/lds.hpp"
#include "rqmcis/mathfn.hpp"
#include "rqmcis/rng.hpp"

namespace testing {

inline std::shared_ptr<const rqmcis::DirectionNumbers> directions() {
  static const auto table = std::make_shared<const rqmcis::DirectionNumbers>(
      rqmcis::load_direction_numbers(rqmcis::default_direction_file()));
  return table;
}

/// Standard normal vector from a counter-based stream.
inline std::vector<double> normals(const rqmcis::CounterRng& rng, std::size_t dim, std::size_t draw) {
  std::vector<double> z(dim);
  for (std::size_t i = 0; i < dim; ++i) z[i] = rqmcis::std_normal_inv_cdf(rng.uniform(draw * dim + i));
  return z;
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

template <class F>
Moments mc_moments(F&& sample, std::size_t n) {
  double mean = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = sample(j);
    const double delta = v - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (v - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n))};
}

inline double relative_gap(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace testing
