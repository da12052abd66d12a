#include "rqmcis/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

#include "rqmcis/errors.hpp"

namespace rqmcis {

namespace {

// QUADPACK qk15 abscissae and weights; odd entries of kXgk are the Gauss nodes.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kWgk[i] * pair;
    if (i % 2 == 1) gauss += kWg[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  if (!std::isfinite(kronrod)) throw NumericError("integrate_adaptive: non-finite integrand value");
  return {a, b, kronrod, std::fabs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, std::size_t max_intervals) {
  if (!(b > a)) return {};
  std::priority_queue<Panel> panels;
  Panel first = kronrod15(f, a, b);
  double total = first.value;
  double error = first.error;
  panels.push(first);
  while (error > abs_tol) {
    if (panels.size() >= max_intervals)
      throw NumericError("integrate_adaptive: tolerance not reached within interval budget");
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw NumericError("integrate_adaptive: panel width reached machine resolution");
    const Panel left = kronrod15(f, worst.a, mid);
    const Panel right = kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum to shed the drift accumulated by incremental updates.
  double value = 0.0, err = 0.0;
  const std::size_t count = panels.size();
  while (!panels.empty()) {
    value += panels.top().value;
    err += panels.top().error;
    panels.pop();
  }
  return {value, err, count};
}

}  // namespace rqmcis
