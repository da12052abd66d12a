#include "rqmcis/odis.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "rqmcis/errors.hpp"
#include "rqmcis/mathfn.hpp"
#include "rqmcis/rng.hpp"

namespace rqmcis {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Negated objective so that BFGS minimises.
double neg_objective(const NormalFunction& h, std::span<const double> z) {
  const double value = h(z);
  if (!(value > 0.0) || !std::isfinite(value)) return std::numeric_limits<double>::infinity();
  return -(std::log(value) - 0.5 * dot(z, z));
}

struct Run {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  double grad_norm = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

Run bfgs(const NormalFunction& h, std::vector<double> x, const DriftOptions& opt) {
  const std::size_t n = x.size();
  Run run;
  double f = neg_objective(h, x);
  if (!std::isfinite(f)) return run;
  auto gradient = [&](const std::vector<double>& at) {
    std::vector<double> g = drift_objective_gradient(h, at);
    for (double& gi : g) gi = -gi;
    return g;
  };
  std::vector<double> g = gradient(x);
  std::vector<double> inv_hessian(n * n, 0.0);
  auto reset = [&] {
    std::fill(inv_hessian.begin(), inv_hessian.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) inv_hessian[i * n + i] = 1.0;
  };
  reset();

  std::vector<double> p(n), x_new(n), s(n), y(n), hy(n);
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (norm(g) <= opt.tol) {
      run.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc -= inv_hessian[i * n + k] * g[k];
      p[i] = acc;
    }
    double slope = dot(g, p);
    if (!(slope < 0.0)) {
      reset();
      for (std::size_t i = 0; i < n; ++i) p[i] = -g[i];
      slope = dot(g, p);
    }
    double step = 1.0, f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * p[i];
      f_new = neg_objective(h, x_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no decrease representable: stationary to working precision
    std::vector<double> g_new = gradient(x_new);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-14 * norm(s) * norm(y)) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += inv_hessian[i * n + k] * y[k];
        hy[i] = acc;
      }
      const double yhy = dot(y, hy);
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
          inv_hessian[i * n + k] +=
              (1.0 + yhy * rho) * rho * s[i] * s[k] - rho * (hy[i] * s[k] + s[i] * hy[k]);
    }
    x.swap(x_new);
    f = f_new;
    g.swap(g_new);
  }
  run.grad_norm = norm(g);
  if (!run.converged && run.grad_norm <= opt.tol) run.converged = true;
  run.x = std::move(x);
  run.f = f;
  run.iterations = it;
  return run;
}

}  // namespace

std::vector<double> drift_objective_gradient(const NormalFunction& h, std::span<const double> z) {
  std::vector<double> point(z.begin(), z.end());
  std::vector<double> grad(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double step = 1e-5 * (1.0 + std::fabs(z[i]));
    point[i] = z[i] + step;
    const double up = std::log(h(point));
    point[i] = z[i] - step;
    const double down = std::log(h(point));
    point[i] = z[i];
    grad[i] = (up - down) / (2.0 * step) - z[i];
  }
  return grad;
}

ISProposal find_drift(const NormalFunction& h, std::span<const double> init, const DriftOptions& options) {
  const std::size_t n = init.size();
  ISProposal best;
  if (n == 0) {
    best.converged = std::isfinite(neg_objective(h, init));
    best.log_objective = -neg_objective(h, init);
    return best;
  }
  const CounterRng rng(options.seed);
  Run chosen;
  int total_iterations = 0;
  for (int start = 0; start <= options.restarts; ++start) {
    std::vector<double> x0(init.begin(), init.end());
    if (start > 0)
      for (std::size_t i = 0; i < n; ++i)
        x0[i] = std_normal_inv_cdf(rng.uniform(static_cast<std::uint64_t>(start) * n + i));
    Run run = bfgs(h, std::move(x0), options);
    total_iterations += run.iterations;
    if (run.x.empty()) continue;
    const bool better = chosen.x.empty() || (run.converged && !chosen.converged) ||
                        (run.converged == chosen.converged && run.f < chosen.f);
    if (better) chosen = std::move(run);
  }
  if (chosen.x.empty()) throw NumericError("find_drift: integrand is not positive at any start point");
  best.mu = std::move(chosen.x);
  best.log_objective = -chosen.f;
  best.gradient_norm = chosen.grad_norm;
  best.converged = chosen.converged;
  best.iterations = total_iterations;
  return best;
}

UnitFunction is_transform(NormalFunction h, const ISProposal& proposal) {
  const double half_sq = 0.5 * dot(proposal.mu, proposal.mu);
  return [h = std::move(h), mu = proposal.mu, half_sq](std::span<const double> u) {
    if (u.size() != mu.size()) throw DomainError("is_transform: dimension mismatch");
    std::vector<double> x(u.size());
    double log_weight = half_sq;
    for (std::size_t i = 0; i < u.size(); ++i) {
      x[i] = mu[i] + std_normal_inv_cdf(u[i]);
      log_weight -= mu[i] * x[i];
    }
    return h(x) * std::exp(log_weight);
  };
}

double tail_moment_estimate(const ISProposal& proposal, double B, double R, std::size_t n, std::uint64_t seed) {
  if (!(R >= 1.0)) throw DomainError("tail_moment_estimate: R must be at least 1");
  if (n == 0) throw DomainError("tail_moment_estimate: n must be positive");
  const std::size_t dim = proposal.mu.size();
  const CounterRng rng(seed);
  double sum = 0.0, comp = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double x = proposal.mu[i] + std_normal_inv_cdf(rng.uniform(k * dim + i));
      sq += x * x;
    }
    const double r = std::sqrt(sq);
    if (r < R - 1.0) continue;
    const double term = sq * sq * std::exp(2.0 * B * r);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(n);
}

}  // namespace rqmcis
