#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rqmcis {

using NormalFunction = std::function<double(std::span<const double>)>;
using UnitFunction = std::function<double(std::span<const double>)>;

/// Gaussian proposal N(mu, I) chosen to maximise phi(z) h(z).
struct ISProposal {
  std::vector<double> mu;
  double log_objective = 0.0;  // log h(mu) - |mu|^2 / 2
  double gradient_norm = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct DriftOptions {
  double tol = 1e-8;
  int max_iter = 200;
  int restarts = 4;
  std::uint64_t seed = 0x0d15eedULL;
};

/// Local maximiser of log h(z) - |z|^2/2 by BFGS on central-difference
/// gradients with a backtracking line search. Runs from `init` and from
/// `options.restarts` N(0, I) draws; returns the best converged run, or the
/// best iterate overall with converged = false if none converged.
ISProposal find_drift(const NormalFunction& h, std::span<const double> init, const DriftOptions& options = {});

/// Gradient of log h(z) - |z|^2/2 by central differences with per-coordinate
/// step 1e-5 (1 + |z_i|).
std::vector<double> drift_objective_gradient(const NormalFunction& h, std::span<const double> z);

/// u -> h(x) exp(-mu.x + |mu|^2/2) with x = mu + Phi^{-1}(u), i.e. the
/// likelihood-ratio weighted integrand under N(mu, I). Throws DomainError for
/// coordinates outside (0,1).
UnitFunction is_transform(NormalFunction h, const ISProposal& proposal);

/// Monte Carlo estimate of E_q[|X|^4 e^{2B|X|} 1{|X| >= R-1}] for q = N(mu, I).
double tail_moment_estimate(const ISProposal& proposal, double B, double R, std::size_t n, std::uint64_t seed);

}  // namespace rqmcis
