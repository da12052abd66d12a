#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rqmcis/analysis.hpp"
#include "rqmcis/errors.hpp"
#include "rqmcis/estimators.hpp"
#include "rqmcis/lds.hpp"
#include "rqmcis/mathfn.hpp"
#include "rqmcis/models.hpp"
#include "rqmcis/pathgen.hpp"
#include "rqmcis/validate.hpp"

namespace py = pybind11;
using namespace rqmcis;

namespace {

std::shared_ptr<const DirectionNumbers> directions() {
  static std::mutex lock;
  static std::shared_ptr<const DirectionNumbers> cached;
  static std::string cached_path;
  std::lock_guard guard(lock);
  const std::string path = default_direction_file().string();
  if (!cached || path != cached_path) {
    cached = std::make_shared<const DirectionNumbers>(load_direction_numbers(std::filesystem::path(path)));
    cached_path = path;
  }
  return cached;
}

Problem problem_for(const ModelSpec& spec, const std::string& path) {
  validate(spec);
  return make_problem(spec, parse_path_method(path), directions());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Randomized quasi-Monte Carlo option pricing with preintegration and importance sampling";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);

  py::class_<BsAsianSpec>(m, "BsAsianSpec")
      .def(py::init<>())
      .def_readwrite("s0", &BsAsianSpec::s0)
      .def_readwrite("sigma", &BsAsianSpec::sigma)
      .def_readwrite("rate", &BsAsianSpec::rate)
      .def_readwrite("maturity", &BsAsianSpec::maturity)
      .def_readwrite("steps", &BsAsianSpec::steps)
      .def_readwrite("strike", &BsAsianSpec::strike);

  py::class_<BasketSpec>(m, "BasketSpec")
      .def(py::init<>())
      .def_readwrite("s0_1", &BasketSpec::s0_1)
      .def_readwrite("s0_2", &BasketSpec::s0_2)
      .def_readwrite("sigma1", &BasketSpec::sigma1)
      .def_readwrite("sigma2", &BasketSpec::sigma2)
      .def_readwrite("rho", &BasketSpec::rho)
      .def_readwrite("w1", &BasketSpec::w1)
      .def_readwrite("w2", &BasketSpec::w2)
      .def_readwrite("rate", &BasketSpec::rate)
      .def_readwrite("maturity", &BasketSpec::maturity)
      .def_readwrite("steps", &BasketSpec::steps)
      .def_readwrite("strike", &BasketSpec::strike);

  py::class_<HestonSpec>(m, "HestonSpec")
      .def(py::init<>())
      .def_readwrite("s0", &HestonSpec::s0)
      .def_readwrite("v0", &HestonSpec::v0)
      .def_readwrite("theta", &HestonSpec::theta)
      .def_readwrite("kappa", &HestonSpec::kappa)
      .def_readwrite("vol_of_vol", &HestonSpec::vol_of_vol)
      .def_readwrite("rho", &HestonSpec::rho)
      .def_readwrite("rate", &HestonSpec::rate)
      .def_readwrite("maturity", &HestonSpec::maturity)
      .def_readwrite("steps", &HestonSpec::steps)
      .def_readwrite("strike", &HestonSpec::strike);

  m.def("norm_cdf", py::vectorize(&std_normal_cdf), py::arg("x"));
  m.def("norm_ppf", py::vectorize(&std_normal_inv_cdf), py::arg("u"));
  m.def("smooth_clip", py::vectorize(&smooth_clip), py::arg("x"), py::arg("R"));
  m.def("black_scholes_call", &black_scholes_call, py::arg("s0"), py::arg("strike"), py::arg("rate"),
        py::arg("sigma"), py::arg("maturity"));

  m.def(
      "sobol",
      [](std::size_t n, std::size_t dimension, std::uint64_t seed, bool scrambled) {
        return SobolGenerator(*directions(), dimension, seed, scrambled).block(n);
      },
      py::arg("n"), py::arg("dimension"), py::arg("seed") = 0, py::arg("scrambled") = true,
      "First n points of the (optionally scrambled) Sobol sequence as an (n, dimension) array.");

  m.def(
      "path_factor",
      [](const std::string& method, std::size_t steps, double maturity) {
        return make_path_factor(parse_path_method(method), steps, maturity).matrix;
      },
      py::arg("method"), py::arg("steps"), py::arg("maturity") = 1.0,
      "Factor A with A A^T equal to the Brownian covariance at steps equally spaced times.");

  m.def("brownian_covariance", &bm_covariance, py::arg("steps"), py::arg("maturity") = 1.0);

  m.def(
      "estimate",
      [](const ModelSpec& spec, const std::string& method, std::size_t n, std::uint64_t seed, const std::string& path) {
        const Problem p = problem_for(spec, path);
        return run_method(p, parse_method(method), n, seed).estimate;
      },
      py::arg("spec"), py::arg("method") = "CQMC_IS", py::arg("n") = 16384, py::arg("seed") = 20240917,
      py::arg("path") = "pca", py::call_guard<py::gil_scoped_release>());

  m.def(
      "drift",
      [](const ModelSpec& spec, const std::string& path) { return problem_for(spec, path).drift.mu; },
      py::arg("spec"), py::arg("path") = "pca", "Importance-sampling drift mu* of the preintegrated integrand.");

  m.def(
      "reference_value",
      [](const ModelSpec& spec, std::uint64_t seed, unsigned log2n, std::size_t scrambles, const std::string& path) {
        return reference_value(problem_for(spec, path), seed, log2n, scrambles);
      },
      py::arg("spec"), py::arg("seed") = 20240917, py::arg("log2n") = 16, py::arg("scrambles") = 8,
      py::arg("path") = "pca", py::call_guard<py::gil_scoped_release>());

  m.def(
      "rmse_study",
      [](const ModelSpec& spec, const std::vector<std::string>& methods, const std::vector<std::size_t>& n_grid,
         std::size_t reps, double reference, std::uint64_t seed, const std::string& path, unsigned threads) {
        const Problem p = problem_for(spec, path);
        std::vector<Method> ms;
        for (const auto& name : methods) ms.push_back(parse_method(name));
        StudyResult r;
        {
          py::gil_scoped_release release;
          r = rmse_study(p, ms, n_grid, reps, reference, seed, threads);
        }
        py::dict out;
        for (Method mth : ms) {
          std::vector<std::size_t> ns;
          std::vector<double> rmse;
          std::vector<RmseRow> rows;
          for (const auto& row : r.rows)
            if (row.method == mth) {
              ns.push_back(row.n);
              rmse.push_back(row.rmse);
              rows.push_back(row);
            }
          py::dict entry;
          entry["n"] = ns;
          entry["rmse"] = rmse;
          entry["slope"] = rows.size() >= 4 ? py::cast(fit_slope(rows).slope) : py::none();
          out[py::str(std::string(method_name(mth)))] = entry;
        }
        return out;
      },
      py::arg("spec"), py::arg("methods"), py::arg("n_grid"), py::arg("reps"), py::arg("reference"),
      py::arg("seed") = 20240917, py::arg("path") = "pca", py::arg("threads") = 0,
      "RMSE per method and sample size, with the fitted log-log slope.");

  m.def(
      "validate",
      []() {
        std::vector<py::tuple> out;
        for (const auto& c : run_validation_suite(*directions()))
          out.push_back(py::make_tuple(c.name, c.measured, c.threshold, c.passed));
        return out;
      },
      "Oracle suite as (name, measured, threshold, passed) tuples.");
}
