#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "rqmcis/cli.hpp"
#include "rqmcis/errors.hpp"
#include "rqmcis/validate.hpp"

namespace rqmcis {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string num(double v) { return fmt("%.17g", v); }

std::shared_ptr<const DirectionNumbers> load_directions(const ExperimentConfig& config) {
  const auto path = config.directions.empty() ? default_direction_file() : config.directions;
  return std::make_shared<const DirectionNumbers>(load_direction_numbers(path));
}

std::string strike_dir(double strike) { return "K" + fmt("%g", strike); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

int cmd_converge(const ExperimentConfig& config, std::ostream& log) {
  const auto dirs = load_directions(config);
  const unsigned threads = resolve_threads(config.threads);
  const auto grid = config.n_grid();
  for (double strike : config.strikes) {
    const ModelSpec spec = config.model_for_strike(strike);
    const Problem problem = make_problem(spec, config.path, dirs);
    const double reference = reference_value(problem, config.seed, static_cast<unsigned>(config.reference_log2n),
                                             config.reference_scrambles);
    const StudyResult study = rmse_study(problem, config.methods, grid, config.reps, reference, config.seed, threads);

    std::ostringstream runs;
    runs << "method,n,rep,seed,estimate\n";
    for (const auto& r : study.runs) {
      runs << csv_field(method_name(r.method)) << ',' << r.n << ',' << r.rep << ',' << r.seed << ',' << num(r.estimate)
           << '\n';
    }
    std::ostringstream rmse;
    rmse << "method,n,rmse,reps,reference\n";
    for (const auto& r : study.rows) {
      rmse << csv_field(method_name(r.method)) << ',' << r.n << ',' << num(r.rmse) << ',' << r.reps << ','
           << num(r.reference) << '\n';
    }
    const auto dir = config.out / strike_dir(strike);
    std::filesystem::create_directories(dir);
    write_file(dir / "runs.csv", runs.str());
    write_file(dir / "rmse.csv", rmse.str());

    log << model_name(spec) << " K=" << fmt("%g", strike) << " d=" << steps_of(spec)
        << " path=" << path_method_name(config.path) << " reference=" << num(reference) << '\n';
    for (Method m : config.methods) {
      std::vector<RmseRow> rows;
      for (const auto& r : study.rows)
        if (r.method == m) rows.push_back(r);
      log << "  " << method_name(m) << " slope=";
      try {
        const SlopeFit fit = fit_slope(rows);
        log << fmt("%.4f", fit.slope);
        if (fit.excluded > 0) log << " (" << fit.excluded << " zero-rmse rows excluded)";
      } catch (const InsufficientDataError& e) {
        log << "n/a (" << e.what() << ')';
      }
      log << '\n';
    }
    log << "  wrote " << (dir / "runs.csv").string() << " and " << (dir / "rmse.csv").string() << '\n';
  }
  return 0;
}

int cmd_price(const ExperimentConfig& config, Method method, std::size_t n, std::ostream& log) {
  const auto dirs = load_directions(config);
  for (double strike : config.strikes) {
    const ModelSpec spec = config.model_for_strike(strike);
    const Problem problem = make_problem(spec, config.path, dirs);
    const RunRecord run = run_method(problem, method, n, config.seed);
    log << model_name(spec) << " K=" << fmt("%g", strike) << ' ' << method_name(method) << " n=" << n
        << " estimate=" << num(run.estimate);
    if (method == Method::CQMC_IS) {
      double norm2 = 0.0;
      for (double m : problem.drift.mu) norm2 += m * m;
      log << " drift_norm=" << num(std::sqrt(norm2));
    }
    log << '\n';
  }
  return 0;
}

int cmd_validate(const DirectionNumbers& directions, std::ostream& log) {
  const auto results = run_validation_suite(directions);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    log << (r.passed ? "PASS " : "FAIL ") << r.name << " measured=" << fmt("%.3e", r.measured)
        << " threshold=" << fmt("%.3e", r.threshold) << '\n';
  }
  log << (all ? "all checks passed" : "one or more checks failed") << '\n';
  return all ? 0 : 1;
}

}  // namespace rqmcis
