#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rqmcis/estimators.hpp"
#include "rqmcis/models.hpp"
#include "rqmcis/pathgen.hpp"

namespace rqmcis {

/// One experiment: a model with a list of strikes, the sample-size grid and
/// the repetition protocol. Each strike is studied separately.
struct ExperimentConfig {
  ModelSpec model;
  PathMethod path = PathMethod::PCA;
  std::vector<double> strikes;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  int n_min_log2 = 7;
  int n_max_log2 = 16;
  std::size_t reps = 100;
  int reference_log2n = 19;
  std::size_t reference_scrambles = 8;
  std::uint64_t seed = 20240917;
  unsigned threads = 0;  // 0: RQMCIS_THREADS, else hardware concurrency
  std::filesystem::path out = "results";
  std::filesystem::path directions;  // empty: default_direction_file()
  std::set<std::string> explicit_keys;

  std::vector<std::size_t> n_grid() const;
  ModelSpec model_for_strike(double strike) const;
};

/// Parses a flat YAML mapping (block or flow style). Omitted optional keys
/// take the model's published defaults. Unknown keys and invariant
/// violations throw ConfigError naming the key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Desk-scale protocol for keys the document left unset: 30 repetitions,
/// n up to 2^13 and a 2^16-point reference.
void apply_desk_scale(ExperimentConfig& config);

/// Resolves the worker count: explicit value, then $RQMCIS_THREADS, then
/// hardware concurrency.
unsigned resolve_threads(unsigned requested);

std::string csv_field(std::string_view text);

/// Writes <out>/K<strike>/runs.csv and rmse.csv per strike and prints the
/// reference value and fitted slopes. Returns the process exit code.
int cmd_converge(const ExperimentConfig& config, std::ostream& log);

/// Prints one estimate per strike; for CQMC_IS also the drift norm.
int cmd_price(const ExperimentConfig& config, Method method, std::size_t n, std::ostream& log);

/// Runs the oracle suite and prints one line per check.
int cmd_validate(const DirectionNumbers& directions, std::ostream& log);

}  // namespace rqmcis
