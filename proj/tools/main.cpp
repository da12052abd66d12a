#include <iostream>

#include <CLI11.hpp>

#include "rqmcis/cli.hpp"
#include "rqmcis/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Randomized QMC pricing with preintegration and importance sampling"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
  bool full = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment configuration (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--full", full, "full protocol: 100 reps, n up to 2^16, reference 2^19");
  };

  auto* converge = app.add_subcommand("converge", "RMSE convergence study; writes runs.csv and rmse.csv per strike");
  add_common(converge);

  auto* price = app.add_subcommand("price", "single estimate per strike");
  add_common(price);
  std::string method_text = "CQMC_IS";
  std::size_t n = 1u << 14;
  price->add_option("--method", method_text, "MC, QMC, CQMC or CQMC_IS");
  price->add_option("--n", n, "sample size")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "run the oracle suite");
  std::string directions_path;
  validate->add_option("--directions", directions_path, "direction-number table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      const auto path = directions_path.empty() ? rqmcis::default_direction_file() : std::filesystem::path(directions_path);
      return rqmcis::cmd_validate(rqmcis::load_direction_numbers(path), std::cout);
    }

    rqmcis::ExperimentConfig config = rqmcis::load_config(config_path);
    if (!full) rqmcis::apply_desk_scale(config);
    if (converge->count("--seed") || price->count("--seed")) config.seed = seed;
    if (threads > 0) config.threads = threads;
    if (!out.empty()) config.out = out;

    if (price->parsed()) {
      rqmcis::Method method;
      try {
        method = rqmcis::parse_method(method_text);
      } catch (const rqmcis::DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
      }
      return rqmcis::cmd_price(config, method, n, std::cout);
    }
    return rqmcis::cmd_converge(config, std::cout);
  } catch (const rqmcis::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
