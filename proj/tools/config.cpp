#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "rqmcis/cli.hpp"
#include "rqmcis/errors.hpp"

namespace rqmcis {

namespace {

const std::set<std::string> kCommonKeys = {"model", "path",  "K",         "r",         "T",          "d",
                                           "n_min", "n_max", "reps",      "seed",      "threads",    "out",
                                           "directions",     "ref_log2n", "ref_scrambles", "methods"};
const std::set<std::string> kBsKeys = {"S0", "sigma"};
const std::set<std::string> kBasketKeys = {"S0_1", "S0_2", "sigma1", "sigma2", "rho", "w1", "w2"};
const std::set<std::string> kHestonKeys = {"S0", "V0", "theta", "nu", "sigma", "rho"};

template <class T>
T scalar(const YAML::Node& doc, const std::string& key) {
  try {
    return doc[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "has the wrong type");
  }
}

template <class T>
void read(const YAML::Node& doc, const std::string& key, T& target) {
  if (doc[key]) target = scalar<T>(doc, key);
}

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

std::vector<std::size_t> ExperimentConfig::n_grid() const {
  std::vector<std::size_t> grid;
  for (int m = n_min_log2; m <= n_max_log2; ++m) grid.push_back(std::size_t{1} << m);
  return grid;
}

ModelSpec ExperimentConfig::model_for_strike(double strike) const {
  ModelSpec spec = model;
  set_strike(spec, strike);
  return spec;
}

ExperimentConfig parse_config(std::string_view text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!doc.IsMap()) throw ConfigError("<document>", "expected a key-value mapping");

  ExperimentConfig cfg;
  const std::string model = doc["model"] ? scalar<std::string>(doc, "model") : std::string("bs_asian");
  const std::set<std::string>* model_keys = nullptr;
  if (model == "bs_asian") {
    model_keys = &kBsKeys;
  } else if (model == "basket") {
    model_keys = &kBasketKeys;
  } else if (model == "heston") {
    model_keys = &kHestonKeys;
  } else {
    throw ConfigError("model", "must be one of bs_asian, basket, heston");
  }
  for (const auto& entry : doc) {
    const std::string key = entry.first.as<std::string>();
    if (!kCommonKeys.count(key) && !model_keys->count(key)) throw ConfigError(key, "unknown key");
    cfg.explicit_keys.insert(key);
  }

  if (model == "bs_asian") {
    BsAsianSpec s;
    read(doc, "S0", s.s0);
    read(doc, "sigma", s.sigma);
    read(doc, "r", s.rate);
    read(doc, "T", s.maturity);
    read(doc, "d", s.steps);
    cfg.model = s;
  } else if (model == "basket") {
    BasketSpec s;
    read(doc, "S0_1", s.s0_1);
    read(doc, "S0_2", s.s0_2);
    read(doc, "sigma1", s.sigma1);
    read(doc, "sigma2", s.sigma2);
    read(doc, "rho", s.rho);
    read(doc, "w1", s.w1);
    read(doc, "w2", s.w2);
    read(doc, "r", s.rate);
    read(doc, "T", s.maturity);
    read(doc, "d", s.steps);
    cfg.model = s;
  } else {
    HestonSpec s;
    read(doc, "S0", s.s0);
    read(doc, "V0", s.v0);
    read(doc, "theta", s.theta);
    read(doc, "nu", s.kappa);
    read(doc, "sigma", s.vol_of_vol);
    read(doc, "rho", s.rho);
    read(doc, "r", s.rate);
    read(doc, "T", s.maturity);
    read(doc, "d", s.steps);
    cfg.model = s;
  }

  if (doc["path"]) {
    try {
      cfg.path = parse_path_method(scalar<std::string>(doc, "path"));
    } catch (const DomainError& e) {
      throw ConfigError("path", e.what());
    }
  }

  check(static_cast<bool>(doc["K"]), "K", "is required");
  if (doc["K"].IsSequence()) {
    try {
      cfg.strikes = doc["K"].as<std::vector<double>>();
    } catch (const YAML::Exception&) {
      throw ConfigError("K", "must be a list of numbers");
    }
  } else {
    cfg.strikes = {scalar<double>(doc, "K")};
  }
  check(!cfg.strikes.empty(), "K", "must list at least one strike");
  for (double k : cfg.strikes) check(std::isfinite(k) && k >= 0.0, "K", "strikes must be nonnegative");

  if (doc["methods"]) {
    std::vector<std::string> names;
    try {
      names = doc["methods"].as<std::vector<std::string>>();
    } catch (const YAML::Exception&) {
      throw ConfigError("methods", "must be a list of method names");
    }
    check(!names.empty(), "methods", "must not be empty");
    cfg.methods.clear();
    for (const auto& n : names) {
      try {
        cfg.methods.push_back(parse_method(n));
      } catch (const DomainError& e) {
        throw ConfigError("methods", e.what());
      }
    }
  }

  read(doc, "n_min", cfg.n_min_log2);
  read(doc, "n_max", cfg.n_max_log2);
  long long reps = static_cast<long long>(cfg.reps);
  read(doc, "reps", reps);
  read(doc, "ref_log2n", cfg.reference_log2n);
  long long scrambles = static_cast<long long>(cfg.reference_scrambles);
  read(doc, "ref_scrambles", scrambles);
  read(doc, "seed", cfg.seed);
  long long threads = 0;
  read(doc, "threads", threads);
  if (doc["out"]) cfg.out = scalar<std::string>(doc, "out");
  if (doc["directions"]) cfg.directions = scalar<std::string>(doc, "directions");

  check(reps >= 2, "reps", "must be at least 2");
  check(scrambles >= 1, "ref_scrambles", "must be at least 1");
  check(threads >= 0, "threads", "must be nonnegative");
  check(cfg.n_min_log2 >= 0 && cfg.n_min_log2 <= 30, "n_min", "must lie in [0, 30]");
  check(cfg.n_max_log2 >= cfg.n_min_log2 && cfg.n_max_log2 <= 30, "n_max", "must lie in [n_min, 30]");
  check(cfg.reference_log2n >= 1 && cfg.reference_log2n <= 30, "ref_log2n", "must lie in [1, 30]");
  cfg.reps = static_cast<std::size_t>(reps);
  cfg.reference_scrambles = static_cast<std::size_t>(scrambles);
  cfg.threads = static_cast<unsigned>(threads);

  for (double k : cfg.strikes) {
    try {
      validate(cfg.model_for_strike(k));
    } catch (const DomainError& e) {
      throw ConfigError(model, e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void apply_desk_scale(ExperimentConfig& config) {
  if (!config.explicit_keys.count("reps")) config.reps = 30;
  if (!config.explicit_keys.count("n_max")) config.n_max_log2 = std::max(config.n_min_log2, 13);
  if (!config.explicit_keys.count("ref_log2n")) config.reference_log2n = 16;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RQMCIS_THREADS"); env && *env) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace rqmcis
