#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "glhs/potential.hpp"

namespace glhs {

inline const std::vector<std::string> kExperiments = {"theorem", "lemma-equality", "fkg",  "corollary", "order",
                                                      "negcorr", "kite",           "gap", "all"};

struct GraphConfig {
  std::string kind = "cycle";  // cycle | torus
  int side = 8;
  int dim = 1;
};

struct PotentialConfig {
  std::string family = "gaussian";  // gaussian | smoothed_gaussian
  double epsilon = 0.0;
};

struct ExperimentConfig {
  std::string experiment = "all";
  GraphConfig graph;
  PotentialConfig potential;
  std::vector<double> t_list = {0.25, 0.5, 1.0, 2.0};
  int x = 0;
  int y = 0;
  long replicas = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 42;
  std::string output = "glhs_out";
  unsigned workers = 0;
  double pair_stiffness = 0.5;
  int fkg_functionals = 10;
  int kite_side = 16;
  std::vector<double> kite_t_list = {0.1, 0.25, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> gap_t_list = {2.5, 3.0, 3.5, 4.0, 4.5};
  std::vector<int> gap_cycle_sizes = {16, 32, 64};

  nlohmann::json to_json() const;
};

// Parse or validation failure. exit_code is 2 for both; field names the
// offending key path for semantic errors, line/column for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Accepts a path or inline JSON text (anything starting with '{').
ExperimentConfig load_config(const std::string& path_or_text);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);

// Throws ConfigError naming the field path.
void validate(const ExperimentConfig& cfg);

std::shared_ptr<const Graph> make_graph(const GraphConfig& g);
Potential make_potential(const PotentialConfig& p);

}  // namespace glhs
