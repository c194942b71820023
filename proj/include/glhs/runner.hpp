#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "glhs/config.hpp"
#include "glhs/estimators.hpp"

namespace glhs {

inline constexpr const char* kCsvHeader =
    "experiment,graph,side,dim,potential,epsilon,t,x,y,quantity,value,stderr,replicas,oracle,verdict,margin_sigmas,seed";

// One CSV line. Optional fields print empty.
struct ResultRow {
  std::string experiment;
  std::string graph;
  int side = 0;
  int dim = 0;
  std::string potential;
  double epsilon = 0.0;
  std::optional<double> t;
  std::optional<int> x;
  std::optional<int> y;
  std::string quantity;
  std::optional<double> value;
  std::optional<double> std_error;
  std::optional<long> replicas;
  std::optional<double> oracle;
  std::optional<bool> verdict;
  std::optional<double> margin_sigmas;
  std::uint64_t seed = 0;
};

struct VerdictRecord {
  std::string experiment;
  Verdict verdict;
  std::optional<double> t;
  std::optional<int> x;
  std::optional<int> y;
  std::size_t row = 0;                 // CSV data row (0-based) carrying the verdict
  std::vector<std::size_t> input_rows; // rows of the estimates it was decided on
};

struct RunResult {
  std::vector<ResultRow> rows;
  std::vector<VerdictRecord> verdicts;

  bool all_pass() const;
};

// Runs the configured experiment (or every experiment for "all").
RunResult run_experiments(const ExperimentConfig& cfg);

void write_csv(std::ostream& out, const RunResult& result);
nlohmann::json summary_json(const ExperimentConfig& cfg, const RunResult& result);

// Writes <prefix>.csv and <prefix>.summary.json; returns 0 if every verdict
// passed and 1 otherwise.
int run(const ExperimentConfig& cfg);

}  // namespace glhs
