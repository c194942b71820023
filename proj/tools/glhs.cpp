#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "glhs/config.hpp"
#include "glhs/error.hpp"
#include "glhs/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Conservative Ginzburg-Landau dynamics: simulation and covariance checks"};
  std::optional<std::string> experiment;
  std::optional<std::string> experiment_flag;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long> replicas;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  app.add_option("name", experiment, "theorem | lemma-equality | fkg | corollary | order | negcorr | kite | gap | all");
  app.add_option("--experiment", experiment_flag, "same as the positional experiment");
  app.add_option("--config", config_path, "JSON config file or inline JSON object");
  app.add_option("--seed", seed, "master seed (overrides GLHS_SEED and the config)");
  app.add_option("--replicas", replicas, "replica count");
  app.add_option("--out", out, "output path prefix");
  app.add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  glhs::ExperimentConfig cfg;
  try {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) j = glhs::load_config(config_path).to_json();
    if (experiment && experiment_flag && *experiment != *experiment_flag)
      throw glhs::ConfigError("config error at 'experiment': positional and --experiment disagree");
    if (experiment) j["experiment"] = *experiment;
    if (experiment_flag) j["experiment"] = *experiment_flag;
    if (const char* env = std::getenv("GLHS_SEED")) {
      try {
        j["seed"] = std::stoull(env);
      } catch (const std::exception&) {
        throw glhs::ConfigError("config error at 'GLHS_SEED': not an unsigned integer");
      }
    }
    if (seed) j["seed"] = *seed;
    if (replicas) j["replicas"] = *replicas;
    if (out) j["output"] = *out;
    if (workers) j["workers"] = *workers;
    cfg = glhs::config_from_json(j);
  } catch (const glhs::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const glhs::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    const int code = glhs::run(cfg);
    std::cout << (code == 0 ? "all verdicts passed" : "some verdicts failed") << "; wrote " << cfg.output
              << ".csv and " << cfg.output << ".summary.json\n";
    return code;
  } catch (const glhs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
