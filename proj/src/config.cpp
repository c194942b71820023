#include "glhs/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "glhs/error.hpp"
#include "glhs/estimators.hpp"

namespace glhs {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError("config error at '" + field + "': " + msg);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(prefix + key, "unknown key '" + key + "'");
  }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(path, std::string("wrong type: ") + e.what());
  }
}

std::vector<double> get_times(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.at(key).is_array()) fail(path, "expected an array of times");
  std::vector<double> out;
  for (std::size_t i = 0; i < obj.at(key).size(); ++i) {
    const auto& v = obj.at(key)[i];
    if (!v.is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void check_times(const std::vector<double>& times, double dt, const std::string& path) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) fail(p, "times must be finite and nonnegative");
    if (std::fabs(std::round(times[i] / dt) * dt - times[i]) > 1e-12) fail(p, "time is not a multiple of dt");
  }
}

}  // namespace

json ExperimentConfig::to_json() const {
  return json{{"experiment", experiment},
              {"graph", {{"kind", graph.kind}, {"side", graph.side}, {"dim", graph.dim}}},
              {"potential", {{"family", potential.family}, {"epsilon", potential.epsilon}}},
              {"t_list", t_list},
              {"x", x},
              {"y", y},
              {"replicas", replicas},
              {"dt", dt},
              {"seed", seed},
              {"output", output},
              {"workers", workers},
              {"pair_stiffness", pair_stiffness},
              {"fkg_functionals", fkg_functionals},
              {"kite_side", kite_side},
              {"kite_t_list", kite_t_list},
              {"gap_t_list", gap_t_list},
              {"gap_cycle_sizes", gap_cycle_sizes}};
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) fail("", "top level must be an object");
  reject_unknown(j,
                 {"experiment", "graph", "potential", "t_list", "x", "y", "replicas", "dt", "seed", "output", "workers",
                  "pair_stiffness", "fkg_functionals", "kite_side", "kite_t_list", "gap_t_list", "gap_cycle_sizes"},
                 "");
  ExperimentConfig c;
  if (j.contains("experiment")) c.experiment = get_as<std::string>(j, "experiment", "experiment");
  if (j.contains("graph")) {
    const auto& g = j.at("graph");
    if (!g.is_object()) fail("graph", "expected an object");
    reject_unknown(g, {"kind", "side", "dim"}, "graph.");
    if (g.contains("kind")) c.graph.kind = get_as<std::string>(g, "kind", "graph.kind");
    if (g.contains("side")) c.graph.side = get_as<int>(g, "side", "graph.side");
    if (g.contains("dim")) c.graph.dim = get_as<int>(g, "dim", "graph.dim");
    if (c.graph.kind == "cycle" && !g.contains("dim")) c.graph.dim = 1;
  }
  if (j.contains("potential")) {
    const auto& p = j.at("potential");
    if (!p.is_object()) fail("potential", "expected an object");
    reject_unknown(p, {"family", "epsilon"}, "potential.");
    if (p.contains("family")) c.potential.family = get_as<std::string>(p, "family", "potential.family");
    if (p.contains("epsilon")) c.potential.epsilon = get_as<double>(p, "epsilon", "potential.epsilon");
  }
  if (j.contains("t_list")) c.t_list = get_times(j, "t_list", "t_list");
  if (j.contains("x")) c.x = get_as<int>(j, "x", "x");
  if (j.contains("y")) c.y = get_as<int>(j, "y", "y");
  if (j.contains("replicas")) c.replicas = get_as<long>(j, "replicas", "replicas");
  if (j.contains("dt")) c.dt = get_as<double>(j, "dt", "dt");
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", "seed");
  if (j.contains("output")) c.output = get_as<std::string>(j, "output", "output");
  if (j.contains("workers")) c.workers = get_as<unsigned>(j, "workers", "workers");
  if (j.contains("pair_stiffness")) c.pair_stiffness = get_as<double>(j, "pair_stiffness", "pair_stiffness");
  if (j.contains("fkg_functionals")) c.fkg_functionals = get_as<int>(j, "fkg_functionals", "fkg_functionals");
  if (j.contains("kite_side")) c.kite_side = get_as<int>(j, "kite_side", "kite_side");
  if (j.contains("kite_t_list")) c.kite_t_list = get_times(j, "kite_t_list", "kite_t_list");
  if (j.contains("gap_t_list")) c.gap_t_list = get_times(j, "gap_t_list", "gap_t_list");
  if (j.contains("gap_cycle_sizes")) c.gap_cycle_sizes = get_as<std::vector<int>>(j, "gap_cycle_sizes", "gap_cycle_sizes");
  validate(c);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig load_config(const std::string& path_or_text) {
  const auto first = path_or_text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && path_or_text[first] == '{') return parse_config_text(path_or_text);
  std::ifstream in(path_or_text);
  if (!in) throw ConfigError("cannot open config file '" + path_or_text + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate(const ExperimentConfig& c) {
  if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end())
    fail("experiment", "unknown experiment '" + c.experiment + "'");
  if (c.graph.kind != "cycle" && c.graph.kind != "torus") fail("graph.kind", "expected 'cycle' or 'torus'");
  if (c.graph.side < 3) fail("graph.side", "side must be >= 3");
  if (c.graph.dim != 1 && c.graph.dim != 2) fail("graph.dim", "dim must be 1 or 2");
  if (c.graph.kind == "cycle" && c.graph.dim != 1) fail("graph.dim", "a cycle has dim 1");
  if (c.potential.family != "gaussian" && c.potential.family != "smoothed_gaussian")
    fail("potential.family", "expected 'gaussian' or 'smoothed_gaussian'");
  if (!(c.potential.epsilon >= 0.0) || c.potential.epsilon > 10.0)
    fail("potential.epsilon", "epsilon must lie in [0, 10]");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) fail("dt", "dt must be positive");
  const Potential v = make_potential(c.potential);
  const int degree = 2 * c.graph.dim;
  if (c.dt > 1.0 / (4.0 * degree * v.c_plus())) fail("dt", "dt exceeds the stability guard 1/(4 d c_plus)");
  const int n = c.graph.dim == 1 ? c.graph.side : c.graph.side * c.graph.side;
  if (c.x < 0 || c.x >= n) fail("x", "vertex out of range [0, " + std::to_string(n) + ")");
  if (c.y < 0 || c.y >= n) fail("y", "vertex out of range [0, " + std::to_string(n) + ")");
  if (c.replicas < kMinReplicas) fail("replicas", "at least " + std::to_string(kMinReplicas) + " replicas required");
  if (c.t_list.empty()) fail("t_list", "at least one time required");
  check_times(c.t_list, c.dt, "t_list");
  check_times(c.gap_t_list, c.dt, "gap_t_list");
  if (c.gap_t_list.size() < 4) fail("gap_t_list", "decay fit needs at least 4 times");
  if (!(c.pair_stiffness > 0.0)) fail("pair_stiffness", "pair stiffness must be positive");
  if (c.fkg_functionals < 1) fail("fkg_functionals", "at least one functional required");
  if (c.kite_side < 8) fail("kite_side", "kite side must be >= 8");
  for (std::size_t i = 0; i < c.kite_t_list.size(); ++i) {
    const double t = c.kite_t_list[i];
    if (!(t >= 0.0) || t > c.kite_side / 8.0)
      fail("kite_t_list[" + std::to_string(i) + "]", "time outside the wraparound window [0, side/8]");
  }
  for (std::size_t i = 0; i < c.gap_cycle_sizes.size(); ++i) {
    if (c.gap_cycle_sizes[i] < 3 || c.gap_cycle_sizes[i] > 2048)
      fail("gap_cycle_sizes[" + std::to_string(i) + "]", "cycle size must lie in [3, 2048]");
  }
}

std::shared_ptr<const Graph> make_graph(const GraphConfig& g) {
  if (g.kind == "cycle") return std::make_shared<const Graph>(build_cycle(g.side));
  return std::make_shared<const Graph>(build_torus(g.side, g.dim));
}

Potential make_potential(const PotentialConfig& p) {
  if (p.family == "gaussian") return gaussian();
  return smoothed_gaussian(p.epsilon);
}

}  // namespace glhs
