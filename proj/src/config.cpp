#include "pacmoo/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace pacmoo {

namespace {

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": bad value");
  }
}

template <typename T>
void read(const YAML::Node& parent, const char* key, T& out, const std::string& where) {
  if (const auto n = parent[key]) out = get<T>(n, where + "." + key);
}

Vector read_vector(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) throw ConfigError(where + ": expected a list");
  Vector v(static_cast<Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) v[i] = get<double>(node[i], where);
  return v;
}

void read_benchmark(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "benchmark", {"name", "feasible_fraction", "noise_std", "reference_point"});
  read(node, "name", cfg.problem, "benchmark");
  if (node["feasible_fraction"]) {
    cfg.feasible_fraction = get<double>(node["feasible_fraction"], "benchmark.feasible_fraction");
  }
  if (node["noise_std"]) cfg.noise_std = read_vector(node["noise_std"], "benchmark.noise_std");
  if (node["reference_point"]) {
    cfg.reference_point = read_vector(node["reference_point"], "benchmark.reference_point");
  }
}

void read_budget(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "budget", {"initial_points", "iterations", "init_mode"});
  read(node, "initial_points", cfg.initial_points, "budget");
  read(node, "iterations", cfg.iterations, "budget");
  if (node["init_mode"]) {
    cfg.init_mode = parse_init_mode(get<std::string>(node["init_mode"], "budget.init_mode"));
  }
}

void read_solver(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "solver", {"pareto_samples", "rff_features", "gp_restarts", "ard",
                              "pool_size", "refine_steps", "evo"});
  read(node, "pareto_samples", cfg.pareto_samples, "solver");
  read(node, "rff_features", cfg.rff_features, "solver");
  read(node, "gp_restarts", cfg.gp_restarts, "solver");
  read(node, "ard", cfg.ard, "solver");
  read(node, "pool_size", cfg.acquisition.pool_size, "solver");
  read(node, "refine_steps", cfg.acquisition.refine_steps, "solver");
  if (const auto evo = node["evo"]) {
    check_keys(evo, "solver.evo", {"population_size", "generations", "crossover_prob",
                                   "mutation_prob", "eta_crossover", "eta_mutation"});
    EvoConfig& e = cfg.inner_evo;
    read(evo, "population_size", e.population_size, "solver.evo");
    read(evo, "generations", e.generations, "solver.evo");
    read(evo, "crossover_prob", e.crossover_prob, "solver.evo");
    read(evo, "mutation_prob", e.mutation_prob, "solver.evo");
    read(evo, "eta_crossover", e.eta_crossover, "solver.evo");
    read(evo, "eta_mutation", e.eta_mutation, "solver.evo");
  }
}

std::optional<PreferenceSpec> read_preferences(const YAML::Node& node, int num_objectives,
                                               const std::string& where) {
  check_keys(node, where, {"objective_prefs", "preferred", "share", "block_mass"});
  PreferenceSpec spec;
  if (node["objective_prefs"]) {
    if (node["preferred"] || node["share"]) {
      throw ConfigError(where + ": give either objective_prefs or preferred/share, not both");
    }
    spec.objective_prefs = read_vector(node["objective_prefs"], where + ".objective_prefs");
  } else if (node["preferred"] && node["share"]) {
    spec.objective_prefs =
        preferred_objective_prefs(num_objectives, get<int>(node["preferred"], where),
                                  get<double>(node["share"], where));
  } else {
    throw ConfigError(where + ": needs objective_prefs or preferred + share");
  }
  if (spec.objective_prefs.size() != num_objectives) {
    throw ConfigError(where + ": objective_prefs length differs from the objective count");
  }
  if (node["block_mass"]) spec.block_mass = get<double>(node["block_mass"], where + ".block_mass");
  // Surface simplex errors at load time rather than mid-run.
  make_preferences(spec.objective_prefs, 1, spec.block_mass);
  return spec;
}

int objective_count(const std::string& benchmark) {
  try {
    return make_benchmark(benchmark).num_objectives();
  } catch (const RegistryError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  try {
    if (text.find(',') == std::string::npos) {
      std::size_t used = 0;
      const long count = std::stol(text, &used);
      if (used != text.size() || count < 1) throw ConfigError("");
      for (long i = 0; i < count; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
      return seeds;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw ConfigError("");
    }
  } catch (const std::exception&) {
    throw ConfigError("seeds: expected a count or a comma-separated list, got '" + text + "'");
  }
  if (seeds.empty()) throw ConfigError("seeds: empty list");
  return seeds;
}

ExperimentConfig parse_experiment_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML parse error: ") + e.what());
  }
  check_keys(root, "config",
             {"benchmark", "budget", "solver", "seeds", "output", "trace", "variants"});

  RunConfig base;
  if (root["benchmark"]) read_benchmark(root["benchmark"], base);
  if (root["budget"]) read_budget(root["budget"], base);
  if (root["solver"]) read_solver(root["solver"], base);

  ExperimentConfig out;
  if (const auto seeds = root["seeds"]) {
    if (seeds.IsScalar()) {
      out.seeds = parse_seed_list(seeds.as<std::string>());
    } else if (seeds.IsSequence()) {
      for (const auto& s : seeds) out.seeds.push_back(get<std::uint64_t>(s, "seeds"));
    } else {
      throw ConfigError("seeds: expected a count or a list");
    }
  } else {
    out.seeds = {0};
  }
  if (std::set<std::uint64_t>(out.seeds.begin(), out.seeds.end()).size() != out.seeds.size()) {
    throw ConfigError("seeds: duplicates");
  }
  read(root, "output", out.output_dir, "output");
  if (const auto trace = root["trace"]) {
    check_keys(trace, "trace", {"wallclock"});
    read(trace, "wallclock", out.wallclock, "trace");
  }

  const auto variants = root["variants"];
  if (!variants || !variants.IsSequence() || variants.size() == 0) {
    throw ConfigError("variants: expected a nonempty list");
  }
  std::set<std::string> names;
  for (const auto& v : variants) {
    check_keys(v, "variant", {"name", "algorithm", "preferences", "benchmark", "budget", "solver"});
    Variant variant{"", base};
    if (!v["name"]) throw ConfigError("variant: missing name");
    variant.name = get<std::string>(v["name"], "variant.name");
    const std::string where = "variant '" + variant.name + "'";
    if (!names.insert(variant.name).second) throw ConfigError(where + ": duplicate name");
    if (v["benchmark"]) read_benchmark(v["benchmark"], variant.run);
    if (v["budget"]) read_budget(v["budget"], variant.run);
    if (v["solver"]) read_solver(v["solver"], variant.run);
    if (v["algorithm"]) {
      try {
        variant.run.algorithm = parse_algorithm(get<std::string>(v["algorithm"], where));
      } catch (const UsageError& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
    const int k = objective_count(variant.run.problem);
    if (v["preferences"]) {
      try {
        variant.run.preferences = read_preferences(v["preferences"], k, where + ".preferences");
      } catch (const ConfigError&) {
        throw;
      } catch (const UsageError& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
    try {
      variant.run.validate();
    } catch (const UsageError& e) {
      throw ConfigError(where + ": " + e.what());
    }
    out.variants.push_back(std::move(variant));
  }
  return out;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

}  // namespace pacmoo
