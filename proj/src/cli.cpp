#include "pacmoo/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "pacmoo/config.hpp"
#include "pacmoo/trace_io.hpp"

namespace pacmoo {

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kConfigError = 2;

void write_file(const fs::path& path, const auto& writer) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  writer(f);
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Preference-aware constrained multi-objective Bayesian optimization"};
  std::string config_path;
  std::string out_dir;
  std::string seeds_text;
  std::vector<std::string> variant_filter;
  bool list_benchmarks = false;
  bool validate_only = false;
  app.add_option("--config", config_path, "YAML experiment config");
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--seeds", seeds_text, "Seed count N (seeds 0..N-1) or comma-separated list");
  app.add_option("--variant", variant_filter, "Only run the named variant(s)");
  app.add_flag("--list-benchmarks", list_benchmarks, "Print the benchmark names and exit");
  app.add_flag("--validate", validate_only, "Parse the config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  if (list_benchmarks) {
    for (const auto& name : benchmark_names()) out << name << '\n';
    return kOk;
  }

  ExperimentConfig cfg;
  try {
    if (config_path.empty()) throw ConfigError("missing --config");
    cfg = load_experiment_config(config_path);
    if (!seeds_text.empty()) cfg.seeds = parse_seed_list(seeds_text);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!variant_filter.empty()) {
      std::vector<Variant> kept;
      for (auto& v : cfg.variants) {
        if (std::find(variant_filter.begin(), variant_filter.end(), v.name) !=
            variant_filter.end()) {
          kept.push_back(std::move(v));
        }
      }
      if (kept.size() != variant_filter.size()) {
        throw ConfigError("--variant names a variant that is not in the config");
      }
      cfg.variants = std::move(kept);
    }
  } catch (const UsageError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  if (validate_only) {
    out << "config ok: " << cfg.variants.size() << " variant(s), " << cfg.seeds.size()
        << " seed(s)\n";
    return kOk;
  }

  try {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    for (const auto& variant : cfg.variants) {
      std::vector<RunTrace> traces;
      for (std::uint64_t seed : cfg.seeds) {
        RunConfig run_cfg = variant.run;
        run_cfg.seed = seed;
        RunTrace trace = run(run_cfg);
        const fs::path path = dir / (variant.name + "_seed" + std::to_string(seed) + ".csv");
        write_file(path, [&](std::ostream& f) { write_trace_csv(f, trace, cfg.wallclock); });
        for (const auto& note : trace.notes) {
          err << variant.name << " seed " << seed << ": " << note << '\n';
        }
        out << variant.name << " seed " << seed << ": phv "
            << format_double(trace.records.back().phv) << " -> " << path.string() << '\n';
        traces.push_back(std::move(trace));
      }
      write_file(dir / (variant.name + "_summary.csv"),
                 [&](std::ostream& f) { write_summary_csv(f, traces); });
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace pacmoo
