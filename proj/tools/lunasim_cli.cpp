// lunasim: run supplier pricing experiments from configuration files.
//
//   lunasim run <config>        run every configured policy and write outputs
//   lunasim validate <config>   parse and echo the resolved configuration
//   lunasim list-scenarios      show the scenario presets
//   lunasim ingest <csv>        summarize a weekly sales file as monthly pools
//
// Exit codes: 0 ok, 1 configuration error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "lunasim/experiment.hpp"

namespace fs = std::filesystem;
using namespace lunasim;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

fs::path output_dir_for(const ExperimentSpec& spec) {
  const fs::path dir(spec.output_dir);
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv("LUNASIM_OUTPUT_ROOT"); root && *root) return fs::path(root) / dir;
  return dir;
}

int cmd_run(const std::string& path, bool quiet) {
  ExperimentSpec spec;
  std::string text;
  try {
    text = read_file(path);
    spec = parse_config_string(text);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s: %s\n", path.c_str(), e.what());
    return kConfigError;
  } catch (const OutputError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  }
  try {
    const auto res = run_experiment(spec, fs::path(path).parent_path());
    const fs::path dir = output_dir_for(spec);
    const auto written = write_outputs(res, dir, text);
    if (!quiet) {
      for (const auto& p : res.policies) {
        std::printf("%-16s final mean regret %.6g  slope[%g T, %g T] %.4f\n", p.name.c_str(), p.agg.mean_cum_regret.back(),
                    spec.window_lo, spec.window_hi, p.slope);
      }
      for (const auto& p : written) std::printf("wrote %s\n", p.string().c_str());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kOk;
}

int cmd_validate(const std::string& path) {
  try {
    const auto spec = parse_config_file(path);
    const auto in = resolve_inputs(spec, fs::path(path).parent_path());
    build_runs(spec, in);
    std::fputs(emit_config(spec).c_str(), stdout);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s: %s\n", path.c_str(), e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kOk;
}

int cmd_list() {
  for (const auto& s : scenario_catalog()) std::printf("%-18s %s\n", s.name.c_str(), s.description.c_str());
  return kOk;
}

int cmd_ingest(const std::string& path) {
  try {
    const auto ds = ingest_weekly_sales_file(path);
    std::printf("rows %ld, skipped %ld\n", ds.rows, ds.skipped);
    if (ds.skipped > 0) std::fprintf(stderr, "warning: skipped %ld malformed rows\n", ds.skipped);
    std::printf("month,samples,min,max,mean\n");
    int empty = 0;
    for (int m = 0; m < 12; ++m) {
      const auto& pool = ds.pools.months[static_cast<std::size_t>(m)];
      if (pool.empty()) {
        std::printf("%d,0,,,\n", m + 1);
        ++empty;
        continue;
      }
      double lo = pool.front(), hi = pool.front(), sum = 0.0;
      for (double x : pool) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        sum += x;
      }
      std::printf("%d,%zu,%s,%s,%s\n", m + 1, pool.size(), format_double(lo).c_str(), format_double(hi).c_str(),
                  format_double(sum / static_cast<double>(pool.size())).c_str());
    }
    if (empty > 0) {
      std::fprintf(stderr, "error: %d month(s) have no samples; bootstrap demand needs all twelve\n", empty);
      return kRuntimeError;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supplier pricing against learning retailers"};
  app.require_subcommand(1);

  std::string config;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("config", config, "configuration file")->required();
  run->add_flag("-q,--quiet", quiet, "suppress the summary");

  auto* validate_cmd = app.add_subcommand("validate", "check a configuration and print it with defaults");
  validate_cmd->add_option("config", config, "configuration file")->required();

  app.add_subcommand("list-scenarios", "list scenario presets");

  std::string csv;
  auto* ingest = app.add_subcommand("ingest", "summarize a weekly sales CSV (date,units)");
  ingest->add_option("csv", csv, "input file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  if (*run) return cmd_run(config, quiet);
  if (*validate_cmd) return cmd_validate(config);
  if (*ingest) return cmd_ingest(csv);
  return cmd_list();
}
