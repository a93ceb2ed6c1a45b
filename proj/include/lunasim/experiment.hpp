#pragma once

// Turns an ExperimentSpec into engine runs and writes their outputs.

#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lunasim/analysis.hpp"
#include "lunasim/config.hpp"
#include "lunasim/dataset.hpp"
#include "lunasim/engine.hpp"
#include "lunasim/output.hpp"

namespace lunasim {

/// Exploration grid size for LUNA: opt-K = ceil(T^{1/3} V^{-1/3} xi^{-1/3}),
/// obl-K = ceil(T^{1/3} xi^{-1/3}), or the configured integer.
inline int luna_grid_size(const ExperimentSpec& s, double xi_bar) {
  switch (s.k_rule) {
    case KRule::Fixed: return s.K;
    case KRule::Opt: return std::max(1, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(s.T) / (s.V * xi_bar)) - 1e-9)));
    case KRule::Obl: return std::max(1, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(s.T) / xi_bar) - 1e-9)));
  }
  return 1;
}

/// sum_t d_K(F_t, F_{t+1}) of a demand model's law sequence.
inline double law_variation(const DemandModel& d, long T, double upto) {
  double total = 0.0;
  Cdf prev = d.truth(1);
  for (long t = 2; t <= T; ++t) {
    Cdf cur = d.truth(t);
    total += kolmogorov_distance(prev, cur, upto);
    prev = std::move(cur);
  }
  return total;
}

struct ResolvedInputs {
  std::shared_ptr<const DemandModel> demand;
  MarketParams market;
  std::vector<std::pair<std::string, std::string>> hashes;  // input name, git blob sha1
};

inline std::filesystem::path resolve_input(const std::string& path, const std::filesystem::path& config_dir) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  if (!config_dir.empty() && std::filesystem::exists(config_dir / p)) return config_dir / p;
  return p;
}

/// Builds the demand model and fills in market settings the demand implies.
inline ResolvedInputs resolve_inputs(const ExperimentSpec& s, const std::filesystem::path& config_dir = {}) {
  ResolvedInputs out;
  out.market = s.market;
  switch (s.demand.model) {
    case DemandKind::Sinusoidal:
      out.demand = std::make_shared<DemandModel>(DemandModel::sinusoidal(s.demand.V, s.T));
      if (!out.market.support) {
        out.market.support = std::vector<double>{0.0, 1.0};
        out.market.xi_bar = 1.0;
      }
      break;
    case DemandKind::Stationary:
      out.demand = std::make_shared<DemandModel>(
          DemandModel::stationary(StepCdf::from_masses(s.demand.support, s.demand.probs)));
      if (!out.market.support) {
        out.market.support = s.demand.support;
        out.market.xi_bar = s.demand.support.back();
      }
      break;
    case DemandKind::Parametric: {
      ParametricCdf law = ParametricCdf::exponential(1.0);
      switch (s.demand.family) {
        case Family::Exponential: law = ParametricCdf::exponential(s.demand.lambda); break;
        case Family::Poisson: law = ParametricCdf::poisson(s.demand.lambda); break;
        case Family::Normal: law = ParametricCdf::normal(s.demand.mu, s.demand.sigma); break;
        case Family::Categorical: throw ConfigError("demand.family: categorical is not a parametric demand law");
      }
      double upper = s.demand.upper.value_or(kInf);
      if (!s.demand.upper && s.demand.family == Family::Normal) upper = 4.0 * s.retailer.cap.value_or(s.market.xi_bar);
      out.demand = std::make_shared<DemandModel>(DemandModel::parametric(law, upper));
      if (!out.market.support && std::isfinite(upper)) out.market.xi_bar = upper;
      break;
    }
    case DemandKind::Bootstrap: {
      const auto path = resolve_input(s.demand.dataset, config_dir);
      const std::string text = read_file(path);
      std::istringstream in(text);
      auto ds = ingest_weekly_sales(in);
      out.hashes.emplace_back(s.demand.dataset, git_blob_sha1(text));
      auto pools = std::make_shared<MonthlyPools>(std::move(ds.pools));
      out.demand = std::make_shared<DemandModel>(DemandModel::bootstrap(pools));
      if (!out.market.support) {
        const double top = out.demand->max_demand();
        if (!(top > 0.0)) throw ConfigError("demand.dataset: every daily sample rounds to zero");
        std::vector<double> y;
        for (double k = 0.0; k <= top; k += 1.0) y.push_back(k);
        out.market.support = std::move(y);
        out.market.xi_bar = top;
      }
      break;
    }
  }
  try {
    out.market.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("market: ") + e.what());
  }
  return out;
}

struct PolicyRun {
  std::string name;
  EpisodeConfig cfg;
};

inline std::vector<PolicyRun> build_runs(const ExperimentSpec& s, const ResolvedInputs& in) {
  std::vector<PolicyRun> runs;
  std::optional<double> budget = s.budget;
  for (SupplierKind kind : s.policies) {
    EpisodeConfig cfg;
    cfg.T = s.T;
    cfg.market = in.market;
    cfg.retailer = s.retailer;
    // Parametric fits default to the cap xi_bar.
    const auto rk = s.retailer.kind;
    if (!cfg.retailer.cap && (rk == RetailerKind::Mle || rk == RetailerKind::OpStats || rk == RetailerKind::Bayes))
      cfg.retailer.cap = in.market.xi_bar;
    cfg.demand = in.demand;
    cfg.seed = s.seed;
    cfg.replications = s.replications;
    cfg.threads = s.threads;
    cfg.supplier.kind = kind;
    cfg.supplier.N = s.N;
    if ((kind == SupplierKind::Luna || kind == SupplierKind::Lunaf) && !in.market.support)
      throw ConfigError("supplier.policy: " + to_string(kind) + " needs market.support");
    cfg.supplier.K = luna_grid_size(s, in.market.xi_bar);
    if (uses_finite_prices(kind)) cfg.supplier.prices = finite_price_set(s.T, in.market.s);
    if (kind == SupplierKind::Exp3S) {
      if (!budget) {
        // Scripted retailers perceive the demand law itself, whose variation is known.
        budget = s.retailer.kind == RetailerKind::Scripted
                     ? law_variation(*in.demand, s.T, std::max(in.market.xi_bar, s.retailer.cap.value_or(0.0)))
                     : std::log(static_cast<double>(s.T)) + 1.0;
      }
      cfg.supplier.budget = *budget;
    }
    runs.push_back({to_string(kind), std::move(cfg)});
  }
  return runs;
}

struct PolicyResult {
  std::string name;
  Aggregate agg;
  Trajectory first;  // replication 0
  double slope = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentResult {
  ExperimentSpec spec;
  ResolvedInputs inputs;
  std::vector<PolicyResult> policies;
};

inline ExperimentResult run_experiment(const ExperimentSpec& s, const std::filesystem::path& config_dir = {}) {
  ExperimentResult res;
  res.spec = s;
  res.inputs = resolve_inputs(s, config_dir);
  for (auto& run : build_runs(s, res.inputs)) {
    PolicyResult pr;
    pr.name = run.name;
    pr.agg = run_replications(run.cfg, [&pr](int rep, const Trajectory& tr) {
      if (rep == 0) pr.first = tr;
    });
    const auto T = static_cast<double>(s.T);
    try {
      pr.slope = slope_estimate(pr.agg.mean_cum_regret, std::max(1L, static_cast<long>(std::floor(s.window_lo * T))),
                                static_cast<long>(std::floor(s.window_hi * T)));
    } catch (const std::invalid_argument&) {
      // Too few positive points for a fit; the slope stays NaN.
    }
    res.policies.push_back(std::move(pr));
  }
  return res;
}

/// Writes summary.csv, detail_<policy>.csv, regret.svg and metadata.txt into
/// `dir`; returns the paths written.
inline std::vector<std::filesystem::path> write_outputs(const ExperimentResult& res, const std::filesystem::path& dir,
                                                        const std::string& config_text = {}) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create output directory " + dir.string());
  std::vector<std::filesystem::path> written;
  std::vector<NamedAggregate> named;
  for (const auto& p : res.policies) named.push_back({p.name, &p.agg});

  if (res.spec.csv) {
    write_atomic(dir / "summary.csv", summary_csv(named));
    written.push_back(dir / "summary.csv");
    for (const auto& p : res.policies) {
      const auto path = dir / ("detail_" + p.name + ".csv");
      write_atomic(path, detail_csv(p.first));
      written.push_back(path);
    }
  }
  if (res.spec.svg) {
    write_atomic(dir / "regret.svg", regret_svg(named, res.spec.scenario + ": mean cumulative regret"));
    written.push_back(dir / "regret.svg");
  }

  std::string meta = "# lunasim run metadata; the settings below parse back to the same experiment\n";
  meta += "# replications: " + std::to_string(res.spec.replications) + " (indices 0.." +
          std::to_string(res.spec.replications - 1) + ") under master seed " + std::to_string(res.spec.seed) + "\n";
  if (!config_text.empty()) meta += "# input config git-blob-sha1: " + git_blob_sha1(config_text) + "\n";
  for (const auto& [name, hash] : res.inputs.hashes) meta += "# input " + name + " git-blob-sha1: " + hash + "\n";
  for (const auto& p : res.policies) meta += "# slope " + p.name + ": " + format_double(p.slope) + "\n";
  meta += emit_config(res.spec);
  write_atomic(dir / "metadata.txt", meta);
  written.push_back(dir / "metadata.txt");
  return written;
}

}  // namespace lunasim
