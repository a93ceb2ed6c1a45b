#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lunasim/demand.hpp"
#include "lunasim/dro.hpp"
#include "lunasim/market.hpp"
#include "lunasim/regret.hpp"
#include "lunasim/retailer.hpp"
#include "lunasim/rng.hpp"
#include "lunasim/supplier.hpp"

namespace lunasim {

struct RoundRecord {
  long t = 0;
  double w = 0.0;
  double q = 0.0;
  double xi = 0.0;
  double profit = 0.0;
  double benchmark = 0.0;
  int epoch = 1;
  Phase phase = Phase::Fixed;
  int tag = -1;
};

class ConsistencyViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Trajectory {
  std::vector<RoundRecord> rounds;
  RegretLedger ledger;
  VariationTrace variation;
  std::vector<RestartEvent> restarts;
  int epochs = 1;
  long contraction_violations = 0;  // discretized steps exceeding the raw step (LUNAC runs)
};

struct EpisodeOptions {
  /// Regret against the best price of this finite set instead of all of [0, s].
  std::optional<std::vector<double>> benchmark_prices;
  /// Check d_K of the grid-discretized perceived CDFs against the raw ones.
  std::optional<std::vector<double>> contraction_grid;
  /// Upper end of the interval on which parametric Kolmogorov distances are taken.
  double variation_upto = 0.0;
};

/// One run of the repeated game. Supplier randomness and demand come from
/// independent streams keyed by (seed, rep).
inline Trajectory run_episode(long T, const MarketParams& mp, SupplierPolicy& supplier, RetailerPolicy& retailer,
                              const DemandModel& demand, std::uint64_t seed, std::uint64_t rep,
                              const EpisodeOptions& opt = {}) {
  if (T < 1) throw std::invalid_argument("run_episode: T must be at least 1");
  const RandomStream srng(seed, rep, StreamRole::Supplier);
  const RandomStream drng(seed, rep, StreamRole::Demand);
  const double upto = opt.variation_upto > 0.0 ? opt.variation_upto : mp.xi_bar;

  Trajectory tr;
  tr.rounds.reserve(static_cast<std::size_t>(T));
  std::optional<Cdf> prev;
  std::optional<StepCdf> prev_fict;
  int prev_epoch = 1;
  for (long t = 1; t <= T; ++t) {
    const PriceDecision dec = supplier.decide(t, srng);
    if (!(dec.w >= 0.0 && dec.w <= mp.s)) throw std::logic_error(supplier.name() + ": price outside [0, s]");
    const int epoch = supplier.epoch();
    const Phase phase = supplier.phase();

    Perceived per = retailer.respond(t, dec.w);
    if (!std::isfinite(per.order)) throw std::domain_error(retailer.name() + ": unbounded order; set a retailer cap");
    if (per.order != best_response_order(per.cdf, dec.w, mp.s))
      throw ConsistencyViolation(retailer.name() + ": order is not the best response to its perceived distribution");

    const double xi = demand.sample(t, drng);
    const double profit = supplier_profit(dec.w, per.order, mp);
    const double bench = opt.benchmark_prices ? finite_clairvoyant_profit(per.cdf, *opt.benchmark_prices, mp).profit
                                              : clairvoyant_profit(per.cdf, mp).profit;
    tr.ledger.update(bench, profit);

    if (prev) {
      const double step = kolmogorov_distance(*prev, per.cdf, upto);
      tr.variation.update(step, prev_epoch, epoch);
      if (opt.contraction_grid) {
        StepCdf fict = fictitious_cdf(per.cdf, *opt.contraction_grid);
        const bool bounded = cdf_eval(*prev, mp.xi_bar) == 1.0 && cdf_eval(per.cdf, mp.xi_bar) == 1.0;
        if (bounded && kolmogorov_distance(*prev_fict, fict) > step) ++tr.contraction_violations;
        prev_fict = std::move(fict);
      }
    } else if (opt.contraction_grid) {
      prev_fict = fictitious_cdf(per.cdf, *opt.contraction_grid);
    }

    tr.rounds.push_back({t, dec.w, per.order, xi, profit, bench, epoch, phase, dec.tag});
    supplier.observe(dec.w, per.order);
    retailer.record({dec.w, per.order, xi});
    prev = std::move(per.cdf);
    prev_epoch = epoch;
  }
  tr.restarts = supplier.restarts();
  tr.epochs = tr.rounds.back().epoch;
  return tr;
}

// ---------------------------------------------------------------------------
// Configuration-driven runs.

enum class SupplierKind { Stat, Luna, Lunac, LunacN, Lunaf, Exp3S, RestartBandit };
enum class RetailerKind { Saa, Dro, Mle, OpStats, Bayes, Scripted };

inline std::string to_string(SupplierKind k) {
  switch (k) {
    case SupplierKind::Stat: return "stat";
    case SupplierKind::Luna: return "luna";
    case SupplierKind::Lunac: return "lunac";
    case SupplierKind::LunacN: return "lunacn";
    case SupplierKind::Lunaf: return "lunaf";
    case SupplierKind::Exp3S: return "exp3s";
    case SupplierKind::RestartBandit: return "restart-bandit";
  }
  return "?";
}

inline std::string to_string(RetailerKind k) {
  switch (k) {
    case RetailerKind::Saa: return "saa";
    case RetailerKind::Dro: return "dro";
    case RetailerKind::Mle: return "mle";
    case RetailerKind::OpStats: return "opstats";
    case RetailerKind::Bayes: return "bayes";
    case RetailerKind::Scripted: return "scripted";
  }
  return "?";
}

inline bool uses_finite_prices(SupplierKind k) {
  return k == SupplierKind::Lunaf || k == SupplierKind::Exp3S || k == SupplierKind::RestartBandit;
}

/// Fully resolved supplier parameters.
struct SupplierSpec {
  SupplierKind kind = SupplierKind::Luna;
  int K = 1;                   // LUNA exploration grid
  int N = 2;                   // LUNAC grid size
  std::vector<double> prices;  // finite price set for LUNAF and the bandits
  double budget = 1.0;         // B_T for Exp3.S
};

struct RetailerSpec {
  RetailerKind kind = RetailerKind::Saa;
  Divergence divergence = Divergence::KL;
  double alpha = 0.05;
  Family family = Family::Poisson;
  double sigma = 1.0;
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
  std::optional<double> cap;

  friend bool operator==(const RetailerSpec&, const RetailerSpec&) = default;
};

struct EpisodeConfig {
  long T = 1000;
  MarketParams market;
  SupplierSpec supplier;
  RetailerSpec retailer;
  std::shared_ptr<const DemandModel> demand;
  std::uint64_t seed = 1;
  int replications = 20;
  int threads = 0;  // 0: hardware concurrency
};

inline std::unique_ptr<SupplierPolicy> make_supplier(const SupplierSpec& spec, long T, const MarketParams& mp) {
  switch (spec.kind) {
    case SupplierKind::Stat: return std::make_unique<StatPolicy>(T, mp);
    case SupplierKind::Luna:
    case SupplierKind::Lunaf: {
      if (!mp.support) throw std::invalid_argument(to_string(spec.kind) + ": market support Y_M is required");
      LunaConfig cfg;
      cfg.K = spec.K;
      cfg.support = *mp.support;
      cfg.market = mp;
      if (spec.kind == SupplierKind::Lunaf) cfg.prices = spec.prices;
      return std::make_unique<LunaPolicy>(std::move(cfg));
    }
    case SupplierKind::Lunac: return std::make_unique<Lunac>(spec.N, mp);
    case SupplierKind::LunacN: return std::make_unique<LunacN>(T, mp);
    case SupplierKind::Exp3S: return std::make_unique<Exp3S>(spec.prices, T, spec.budget, mp);
    case SupplierKind::RestartBandit: return std::make_unique<RestartBandit>(spec.prices, mp);
  }
  throw std::invalid_argument("unknown supplier policy");
}

inline std::unique_ptr<RetailerPolicy> make_retailer(const RetailerSpec& spec, const MarketParams& mp,
                                                     std::shared_ptr<const DemandModel> demand) {
  switch (spec.kind) {
    case RetailerKind::Saa: return std::make_unique<SaaRetailer>(mp);
    case RetailerKind::Dro: return std::make_unique<DroRetailer>(mp, spec.divergence, spec.alpha, spec.cap);
    case RetailerKind::Mle: return std::make_unique<MleRetailer>(mp, spec.family, spec.cap, spec.sigma);
    case RetailerKind::OpStats: return std::make_unique<OpStatsRetailer>(mp, spec.cap);
    case RetailerKind::Bayes: return std::make_unique<BayesRetailer>(mp, spec.cap, spec.prior_alpha, spec.prior_beta);
    case RetailerKind::Scripted:
      return std::make_unique<ScriptedRetailer>(mp.s, [demand](long t) { return demand->truth(t); });
  }
  throw std::invalid_argument("unknown retailer policy");
}

inline EpisodeOptions episode_options(const EpisodeConfig& cfg) {
  EpisodeOptions opt;
  if (uses_finite_prices(cfg.supplier.kind)) opt.benchmark_prices = cfg.supplier.prices;
  if (cfg.supplier.kind == SupplierKind::Lunac) opt.contraction_grid = lunac_grid(cfg.supplier.N, cfg.market.xi_bar);
  opt.variation_upto = std::max(cfg.market.xi_bar, cfg.retailer.cap.value_or(0.0));
  return opt;
}

inline Trajectory run_episode(const EpisodeConfig& cfg, std::uint64_t rep) {
  if (!cfg.demand) throw std::invalid_argument("run_episode: no demand model");
  auto supplier = make_supplier(cfg.supplier, cfg.T, cfg.market);
  auto retailer = make_retailer(cfg.retailer, cfg.market, cfg.demand);
  return run_episode(cfg.T, cfg.market, *supplier, *retailer, *cfg.demand, cfg.seed, rep, episode_options(cfg));
}

/// Per-replication outcome kept after a trajectory is reduced.
struct ReplicationResult {
  std::vector<double> cum_regret;
  std::vector<double> variation;  // running total, 0 at t = 1
  std::vector<int> epochs;
  std::vector<RestartEvent> restarts;
  std::vector<double> epoch_variation;  // indexed by epoch - 1
  double total_variation = 0.0;
  int total_epochs = 1;
  long contraction_violations = 0;
  double max_saa_step_ratio = 0.0;  // max over t of step_t * t (<= 1 for SAA)
};

inline ReplicationResult reduce(const Trajectory& tr) {
  ReplicationResult r;
  r.cum_regret = tr.ledger.cumulative();
  r.variation.assign(tr.rounds.size(), 0.0);
  for (std::size_t i = 0; i < tr.variation.running().size(); ++i) r.variation[i + 1] = tr.variation.running()[i];
  r.epochs.reserve(tr.rounds.size());
  for (const auto& rr : tr.rounds) r.epochs.push_back(rr.epoch);
  r.restarts = tr.restarts;
  r.epoch_variation.assign(static_cast<std::size_t>(tr.epochs), 0.0);
  for (const auto& [e, v] : tr.variation.epoch_sums()) r.epoch_variation[static_cast<std::size_t>(e - 1)] = v;
  r.total_variation = tr.variation.total();
  r.total_epochs = tr.epochs;
  r.contraction_violations = tr.contraction_violations;
  // steps()[i] is d_K(F_{i+1}, F_{i+2}) and the SAA bound for it is 1/(i+1).
  for (std::size_t i = 0; i < tr.variation.steps().size(); ++i)
    r.max_saa_step_ratio = std::max(r.max_saa_step_ratio, tr.variation.steps()[i] * static_cast<double>(i + 1));
  return r;
}

struct Aggregate {
  std::vector<double> mean_cum_regret;
  std::vector<double> std_cum_regret;
  std::vector<double> mean_variation;
  std::vector<double> mean_epochs;
  std::vector<ReplicationResult> reps;
};

/// Runs replications 0..R-1 on up to `threads` workers; the reduction runs in
/// replication order so the result does not depend on scheduling.
inline Aggregate run_replications(const EpisodeConfig& cfg, const std::function<void(int, const Trajectory&)>& on_run = {}) {
  if (cfg.replications < 1) throw std::invalid_argument("run_replications: need at least one replication");
  const int R = cfg.replications;
  std::vector<ReplicationResult> results(static_cast<std::size_t>(R));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(R));
  const auto work = [&](int rep) {
    try {
      Trajectory tr = run_episode(cfg, static_cast<std::uint64_t>(rep));
      if (on_run) on_run(rep, tr);
      results[static_cast<std::size_t>(rep)] = reduce(tr);
    } catch (...) {
      errors[static_cast<std::size_t>(rep)] = std::current_exception();
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, R);
  if (threads == 1) {
    for (int rep = 0; rep < R; ++rep) work(rep);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (int rep = w; rep < R; rep += threads) work(rep);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Aggregate agg;
  const auto T = static_cast<std::size_t>(cfg.T);
  agg.mean_cum_regret.assign(T, 0.0);
  agg.std_cum_regret.assign(T, 0.0);
  agg.mean_variation.assign(T, 0.0);
  agg.mean_epochs.assign(T, 0.0);
  const double n = static_cast<double>(R);
  for (std::size_t t = 0; t < T; ++t) {
    double sum = 0.0;
    double var = 0.0;
    double epochs = 0.0;
    for (const auto& r : results) {
      sum += r.cum_regret[t];
      var += r.variation[t];
      epochs += r.epochs[t];
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : results) ss += (r.cum_regret[t] - mean) * (r.cum_regret[t] - mean);
    agg.mean_cum_regret[t] = mean;
    agg.std_cum_regret[t] = R > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    agg.mean_variation[t] = var / n;
    agg.mean_epochs[t] = epochs / n;
  }
  agg.reps = std::move(results);
  return agg;
}

/// Every restart at t finished an epoch whose measured variation is at least
/// Delta_t / (s xi_bar), up to `slack`.
inline bool restarts_sound(const ReplicationResult& r, const MarketParams& mp, double slack = 1e-12) {
  for (std::size_t i = 0; i < r.restarts.size(); ++i) {
    const auto& ev = r.restarts[i];
    const int epoch = r.epochs[static_cast<std::size_t>(ev.t - 1)];
    const double needed = ev.delta / (mp.s * mp.xi_bar);
    if (r.epoch_variation[static_cast<std::size_t>(epoch - 1)] < needed - slack) return false;
  }
  return true;
}

}  // namespace lunasim
