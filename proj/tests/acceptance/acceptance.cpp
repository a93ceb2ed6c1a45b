// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lunasim/analysis.hpp"
#include "lunasim/config.hpp"
#include "lunasim/experiment.hpp"

using namespace lunasim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(const char* id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

void info(const char* id, const std::string& text) {
  std::printf("INFO %s %s\n", id, text.c_str());
  std::fflush(stdout);
}

const MarketParams kBernoulliMarket{1.0, 0.0, 1.0, std::vector<double>{0.0, 1.0}};

// ---------------------------------------------------------------------------
// C1: LUNAC equals LUNA run on the grid-discretized perceived sequence.

// SAA retailer whose perceived CDF is replaced by its grid discretization.
class FictitiousSaa final : public RetailerPolicy {
 public:
  FictitiousSaa(const MarketParams& mp, std::vector<double> grid) : inner_(mp), s_(mp.s), grid_(std::move(grid)) {}
  std::string name() const override { return "fictitious-saa"; }
  Perceived respond(long t, double w) override {
    StepCdf f = fictitious_cdf(inner_.respond(t, w).cdf, grid_);
    const double q = best_response_order(f, w, s_);
    return {std::move(f), q};
  }
  void record(const HistoryEntry& h) override {
    inner_.record(h);
    RetailerPolicy::record(h);
  }

 private:
  SaaRetailer inner_;
  double s_;
  std::vector<double> grid_;
};

Outcome coupling() {
  constexpr long T = 10000;
  constexpr int N = 10;
  constexpr int seeds = 50;
  // Demand on a 1/20 lattice of [0, 1], so most atoms fall between grid points.
  std::vector<double> y, m;
  for (int k = 0; k <= 20; ++k) {
    y.push_back(k / 20.0);
    m.push_back(std::exp(-2.0 * k / 20.0));
  }
  double tot = 0.0;
  for (double v : m) tot += v;
  for (double& v : m) v /= tot;
  const auto demand = DemandModel::stationary(StepCdf::from_masses(y, m));
  const MarketParams mp{1.0, 0.0, 1.0, std::nullopt};
  const auto grid = lunac_grid(N, mp.xi_bar);

  long price_mismatch = 0, order_mismatch = 0, violations = 0, restarts = 0;
  for (int seed = 1; seed <= seeds; ++seed) {
    Lunac lunac(N, mp);
    SaaRetailer saa(mp);
    EpisodeOptions opt;
    opt.contraction_grid = grid;
    const auto a = run_episode(T, mp, lunac, saa, demand, static_cast<std::uint64_t>(seed), 0, opt);

    LunaPolicy luna(Lunac::make_config(grid, N, mp));
    FictitiousSaa fict(mp, grid);
    const auto b = run_episode(T, mp, luna, fict, demand, static_cast<std::uint64_t>(seed), 0);

    for (long t = 0; t < T; ++t) {
      const auto& ra = a.rounds[static_cast<std::size_t>(t)];
      const auto& rb = b.rounds[static_cast<std::size_t>(t)];
      price_mismatch += ra.w != rb.w;
      order_mismatch += lunac_feedback_map(ra.q, grid) != rb.q;
    }
    violations += a.contraction_violations;
    restarts += static_cast<long>(a.restarts.size());
  }
  return {price_mismatch == 0 && order_mismatch == 0 && violations == 0,
          fmt("%d seeds x T=%ld: %ld price mismatches, %ld feedback mismatches, %ld contraction violations "
              "(%ld restarts exercised)",
              seeds, T, price_mismatch, order_mismatch, violations, restarts)};
}

// ---------------------------------------------------------------------------
// C2: SAA variation budget.

// Exact per-step check on one SAA trajectory. For i >= 1 the perceived CDFs
// are the empirical CDFs of the first i and i + 1 demands; with z the new
// demand, L = #{< z} and C = #{<= z} among the first i,
//   d_K = max(L, i - C) / (i (i + 1)),
// so d_K <= 1/(i + 1) iff max(L, i - C) <= i, checked in integers.
struct StepAudit {
  long exact_violations = 0;
  double max_abs_dev = 0.0;  // |measured - exact|
  double max_float_ratio = 0.0;
};

StepAudit audit_saa_steps(const Trajectory& tr) {
  StepAudit a;
  const auto& steps = tr.variation.steps();
  std::vector<double> xs;
  for (const auto& r : tr.rounds) xs.push_back(r.xi);
  std::vector<double> keys = xs;
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::vector<long> fen(keys.size() + 1, 0);
  const auto add = [&](std::size_t k) {
    for (++k; k < fen.size(); k += k & (~k + 1)) ++fen[k];
  };
  const auto prefix = [&](std::size_t k) {  // count of ranks < k
    long c = 0;
    for (; k > 0; k -= k & (~k + 1)) c += fen[k];
    return c;
  };
  const auto rank = [&](double x) {
    return static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), x) - keys.begin());
  };
  if (!steps.empty() && !(steps[0] <= 1.0)) ++a.exact_violations;  // fallback vs one sample
  add(rank(xs[0]));
  for (std::size_t i = 1; i < steps.size(); ++i) {
    const std::size_t k = rank(xs[i]);
    const long below = prefix(k);
    const long at_most = prefix(k + 1);
    const long n = static_cast<long>(i);
    const long num = std::max(below, n - at_most);
    if (num > n) ++a.exact_violations;
    const double exact = static_cast<double>(num) / (static_cast<double>(n) * static_cast<double>(n + 1));
    a.max_abs_dev = std::max(a.max_abs_dev, std::abs(steps[i] - exact));
    a.max_float_ratio = std::max(a.max_float_ratio, steps[i] * static_cast<double>(n + 1));
    add(k);
  }
  return a;
}

Outcome saa_budget() {
  constexpr long T = 10000;
  const double budget = std::log(static_cast<double>(T)) + 1.0;
  struct Model {
    const char* name;
    MarketParams mp;
    std::shared_ptr<const DemandModel> demand;
  };
  const std::vector<Model> models{
      {"bernoulli", kBernoulliMarket, std::make_shared<DemandModel>(DemandModel::stationary(bernoulli_cdf(0.4)))},
      {"sinusoidal", kBernoulliMarket, std::make_shared<DemandModel>(DemandModel::sinusoidal(1.0, T))},
      {"exponential", MarketParams{1.0, 0.0, 8.0, std::nullopt},
       std::make_shared<DemandModel>(DemandModel::parametric(ParametricCdf::exponential(1.0), 8.0))},
  };
  bool ok = true;
  std::string detail;
  for (const auto& md : models) {
    EpisodeConfig cfg;
    cfg.T = T;
    cfg.market = md.mp;
    cfg.supplier.kind = SupplierKind::Stat;
    cfg.retailer.kind = RetailerKind::Saa;
    cfg.demand = md.demand;
    cfg.seed = 2024;
    cfg.replications = 20;
    std::vector<StepAudit> audits(static_cast<std::size_t>(cfg.replications));
    const auto agg = run_replications(cfg, [&](int rep, const Trajectory& tr) {
      audits[static_cast<std::size_t>(rep)] = audit_saa_steps(tr);
    });
    double worst_total = 0.0, worst_dev = 0.0, worst_float = 0.0;
    long violations = 0;
    for (const auto& r : agg.reps) worst_total = std::max(worst_total, r.total_variation);
    for (const auto& a : audits) {
      violations += a.exact_violations;
      worst_dev = std::max(worst_dev, a.max_abs_dev);
      worst_float = std::max(worst_float, a.max_float_ratio);
    }
    ok = ok && worst_total <= budget && violations == 0 && worst_dev <= 1e-12;
    detail += fmt("%s max sum %.4f, %ld exact step violations, measured-vs-exact %.1e; ", md.name, worst_total,
                  violations, worst_dev);
    info("C2", fmt("%s: max t*step in floating point %.17g (exact bound is tight)", md.name, worst_float));
  }
  return {ok, detail + fmt("bound ln T + 1 = %.4f, 20 seeds each", budget)};
}

// ---------------------------------------------------------------------------
// C3-C5: LUNA on the scripted sinusoidal scenario across horizons.

struct HorizonRun {
  long T;
  Aggregate agg;
  MarketParams mp;
};

std::vector<HorizonRun> luna_runs;

void run_luna_horizons() {
  if (!luna_runs.empty()) return;
  for (int i = 0; i < 10; ++i) {
    ExperimentSpec s = find_scenario("luna-discrete")->make();
    s.scenario = "luna-discrete";
    s.T = static_cast<long>(std::lround(std::pow(10.0, 4.0 + i / 9.0)));
    s.replications = 20;
    const auto res = run_experiment(s);
    luna_runs.push_back({s.T, res.policies.at(0).agg, res.inputs.market});
  }
}

Outcome epoch_bound() {
  run_luna_horizons();
  long runs = 0, violations = 0, epochs_max = 0;
  double slack = kInf;
  for (const auto& h : luna_runs)
    for (const auto& r : h.agg.reps) {
      const double bound = epoch_count_bound(r.total_variation, h.mp.support->size(), h.T, h.mp);
      ++runs;
      violations += r.total_epochs > bound;
      epochs_max = std::max<long>(epochs_max, r.total_epochs);
      slack = std::min(slack, bound - r.total_epochs);
    }
  return {violations == 0, fmt("%ld runs (10 horizons x 20 seeds), %ld violations, max epochs %ld, min slack %.3f",
                               runs, violations, epochs_max, slack)};
}

Outcome restart_soundness() {
  run_luna_horizons();
  long restarts = 0, unsound = 0;
  for (const auto& h : luna_runs)
    for (const auto& r : h.agg.reps) {
      restarts += static_cast<long>(r.restarts.size());
      unsound += !restarts_sound(r, h.mp);
    }
  return {unsound == 0 && restarts > 0,
          fmt("%ld restarts over 200 runs, %ld runs with an unsound restart", restarts, unsound)};
}

Outcome luna_slope() {
  run_luna_horizons();
  std::vector<double> x, y;
  std::string pts;
  for (const auto& h : luna_runs) {
    x.push_back(static_cast<double>(h.T));
    y.push_back(h.agg.mean_cum_regret.back());
    pts += fmt("%ld:%.0f ", h.T, h.agg.mean_cum_regret.back());
  }
  const double slope = loglog_slope(x, y);
  info("C5", fmt("within-run slope of the T=%ld mean curve on [T/10, T]: %.4f", luna_runs.back().T,
                 slope_estimate(luna_runs.back().agg.mean_cum_regret)));
  return {slope >= 0.55 && slope <= 0.85,
          fmt("slope of final mean regret across horizons = %.4f (need [0.55, 0.85]); %s", slope, pts.c_str())};
}

// ---------------------------------------------------------------------------
// C6: LUNAF against the bandit baselines.

Outcome lunaf_comparison() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"compare-scripted", "compare-saa"}) {
    ExperimentSpec s = find_scenario(name)->make();
    s.scenario = name;
    s.replications = 20;
    const auto res = run_experiment(s);
    const auto& luna = res.policies.at(0);
    detail += fmt("%s T=%ld: lunaf %.0f", name, s.T, luna.agg.mean_cum_regret.back());
    for (std::size_t k = 1; k < res.policies.size(); ++k) {
      const auto& base = res.policies[k];
      int wins = 0;
      for (std::size_t r = 0; r < luna.agg.reps.size(); ++r)
        wins += luna.agg.reps[r].cum_regret.back() < base.agg.reps[r].cum_regret.back();
      const double frac = static_cast<double>(wins) / static_cast<double>(luna.agg.reps.size());
      ok = ok && luna.agg.mean_cum_regret.back() < base.agg.mean_cum_regret.back() && frac >= 0.8;
      detail += fmt(", %s %.0f (lunaf lower in %d/%zu seeds)", base.name.c_str(), base.agg.mean_cum_regret.back(), wins,
                    luna.agg.reps.size());
    }
    detail += "; ";
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// C7: stationary policy against a fully informed retailer.

Outcome stat_rate() {
  std::vector<double> x, y;
  std::string pts;
  constexpr int R = 20;
  for (long T : {1000L, 10000L, 100000L}) {
    double total = 0.0;
    for (int rep = 0; rep < R; ++rep) {
      const double p0 = 0.2 + 0.6 * RandomStream(7, static_cast<std::uint64_t>(rep), StreamRole::Retailer).uniform(0);
      const auto demand = DemandModel::stationary(bernoulli_cdf(p0));
      StatPolicy sup(T, kBernoulliMarket);
      ScriptedRetailer ret(1.0, [&demand](long t) { return demand.truth(t); }, "full-knowledge");
      total += run_episode(T, kBernoulliMarket, sup, ret, demand, 7, static_cast<std::uint64_t>(rep)).ledger.total();
    }
    x.push_back(static_cast<double>(T));
    y.push_back(total / R);
    pts += fmt("%ld:%.2f ", T, total / R);
  }
  const double slope = loglog_slope(x, y);
  return {slope >= 0.40 && slope <= 0.60, fmt("slope %.4f (need [0.40, 0.60]); mean regret %s", slope, pts.c_str())};
}

// ---------------------------------------------------------------------------
// C8: DRO dual against simplex enumeration.

double phi_ref(Divergence d, double x) {
  switch (d) {
    case Divergence::KL: return x == 0.0 ? 1.0 : x * std::log(x) - x + 1.0;
    case Divergence::ChiSq: return (x - 1.0) * (x - 1.0);
    case Divergence::Hellinger: return (std::sqrt(x) - 1.0) * (std::sqrt(x) - 1.0);
  }
  return 0.0;
}

// Minimum of sum f_i r_i over simplex points with coordinates in {0, 1e-3, ..., 1}
// inside the divergence ball. Per-atom terms are non-negative, so partial sums prune.
double brute_inner(Divergence d, const std::vector<double>& p, const std::vector<double>& r, double eps) {
  constexpr int S = 1000;
  const std::size_t n = p.size();
  std::vector<std::vector<double>> div(n, std::vector<double>(S + 1)), val(n, std::vector<double>(S + 1));
  for (std::size_t a = 0; a < n; ++a)
    for (int k = 0; k <= S; ++k) {
      div[a][static_cast<std::size_t>(k)] = p[a] * phi_ref(d, (k / 1000.0) / p[a]);
      val[a][static_cast<std::size_t>(k)] = (k / 1000.0) * r[a];
    }
  double best = kInf;
  const std::function<void(std::size_t, int, double, double)> rec = [&](std::size_t a, int left, double dv, double v) {
    if (a + 1 == n) {
      const double dd = dv + div[a][static_cast<std::size_t>(left)];
      if (dd <= eps) best = std::min(best, v + val[a][static_cast<std::size_t>(left)]);
      return;
    }
    for (int i = 0; i <= left; ++i) {
      const double dd = dv + div[a][static_cast<std::size_t>(i)];
      if (dd > eps) continue;
      rec(a + 1, left - i, dd, v + val[a][static_cast<std::size_t>(i)]);
    }
  };
  rec(0, S, 0.0, 0.0);
  return best;
}

Outcome dro_oracle() {
  std::mt19937_64 gen(88);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  long saa_mismatch = 0;
  for (int i = 0; i < 100; ++i) {
    const auto d = static_cast<Divergence>(i % 3);
    const std::size_t n = 2 + static_cast<std::size_t>(gen() % 3);
    const int denom = std::vector<int>{10, 20, 25, 40, 50}[gen() % 5];  // p on the 1e-3 lattice
    std::vector<double> p(n);
    int left = denom;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const int c = 1 + static_cast<int>(gen() % static_cast<unsigned>(left - static_cast<int>(n - j - 1)));
      p[j] = static_cast<double>(c) / denom;
      left -= c;
    }
    p[n - 1] = static_cast<double>(left) / denom;
    std::vector<double> r(n);
    for (double& x : r) x = u(gen);
    const double eps = i < 10 ? 0.0 : 0.5 * u(gen);
    const double dual = dro_inner(d, p, r, eps).value;
    worst = std::max(worst, std::fabs(dual - brute_inner(d, p, r, eps)));

    // Zero radius: the worst case is the empirical law and the order is SAA's.
    std::vector<double> atoms(n);
    double y = 0.0;
    for (double& a : atoms) a = (y += 0.1 + u(gen));
    const auto emp = StepCdf::from_masses(atoms, p);
    const MarketParams mp{1.0, 0.0, atoms.back(), atoms};
    const double w = u(gen);
    saa_mismatch += dro_worst_case(emp, d, 0.0, w, mp).order != best_response_order(emp, w, 1.0);
  }
  return {worst <= 2e-3 && saa_mismatch == 0,
          fmt("100 instances, max |dual - enumeration| = %.3g (tol 2e-3), %ld zero-radius order mismatches", worst,
              saa_mismatch)};
}

// ---------------------------------------------------------------------------
// C9: order rule and clairvoyant benchmark against enumeration.

Outcome order_oracle() {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto random_step = [&](int denom) {
    const int n = 1 + static_cast<int>(gen() % 6);
    std::vector<double> y;
    double x = u(gen) < 0.3 ? 0.0 : u(gen);
    for (int i = 0; i < n; ++i) {
      y.push_back(x);
      x += 0.05 + u(gen);
    }
    std::vector<double> cum(static_cast<std::size_t>(n));
    std::vector<int> cuts;
    for (int i = 0; i + 1 < n; ++i) cuts.push_back(static_cast<int>(gen() % static_cast<unsigned>(denom + 1)));
    std::sort(cuts.begin(), cuts.end());
    for (int i = 0; i + 1 < n; ++i) cum[static_cast<std::size_t>(i)] = static_cast<double>(cuts[static_cast<std::size_t>(i)]) / denom;
    cum.back() = 1.0;
    return StepCdf(y, cum);
  };
  const auto scan = [](const StepCdf& f, double level, bool strict) {
    for (std::size_t i = 0; i < f.size(); ++i)
      if (strict ? f.cum()[i] > level : f.cum()[i] >= level) return f.support()[i];
    return -1.0;
  };

  long order_mismatch = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto f = random_step(1 + static_cast<int>(gen() % 1000));
    const double s = 0.5 + 2.0 * u(gen);
    const double w = i % 2 ? s * (1.0 - f.cum()[gen() % f.size()]) : s * u(gen);
    const double level = 1.0 - w / s;
    const double expect = level <= 0.0 ? 0.0 : scan(f, level, false);
    order_mismatch += best_response_order(f, w, s) != expect;
  }

  // Breakpoints s (1 - j/32) lie on the grid s i / 1e5; each grid price is
  // scored with its own order and with the order just below it.
  constexpr int G = 100000;
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto f = random_step(32);
    const double s = 0.5 + 2.0 * u(gen);
    const double c = i % 4 == 0 ? 0.0 : 0.5 * s * u(gen);
    const MarketParams mp{s, c, f.support().back(), std::nullopt};
    double grid = 0.0;
    for (int k = 0; k <= G; ++k) {
      const double w = s * k / G;
      const double level = 1.0 - static_cast<double>(k) / G;
      const double q = level <= 0.0 ? 0.0 : scan(f, level, false);
      grid = std::max(grid, (w - c) * q);
      if (k > 0) {
        const double q_left = scan(f, level, true);
        if (q_left >= 0.0) grid = std::max(grid, (w - c) * q_left);
      }
    }
    worst = std::max(worst, std::fabs(clairvoyant_profit(f, mp).profit - grid));
  }
  return {order_mismatch == 0 && worst <= 1e-6,
          fmt("1000 order checks: %ld mismatches; 500 benchmark checks: max |closed form - grid| = %.3g (tol 1e-6)",
              order_mismatch, worst)};
}

// ---------------------------------------------------------------------------
// C10: closed-form spot values.

Outcome spot_values() {
  // High-precision references for the worked instances.
  const double opstats = opstats_order({1.0, 3.0}, 1.0, 2.0, 3).order;
  const double bayes = bayes_order_from_sum(4.0, 2, 1.0, 2.0, 1.0, 1.0).order;
  const double gamma = bob_gamma(3, 100);
  const auto b = bob_setup(10000, 1.0);
  const bool ok = std::fabs(opstats - 1.0396841995794927) <= 1e-5 && std::fabs(bayes - 1.2996052494743658) <= 1e-5 &&
                  std::fabs(gamma - 0.17964309360908598) <= 1e-5 && b.H == 10 && b.z == 3 &&
                  b.sizes == std::vector<long>{1, 2, 4, 10};
  std::string sizes;
  for (long j : b.sizes) sizes += fmt("%s%ld", sizes.empty() ? "" : ",", j);
  info("C10", fmt("T=10000 gives ceil(T/H)=%ld blocks and gamma=%.5f; the 0.17965 value holds at 100 blocks", b.blocks,
                  b.gamma));
  return {ok, fmt("opstats %.8f, bayes %.8f, gamma(z=3, 100 blocks) %.8f, T=10000: H=%ld z=%d J={%s}", opstats, bayes,
                  gamma, b.H, b.z, sizes.c_str())};
}

}  // namespace

int main() {
  criterion("C1", "LUNAC/LUNA coupling", coupling);
  criterion("C2", "SAA variation budget", saa_budget);
  criterion("C3", "epoch-count bound", epoch_bound);
  criterion("C4", "restart soundness", restart_soundness);
  criterion("C5", "LUNA regret slope", luna_slope);
  criterion("C6", "LUNAF vs bandit baselines", lunaf_comparison);
  criterion("C7", "stationary policy rate", stat_rate);
  criterion("C8", "DRO dual oracle", dro_oracle);
  criterion("C9", "order rule and benchmark oracle", order_oracle);
  criterion("C10", "closed-form spot values", spot_values);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
