#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "lunasim/engine.hpp"

using namespace lunasim;

namespace {

const MarketParams kUnit{1.0, 0.0, 1.0, std::vector<double>{0.0, 1.0}};

bool same_rounds(const Trajectory& a, const Trajectory& b) {
  if (a.rounds.size() != b.rounds.size()) return false;
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    const auto& x = a.rounds[i];
    const auto& y = b.rounds[i];
    if (x.t != y.t || x.w != y.w || x.q != y.q || x.xi != y.xi || x.profit != y.profit || x.benchmark != y.benchmark ||
        x.epoch != y.epoch || x.phase != y.phase || x.tag != y.tag)
      return false;
  }
  return a.ledger.cumulative() == b.ledger.cumulative() && a.variation.steps() == b.variation.steps();
}

EpisodeConfig sinusoidal_config(SupplierKind kind, long T, double V) {
  EpisodeConfig cfg;
  cfg.T = T;
  cfg.market = kUnit;
  cfg.supplier.kind = kind;
  cfg.supplier.K = 5;
  cfg.retailer.kind = RetailerKind::Scripted;
  cfg.demand = std::make_shared<DemandModel>(DemandModel::sinusoidal(V, T));
  cfg.seed = 42;
  cfg.replications = 4;
  cfg.threads = 1;
  return cfg;
}

// Remembers everything the engine hands to it.
class RecordingSupplier : public SupplierPolicy {
 public:
  std::string name() const override { return "recorder"; }
  PriceDecision decide(long t, const RandomStream& rng) override {
    times.push_back(t);
    return {0.25 + 0.5 * rng.uniform(static_cast<std::uint64_t>(t)), -1};
  }
  void observe(double w, double q) override { seen.push_back({w, q}); }

  std::vector<long> times;
  std::vector<std::pair<double, double>> seen;
};

class InconsistentRetailer : public RetailerPolicy {
 public:
  std::string name() const override { return "inconsistent"; }
  Perceived respond(long, double) override { return {bernoulli_cdf(0.5), 0.5}; }
};

class UnboundedRetailer : public RetailerPolicy {
 public:
  std::string name() const override { return "unbounded"; }
  Perceived respond(long, double) override { return {ParametricCdf::exponential(1.0), kInf}; }
};

}  // namespace

TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (Philox4x32{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (Philox4x32{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Philox4x32{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, RolesAndCountersAreIndependent) {
  const RandomStream sup(7, 0, StreamRole::Supplier);
  const RandomStream dem(7, 0, StreamRole::Demand);
  const RandomStream other_rep(7, 1, StreamRole::Supplier);
  constexpr int n = 20000;
  double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0, syy = 0.0;
  int equal = 0;
  for (int t = 1; t <= n; ++t) {
    const double x = sup.uniform(t);
    const double y = dem.uniform(t);
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    equal += x == other_rep.uniform(t);
    sx += x;
    sy += y;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  const double corr = (sxy - sx * sy / n) / std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  EXPECT_LT(std::fabs(corr), 0.03);
  EXPECT_NEAR(sx / n, 0.5, 0.01);
  EXPECT_EQ(equal, 0);
  // A stream is a pure function of its counter.
  EXPECT_EQ(sup.uniform(5, 2, 1), RandomStream(7, 0, StreamRole::Supplier).uniform(5, 2, 1));
  EXPECT_NE(sup.uniform(5, 2, 1), sup.uniform(5, 2, 0));
  EXPECT_LT(sup.below(3, 9), 3u);
}

TEST(Demand, SinusoidalProbability) {
  EXPECT_NEAR(sinusoidal_p(3, 10, 1.0), 0.8, 1e-15);
  EXPECT_NEAR(sinusoidal_p(6, 10, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(sinusoidal_p(9, 10, 1.0), 0.2, 1e-15);
  for (long t = 1; t <= 1000; ++t) {
    EXPECT_GE(sinusoidal_p(t, 1000, 3.0), 0.2);
    EXPECT_LE(sinusoidal_p(t, 1000, 3.0), 0.8);
  }
  EXPECT_THROW(sinusoidal_p(0, 10, 1.0), std::invalid_argument);
  EXPECT_THROW(sinusoidal_p(1, 10, 0.0), std::invalid_argument);
}

TEST(Demand, SamplesStayInRange) {
  const RandomStream rng(3, 0, StreamRole::Demand);
  const auto exp = DemandModel::parametric(ParametricCdf::exponential(2.0), 1.0);
  const auto sin = DemandModel::sinusoidal(1.0, 500);
  const auto stat = DemandModel::stationary(StepCdf({0.0, 2.0, 5.0}, {0.2, 0.7, 1.0}));
  for (long t = 1; t <= 500; ++t) {
    const double x = exp.sample(t, rng);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
    const double b = sin.sample(t, rng);
    EXPECT_TRUE(b == 0.0 || b == 1.0);
    const double y = stat.sample(t, rng);
    EXPECT_TRUE(y == 0.0 || y == 2.0 || y == 5.0);
  }
}

TEST(Demand, MonthOfDay) {
  EXPECT_EQ(month_of_day(1), 0);
  EXPECT_EQ(month_of_day(31), 0);
  EXPECT_EQ(month_of_day(32), 1);
  EXPECT_EQ(month_of_day(60), 2);
  EXPECT_EQ(month_of_day(365), 11);
  EXPECT_EQ(month_of_day(366), 0);
}

TEST(Demand, BootstrapDrawsFromTheMonthPool) {
  auto pools = std::make_shared<MonthlyPools>();
  for (int m = 0; m < 12; ++m) pools->months[static_cast<std::size_t>(m)] = {static_cast<double>(m), m + 100.0};
  const auto d = DemandModel::bootstrap(pools);
  const RandomStream rng(1, 0, StreamRole::Demand);
  for (long t = 1; t <= 730; ++t) {
    const double x = d.sample(t, rng);
    const int m = month_of_day(t);
    EXPECT_TRUE(x == m || x == m + 100.0);
  }
  EXPECT_EQ(d.max_demand(), 111.0);
  pools->months[4].clear();
  EXPECT_THROW(DemandModel::bootstrap(pools), std::invalid_argument);
}

TEST(Episode, SingleRoundSmoke) {
  for (auto model : {DemandModel::sinusoidal(1.0, 1), DemandModel::stationary(bernoulli_cdf(0.3))}) {
    StatPolicy sup(1, kUnit);
    SaaRetailer ret(kUnit);
    const auto tr = run_episode(1, kUnit, sup, ret, model, 1, 0);
    ASSERT_EQ(tr.rounds.size(), 1u);
    EXPECT_EQ(tr.rounds[0].w, stat_grid(1, 1.0)[0]);
    EXPECT_TRUE(std::isfinite(tr.ledger.total()));
    EXPECT_GE(tr.ledger.total(), 0.0);
  }
}

TEST(Episode, RejectsEmptyHorizon) {
  StatPolicy sup(1, kUnit);
  SaaRetailer ret(kUnit);
  EXPECT_THROW(run_episode(0, kUnit, sup, ret, DemandModel::sinusoidal(1.0, 1), 1, 0), std::invalid_argument);
}

TEST(Episode, DeterministicPerReplication) {
  auto cfg = sinusoidal_config(SupplierKind::Luna, 2000, 1.0);
  cfg.retailer.kind = RetailerKind::Saa;
  const auto a = run_episode(cfg, 3);
  const auto b = run_episode(cfg, 3);
  EXPECT_TRUE(same_rounds(a, b));
  EXPECT_EQ(a.rounds.size(), 2000u);
  EXPECT_FALSE(same_rounds(a, run_episode(cfg, 4)));
}

TEST(Episode, SupplierSeesOnlyPricesAndOrders) {
  RecordingSupplier sup;
  SaaRetailer ret(kUnit);
  const auto tr = run_episode(300, kUnit, sup, ret, DemandModel::sinusoidal(1.0, 300), 5, 0);
  ASSERT_EQ(sup.seen.size(), 300u);
  for (std::size_t i = 0; i < 300; ++i) {
    EXPECT_EQ(sup.times[i], static_cast<long>(i + 1));
    EXPECT_EQ(sup.seen[i].first, tr.rounds[i].w);
    EXPECT_EQ(sup.seen[i].second, tr.rounds[i].q);
  }
  // Demand reaches the retailer history, never the supplier.
  ASSERT_EQ(ret.history().size(), 300u);
  for (std::size_t i = 0; i < 300; ++i) EXPECT_EQ(ret.history()[i].xi, tr.rounds[i].xi);
}

TEST(Episode, InconsistentRetailerAborts) {
  StatPolicy sup(10, kUnit);
  InconsistentRetailer ret;
  EXPECT_THROW(run_episode(10, kUnit, sup, ret, DemandModel::sinusoidal(1.0, 10), 1, 0), ConsistencyViolation);
}

TEST(Episode, UnboundedOrderAborts) {
  StatPolicy sup(4, kUnit);
  UnboundedRetailer ret;
  EXPECT_THROW(run_episode(4, kUnit, sup, ret, DemandModel::sinusoidal(1.0, 4), 1, 0), std::domain_error);
  // Zero margin earns nothing even against an unbounded order.
  EXPECT_EQ(supplier_profit(0.0, kInf, kUnit), 0.0);
}

TEST(Episode, VariationScalesWithV) {
  const auto v1 = run_episode(sinusoidal_config(SupplierKind::Stat, 5000, 1.0), 0).variation.total();
  const auto v2 = run_episode(sinusoidal_config(SupplierKind::Stat, 5000, 2.0), 0).variation.total();
  EXPECT_GT(v1, 0.0);
  EXPECT_GE(v2, 2.0 * v1);
}

TEST(Replications, SingleRunMeanIsTheTrajectory) {
  auto cfg = sinusoidal_config(SupplierKind::Luna, 500, 1.0);
  cfg.replications = 1;
  const auto agg = run_replications(cfg);
  EXPECT_EQ(agg.mean_cum_regret, run_episode(cfg, 0).ledger.cumulative());
  for (double s : agg.std_cum_regret) EXPECT_EQ(s, 0.0);
}

TEST(Replications, DeterministicPoliciesHaveZeroSpread) {
  const auto agg = run_replications(sinusoidal_config(SupplierKind::Stat, 400, 1.0));
  for (double s : agg.std_cum_regret) EXPECT_EQ(s, 0.0);
  EXPECT_GT(agg.mean_cum_regret.back(), 0.0);
}

TEST(Replications, ParallelMatchesSerial) {
  auto cfg = sinusoidal_config(SupplierKind::Luna, 1000, 1.0);
  cfg.retailer.kind = RetailerKind::Saa;
  cfg.replications = 5;
  const auto serial = run_replications(cfg);
  cfg.threads = 3;
  const auto parallel = run_replications(cfg);
  EXPECT_EQ(serial.mean_cum_regret, parallel.mean_cum_regret);
  EXPECT_EQ(serial.std_cum_regret, parallel.std_cum_regret);
  EXPECT_EQ(serial.mean_variation, parallel.mean_variation);
  EXPECT_EQ(serial.mean_epochs, parallel.mean_epochs);
}

TEST(Replications, RejectsZeroReplications) {
  auto cfg = sinusoidal_config(SupplierKind::Stat, 10, 1.0);
  cfg.replications = 0;
  EXPECT_THROW(run_replications(cfg), std::invalid_argument);
}
