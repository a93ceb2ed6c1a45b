#pragma once

// Supplier pricing policies. Every policy sees only its own prices and the
// resulting order quantities.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lunasim/market.hpp"
#include "lunasim/rng.hpp"

namespace lunasim {

enum class Phase { Exploration, Exploitation, Fixed };

inline std::string to_string(Phase p) {
  switch (p) {
    case Phase::Exploration: return "explore";
    case Phase::Exploitation: return "exploit";
    case Phase::Fixed: return "fixed";
  }
  return "?";
}

struct PriceDecision {
  double w = 0.0;
  int tag = -1;  // probe index m_t for the LUNA family, arm index for bandits, -1 while exploring
};

struct RestartEvent {
  long t = 0;        // last period of the finished epoch
  long tau = 0;      // last period before the finished epoch
  double delta = 0;  // Delta_t at the restart
  int probe = 0;     // m_t that triggered it
};

class SupplierPolicy {
 public:
  virtual ~SupplierPolicy() = default;
  virtual std::string name() const = 0;
  virtual PriceDecision decide(long t, const RandomStream& rng) = 0;
  virtual void observe(double w, double q) = 0;
  /// Epoch of the most recent decision (1-based).
  virtual int epoch() const { return 1; }
  virtual Phase phase() const { return Phase::Fixed; }
  virtual std::vector<RestartEvent> restarts() const { return {}; }
};

// Integer roots evaluated exactly for the small magnitudes used in tuning.
inline double int_pow(double base, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

/// Largest n >= 0 with n^k <= x.
inline long floor_root(double x, int k) {
  auto n = static_cast<long>(std::floor(std::pow(std::max(x, 0.0), 1.0 / k)));
  while (n > 0 && int_pow(static_cast<double>(n), k) > x) --n;
  while (int_pow(static_cast<double>(n + 1), k) <= x) ++n;
  return n;
}

/// Smallest n >= 0 with n^k >= x.
inline long ceil_root(double x, int k) {
  auto n = static_cast<long>(std::ceil(std::pow(std::max(x, 0.0), 1.0 / k)));
  while (n > 0 && int_pow(static_cast<double>(n - 1), k) >= x) --n;
  while (int_pow(static_cast<double>(n), k) < x) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Stationary policy: try ceil(sqrt T) evenly spaced prices once, then lock in.

inline std::vector<double> stat_grid(long T, double s) {
  const long n = ceil_root(static_cast<double>(T), 2);
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (long k = 1; k <= n; ++k) grid[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * s / static_cast<double>(n);
  return grid;
}

class StatPolicy : public SupplierPolicy {
 public:
  StatPolicy(long T, MarketParams mp) : mp_(std::move(mp)), grid_(stat_grid(T, mp_.s)) {}
  std::string name() const override { return "stat"; }

  PriceDecision decide(long t, const RandomStream&) override {
    if (static_cast<std::size_t>(t) <= grid_.size()) {
      phase_ = Phase::Exploration;
      return {grid_[static_cast<std::size_t>(t - 1)], -1};
    }
    phase_ = Phase::Exploitation;
    return {grid_[best_], static_cast<int>(best_)};
  }

  void observe(double w, double q) override {
    if (profits_.size() < grid_.size()) {
      profits_.push_back(supplier_profit(w, q, mp_));
      if (profits_.size() == grid_.size())
        best_ = static_cast<std::size_t>(std::max_element(profits_.begin(), profits_.end()) - profits_.begin());
    }
  }

  Phase phase() const override { return phase_; }
  const std::vector<double>& grid() const { return grid_; }

 private:
  MarketParams mp_;
  std::vector<double> grid_;
  std::vector<double> profits_;
  std::size_t best_ = 0;
  Phase phase_ = Phase::Exploration;
};

// ---------------------------------------------------------------------------
// LUNA and its finite-price variant LUNAF.

/// k-th exploratory price (k - 1)(s - c)/K + c.
inline double luna_exploration_price(int k, int K, const MarketParams& mp) {
  if (K < 1 || k < 1 || k > K) throw std::invalid_argument("luna_exploration_price: need 1 <= k <= K");
  return static_cast<double>(k - 1) * (mp.s - mp.c) / static_cast<double>(K) + mp.c;
}

inline double luna_delta(long t, long tau, std::size_t M) {
  if (t <= tau) throw std::invalid_argument("luna_delta: need t > tau");
  return std::sqrt(static_cast<double>(M) / static_cast<double>(t - tau));
}

struct LunaConfig {
  int K = 1;                                  // exploration grid size (ignored with finite prices)
  std::vector<double> support;                // Y_M
  MarketParams market;
  std::optional<std::vector<double>> prices;  // finite admissible set W, ascending

  void validate() const {
    market.validate();
    if (K < 1) throw std::invalid_argument("luna: K must be at least 1");
    if (support.empty()) throw std::invalid_argument("luna: empty support");
    for (std::size_t i = 1; i < support.size(); ++i)
      if (!(support[i] > support[i - 1])) throw std::invalid_argument("luna: support must be strictly increasing");
    if (std::none_of(support.begin(), support.end(), [](double y) { return y > 0.0; }))
      throw std::invalid_argument("luna: support needs a positive point");
    if (prices) {
      if (prices->empty()) throw std::invalid_argument("lunaf: empty price set");
      for (std::size_t i = 1; i < prices->size(); ++i)
        if (!((*prices)[i] > (*prices)[i - 1])) throw std::invalid_argument("lunaf: prices must be strictly increasing");
    }
  }
};

struct EpochState {
  int index = 1;
  long tau = 0;
  Phase phase = Phase::Exploration;
  std::vector<double> phi;     // exploration profits
  std::vector<double> orders;  // exploration orders
  std::size_t k_star = 0;      // 0-based index into the exploration prices
  double w_star = 0.0;
  double y_star = 0.0;
  double phi_star = 0.0;
  bool degenerate = false;     // no positive exploration profit: surrogate test disabled
};

/// Smallest element of W that is >= x; the largest element when none is.
inline double ceil_onto(const std::vector<double>& W, double x) {
  const auto it = std::lower_bound(W.begin(), W.end(), x);
  return it == W.end() ? W.back() : *it;
}

/// Largest element of W that is <= x; the smallest element when none is.
inline double floor_onto(const std::vector<double>& W, double x) {
  const auto it = std::upper_bound(W.begin(), W.end(), x);
  return it == W.begin() ? W.front() : *(it - 1);
}

struct ExploitPrices {
  double w0 = 0.0;
  std::vector<double> wm;  // indexed by m - 1; NaN where y_m = 0
};

/// Surrogate price and probe prices of the exploitation phase.
inline ExploitPrices luna_exploit_prices(const EpochState& st, double delta, const LunaConfig& cfg) {
  const auto& mp = cfg.market;
  ExploitPrices out;
  out.wm.assign(cfg.support.size(), std::numeric_limits<double>::quiet_NaN());
  if (cfg.prices) {
    const auto& W = *cfg.prices;
    const double gap = st.k_star + 1 < W.size() ? W[st.k_star + 1] - W[st.k_star] : 0.0;
    for (std::size_t m = 0; m < cfg.support.size(); ++m) {
      const double y = cfg.support[m];
      if (y > 0.0) out.wm[m] = ceil_onto(W, (st.phi_star + gap * st.y_star + delta) / y + mp.c);
    }
    out.w0 = st.degenerate ? st.w_star : floor_onto(W, std::max(st.w_star - delta / st.y_star, 0.0));
    return out;
  }
  for (std::size_t m = 0; m < cfg.support.size(); ++m) {
    const double y = cfg.support[m];
    if (y > 0.0) {
      const double w = (st.phi_star + delta + y * mp.s / cfg.K) / y + mp.c;
      out.wm[m] = std::clamp(w, 0.0, mp.s);
    }
  }
  out.w0 = st.degenerate ? st.w_star : std::max(st.w_star - delta / st.y_star, 0.0);
  return out;
}

/// m_t = 0 with probability 1 - min(1, sqrt(M/(t - tau))), otherwise uniform
/// over the probe-able support indices (1-based, y_m > 0).
inline int luna_sample_probe(long t, long tau, const std::vector<double>& support, const RandomStream& rng) {
  const double p = std::min(1.0, luna_delta(t, tau, support.size()));
  if (!(rng.uniform(static_cast<std::uint64_t>(t), 0, 0) < p)) return 0;
  std::vector<int> probeable;
  for (std::size_t m = 0; m < support.size(); ++m)
    if (support[m] > 0.0) probeable.push_back(static_cast<int>(m) + 1);
  return probeable[rng.below(probeable.size(), static_cast<std::uint64_t>(t), 0, 1)];
}

inline bool luna_restart_check(int m, double q, const EpochState& st, const std::vector<double>& support) {
  if (m >= 1) return q >= support[static_cast<std::size_t>(m - 1)];
  return !st.degenerate && q < st.y_star;
}

class LunaPolicy : public SupplierPolicy {
 public:
  explicit LunaPolicy(LunaConfig cfg, long start_tau = 0) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.prices) {
      explore_ = *cfg_.prices;
    } else {
      for (int k = 1; k <= cfg_.K; ++k) explore_.push_back(luna_exploration_price(k, cfg_.K, cfg_.market));
    }
    st_.tau = start_tau;
  }

  std::string name() const override { return cfg_.prices ? "lunaf" : "luna"; }

  PriceDecision decide(long t, const RandomStream& rng) override {
    t_ = t;
    epoch_of_last_ = st_.index;
    phase_of_last_ = st_.phase;
    const long k = t - st_.tau;
    if (k <= 0) throw std::logic_error("luna: decisions must move forward in time");
    if (st_.phase == Phase::Exploration) return {explore_[static_cast<std::size_t>(k - 1)], -1};
    delta_ = luna_delta(t, st_.tau, cfg_.support.size());
    m_ = luna_sample_probe(t, st_.tau, cfg_.support, rng);
    const auto prices = luna_exploit_prices(st_, delta_, cfg_);
    return {m_ == 0 ? prices.w0 : prices.wm[static_cast<std::size_t>(m_ - 1)], m_};
  }

  void observe(double w, double q) override {
    if (st_.phase == Phase::Exploration) {
      st_.phi.push_back(supplier_profit(w, q, cfg_.market));
      st_.orders.push_back(q);
      if (st_.phi.size() == explore_.size()) finish_exploration();
      return;
    }
    if (luna_restart_check(m_, q, st_, cfg_.support)) {
      restarts_.push_back({t_, st_.tau, delta_, m_});
      const int next = st_.index + 1;
      st_ = EpochState{};
      st_.index = next;
      st_.tau = t_;
    }
  }

  int epoch() const override { return epoch_of_last_; }
  Phase phase() const override { return phase_of_last_; }
  std::vector<RestartEvent> restarts() const override { return restarts_; }
  const EpochState& state() const { return st_; }
  const LunaConfig& config() const { return cfg_; }

 private:
  void finish_exploration() {
    st_.k_star = static_cast<std::size_t>(std::max_element(st_.phi.begin(), st_.phi.end()) - st_.phi.begin());
    st_.w_star = explore_[st_.k_star];
    st_.y_star = st_.orders[st_.k_star];
    st_.phi_star = st_.phi[st_.k_star];
    st_.degenerate = !(st_.phi_star > 0.0) || !(st_.y_star > 0.0);
    st_.phase = Phase::Exploitation;
  }

  LunaConfig cfg_;
  std::vector<double> explore_;
  EpochState st_;
  std::vector<RestartEvent> restarts_;
  long t_ = 0;
  int m_ = 0;
  double delta_ = 0.0;
  int epoch_of_last_ = 1;
  Phase phase_of_last_ = Phase::Exploration;
};

// ---------------------------------------------------------------------------
// LUNAC: LUNA on the grid Z_N with orders rounded up onto the grid.

/// Z_N = {(n - 1) xi_bar / (N - 1)}; N = 1 is widened to the two endpoints.
inline std::vector<double> lunac_grid(int N, double xi_bar) {
  if (N < 1) throw std::invalid_argument("lunac: N must be at least 1");
  const int n = std::max(N, 2);
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = static_cast<double>(i) * xi_bar / static_cast<double>(n - 1);
  z.back() = xi_bar;
  return z;
}

/// Smallest grid point >= q, with 0 mapped to 0.
inline double lunac_feedback_map(double q, const std::vector<double>& grid) {
  if (q <= 0.0) return 0.0;
  return ceil_onto(grid, q);
}

/// The grid-supported distribution matching F on the grid points.
inline StepCdf fictitious_cdf(const Cdf& f, const std::vector<double>& grid) {
  std::vector<double> cum(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) cum[n] = cdf_eval(f, grid[n]);
  cum.back() = 1.0;
  return StepCdf(grid, std::move(cum));
}

class Lunac final : public SupplierPolicy {
 public:
  Lunac(int N, MarketParams mp, long start_tau = 0)
      : grid_(lunac_grid(N, mp.xi_bar)), inner_(make_config(grid_, N, std::move(mp)), start_tau) {}

  static LunaConfig make_config(const std::vector<double>& grid, int K, MarketParams mp) {
    LunaConfig cfg;
    cfg.K = std::max(K, 1);
    cfg.support = grid;
    mp.support = grid;
    cfg.market = std::move(mp);
    return cfg;
  }

  std::string name() const override { return "lunac"; }
  PriceDecision decide(long t, const RandomStream& rng) override { return inner_.decide(t, rng); }
  void observe(double w, double q) override { inner_.observe(w, lunac_feedback_map(q, grid_)); }
  int epoch() const override { return inner_.epoch(); }
  Phase phase() const override { return inner_.phase(); }
  std::vector<RestartEvent> restarts() const override { return inner_.restarts(); }
  const std::vector<double>& grid() const { return grid_; }
  const LunaConfig& config() const { return inner_.config(); }

 private:
  std::vector<double> grid_;
  LunaPolicy inner_;
};

// ---------------------------------------------------------------------------
// LUNAC-N: EXP3 over block-wise grid sizes.

struct BobSetup {
  long H = 1;              // block length
  int z = 0;
  std::vector<long> sizes; // J
  long blocks = 1;         // ceil(T / H)
  double gamma = 0.0;
};

inline double bob_gamma(int z, long blocks) {
  const double k = z + 1.0;
  return std::min(1.0, std::sqrt(k * std::log(k) / ((std::numbers::e - 1.0) * static_cast<double>(blocks))));
}

inline BobSetup bob_setup(long T, double xi_bar) {
  if (T < 1) throw std::invalid_argument("bob_setup: T must be positive");
  BobSetup b;
  b.H = std::max(1L, floor_root(static_cast<double>(T) / xi_bar, 4));
  b.z = static_cast<int>(std::ceil(std::log(static_cast<double>(b.H)) - 1e-12));
  b.z = std::max(b.z, 0);
  if (b.z == 0) {
    b.sizes = {1};
  } else {
    for (int j = 0; j <= b.z; ++j) {
      // floor(H^{j/z}) = largest n with n^z <= H^j.
      b.sizes.push_back(floor_root(int_pow(static_cast<double>(b.H), j), b.z));
    }
  }
  b.blocks = (T + b.H - 1) / b.H;
  b.gamma = bob_gamma(b.z, b.blocks);
  return b;
}

class LunacN final : public SupplierPolicy {
 public:
  LunacN(long T, MarketParams mp) : T_(T), mp_(std::move(mp)), setup_(bob_setup(T, mp_.xi_bar)) {
    weights_.assign(setup_.sizes.size(), 1.0);
  }

  std::string name() const override { return "lunacn"; }

  /// Arm probabilities (1 - gamma) s_j / sum s + gamma / (z + 1).
  std::vector<double> probabilities() const {
    double total = 0.0;
    for (double w : weights_) total += w;
    const double k = static_cast<double>(weights_.size());
    std::vector<double> p(weights_.size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = (1.0 - setup_.gamma) * weights_[j] / total + setup_.gamma / k;
    return p;
  }

  PriceDecision decide(long t, const RandomStream& rng) override {
    if ((t - 1) % setup_.H == 0) start_block(t, rng);
    return inner_->decide(t, rng);
  }

  void observe(double w, double q) override {
    inner_->observe(w, q);
    block_profit_ += supplier_profit(w, q, mp_);
    ++block_len_;
    if (block_len_ == setup_.H || block_start_ + block_len_ - 1 == T_) finish_block();
  }

  int epoch() const override { return epochs_before_ + (inner_ ? inner_->epoch() : 1); }
  Phase phase() const override { return inner_ ? inner_->phase() : Phase::Exploration; }
  const BobSetup& setup() const { return setup_; }
  const std::vector<long>& chosen_sizes() const { return chosen_; }

 private:
  void start_block(long t, const RandomStream& rng) {
    probs_ = probabilities();
    const double u = rng.uniform(static_cast<std::uint64_t>(t), 1, 0);
    double acc = 0.0;
    arm_ = probs_.size() - 1;
    for (std::size_t j = 0; j < probs_.size(); ++j) {
      acc += probs_[j];
      if (u < acc) {
        arm_ = j;
        break;
      }
    }
    if (inner_) epochs_before_ += inner_->epoch();
    const long N = setup_.sizes[arm_];
    chosen_.push_back(N);
    inner_ = std::make_unique<Lunac>(static_cast<int>(N), mp_, t - 1);
    block_start_ = t;
    block_len_ = 0;
    block_profit_ = 0.0;
  }

  void finish_block() {
    // Rewards are scaled by the widest per-round profit range so they stay in [0, 1].
    const double scale = static_cast<double>(block_len_) * std::max(mp_.s - mp_.c, mp_.c) * mp_.xi_bar;
    if (std::fabs(block_profit_) > scale * (1.0 + 1e-12))
      throw std::logic_error("lunacn: block profit outside its admissible range");
    const double reward = 0.5 + 0.5 * block_profit_ / scale;
    const double k = static_cast<double>(weights_.size());
    weights_[arm_] *= std::exp(setup_.gamma / (k * probs_[arm_]) * reward);
    const double top = *std::max_element(weights_.begin(), weights_.end());
    for (double& w : weights_) w /= top;
    block_len_ = 0;
  }

  long T_;
  MarketParams mp_;
  BobSetup setup_;
  std::vector<double> weights_;
  std::vector<double> probs_;
  std::size_t arm_ = 0;
  std::unique_ptr<Lunac> inner_;
  long block_start_ = 1;
  long block_len_ = 0;
  double block_profit_ = 0.0;
  int epochs_before_ = 0;
  std::vector<long> chosen_;
};

// ---------------------------------------------------------------------------
// Bandit baselines over a finite price set.

/// d = ceil(sqrt T) evenly spaced prices j s / d, j = 1..d.
inline std::vector<double> finite_price_set(long T, double s) { return stat_grid(T, s); }

inline double normalized_reward(double w, double q, const MarketParams& mp) {
  return std::clamp(supplier_profit(w, q, mp) / ((mp.s - mp.c) * mp.xi_bar), 0.0, 1.0);
}

struct Exp3sParams {
  double gamma = 0.0;
  double alpha = 0.0;
  long switches = 1;
};

/// Exp3.S tuning from the horizon and a variation budget on mean rewards: the
/// budget is turned into a switch count through the batch length
/// (d ln d)^{1/3} (T / B_T)^{2/3}.
inline Exp3sParams exp3s_params(std::size_t d, long T, double budget) {
  Exp3sParams p;
  const double dd = static_cast<double>(d);
  const double TT = static_cast<double>(T);
  if (budget > 0.0 && d > 1) {
    const double batch = std::ceil(std::cbrt(dd * std::log(dd)) * std::pow(TT / budget, 2.0 / 3.0));
    p.switches = std::max(1L, static_cast<long>(std::ceil(TT / std::max(batch, 1.0))));
  }
  p.alpha = 1.0 / TT;
  p.gamma = std::min(1.0, std::sqrt(dd * (static_cast<double>(p.switches) * std::log(dd * TT) + std::numbers::e) /
                                    ((std::numbers::e - 1.0) * TT)));
  return p;
}

class Exp3S final : public SupplierPolicy {
 public:
  Exp3S(std::vector<double> prices, long T, double budget, MarketParams mp)
      : prices_(std::move(prices)), mp_(std::move(mp)), params_(exp3s_params(prices_.size(), T, budget)) {
    if (prices_.empty()) throw std::invalid_argument("exp3s: empty price set");
    weights_.assign(prices_.size(), 1.0 / static_cast<double>(prices_.size()));
  }

  std::string name() const override { return "exp3s"; }

  std::vector<double> probabilities() const {
    const double d = static_cast<double>(weights_.size());
    std::vector<double> p(weights_.size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = (1.0 - params_.gamma) * weights_[j] + params_.gamma / d;
    return p;
  }

  PriceDecision decide(long t, const RandomStream& rng) override {
    probs_ = probabilities();
    const double u = rng.uniform(static_cast<std::uint64_t>(t), 2, 0);
    double acc = 0.0;
    arm_ = probs_.size() - 1;
    for (std::size_t j = 0; j < probs_.size(); ++j) {
      acc += probs_[j];
      if (u < acc) {
        arm_ = j;
        break;
      }
    }
    return {prices_[arm_], static_cast<int>(arm_)};
  }

  void observe(double w, double q) override {
    const double d = static_cast<double>(weights_.size());
    const double xhat = normalized_reward(w, q, mp_) / probs_[arm_];
    // Weights sum to 1 before the update, so the sharing term is e*alpha/d.
    const double share = std::numbers::e * params_.alpha / d;
    weights_[arm_] *= std::exp(params_.gamma * xhat / d);
    double total = 0.0;
    for (double& v : weights_) {
      v += share;
      total += v;
    }
    for (double& v : weights_) v /= total;
  }

  const Exp3sParams& params() const { return params_; }

 private:
  std::vector<double> prices_;
  MarketParams mp_;
  Exp3sParams params_;
  std::vector<double> weights_;
  std::vector<double> probs_;
  std::size_t arm_ = 0;
};

/// Epoch-based deterministic-feedback bandit: pull every arm once, then play
/// the best arm, probing a uniform arm with probability sqrt(d/(t - tau)), and
/// restart when an observed reward moves by more than that amount.
class RestartBandit final : public SupplierPolicy {
 public:
  RestartBandit(std::vector<double> prices, MarketParams mp) : prices_(std::move(prices)), mp_(std::move(mp)) {
    if (prices_.empty()) throw std::invalid_argument("restart-bandit: empty price set");
  }

  std::string name() const override { return "restart-bandit"; }

  static double threshold(std::size_t d, long elapsed) {
    return std::sqrt(static_cast<double>(d) / static_cast<double>(elapsed));
  }

  PriceDecision decide(long t, const RandomStream& rng) override {
    t_ = t;
    epoch_of_last_ = epoch_;
    const long k = t - tau_;
    if (static_cast<std::size_t>(k) <= prices_.size()) {
      phase_ = Phase::Exploration;
      arm_ = static_cast<std::size_t>(k - 1);
      return {prices_[arm_], -1};
    }
    phase_ = Phase::Exploitation;
    const double p = std::min(1.0, threshold(prices_.size(), k));
    if (rng.uniform(static_cast<std::uint64_t>(t), 3, 0) < p) {
      arm_ = rng.below(prices_.size(), static_cast<std::uint64_t>(t), 3, 1);
    } else {
      arm_ = best_;
    }
    return {prices_[arm_], static_cast<int>(arm_)};
  }

  void observe(double w, double q) override {
    const double r = normalized_reward(w, q, mp_);
    if (phase_ == Phase::Exploration) {
      recorded_.push_back(r);
      if (recorded_.size() == prices_.size())
        best_ = static_cast<std::size_t>(std::max_element(recorded_.begin(), recorded_.end()) - recorded_.begin());
      return;
    }
    if (std::fabs(r - recorded_[arm_]) > threshold(prices_.size(), t_ - tau_)) {
      restarts_.push_back({t_, tau_, threshold(prices_.size(), t_ - tau_), static_cast<int>(arm_)});
      tau_ = t_;
      ++epoch_;
      recorded_.clear();
    }
  }

  int epoch() const override { return epoch_of_last_; }
  Phase phase() const override { return phase_; }
  std::vector<RestartEvent> restarts() const override { return restarts_; }

 private:
  std::vector<double> prices_;
  MarketParams mp_;
  std::vector<double> recorded_;
  std::size_t best_ = 0;
  std::size_t arm_ = 0;
  long tau_ = 0;
  long t_ = 0;
  int epoch_ = 1;
  int epoch_of_last_ = 1;
  Phase phase_ = Phase::Exploration;
  std::vector<RestartEvent> restarts_;
};

}  // namespace lunasim
