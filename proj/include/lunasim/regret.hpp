#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lunasim/market.hpp"

namespace lunasim {

struct Benchmark {
  double profit = 0.0;
  double price = 0.0;  // price attaining the profit, or the limit price of a supremum
};

/// sup_w (w - c) q(w; F) for a step CDF. Pricing just below s(1 - F(y_j-))
/// buys order y_j for every support point carrying positive mass, so the sup
/// is the best of those limits and the zero-profit price s.
inline Benchmark clairvoyant_profit(const StepCdf& f, const MarketParams& mp) {
  Benchmark best{0.0, mp.s};
  const auto& y = f.support();
  const auto& cum = f.cum();
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double below = f.mass_below(j);
    if (!(y[j] > 0.0) || !(cum[j] > below)) continue;
    const double w = mp.s * (1.0 - below);
    const double profit = (w - mp.c) * y[j];
    if (profit > best.profit) best = {profit, w};
  }
  return best;
}

/// Step form of a discrete parametric distribution, including the cap jump.
inline StepCdf discrete_as_step(const ParametricCdf& f) {
  if (f.family() == Family::Categorical) {
    const auto& cat = f.categories();
    if (!f.cap()) return cat;
    std::vector<double> support;
    std::vector<double> cum;
    for (std::size_t i = 0; i < cat.size() && cat.support()[i] < *f.cap(); ++i) {
      support.push_back(cat.support()[i]);
      cum.push_back(cat.cum()[i]);
    }
    support.push_back(*f.cap());
    cum.push_back(1.0);
    return StepCdf(std::move(support), std::move(cum));
  }
  if (f.family() != Family::Poisson) throw std::invalid_argument("discrete_as_step: continuous family");
  const double top = f.quantile(1.0);
  const double last = std::isfinite(top) ? top : f.quantile(1.0 - 1e-15);
  std::vector<double> support;
  std::vector<double> cum;
  for (double k = 0.0; k <= last; k += 1.0) {
    if (f.cap() && k >= *f.cap()) break;
    support.push_back(k);
    cum.push_back(f(k));
  }
  if (f.cap()) {
    support.push_back(*f.cap());
    cum.push_back(1.0);
  } else {
    cum.back() = 1.0;
  }
  return StepCdf(std::move(support), std::move(cum));
}

/// Continuous families: 512-point grid over [c, s] with golden-section
/// refinement around the best cells.
inline Benchmark clairvoyant_profit(const ParametricCdf& f, const MarketParams& mp) {
  if (f.is_discrete()) return clairvoyant_profit(discrete_as_step(f), mp);
  const auto profit = [&](double w) { return (w - mp.c) * best_response_order(f, w, mp.s); };
  constexpr int grid = 512;
  const double step = (mp.s - mp.c) / grid;
  Benchmark best{0.0, mp.s};
  int arg = grid;
  for (int k = 0; k <= grid; ++k) {
    const double w = mp.c + k * step;
    const double v = profit(w);
    if (v > best.profit) {
      best = {v, w};
      arg = k;
    }
  }
  double a = mp.c + std::max(arg - 1, 0) * step;
  double b = mp.c + std::min(arg + 1, grid) * step;
  constexpr double r = 0.6180339887498949;
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = profit(x1);
  double f2 = profit(x2);
  for (int i = 0; i < 200 && b - a > 1e-12 * mp.s; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = profit(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = profit(x1);
    }
  }
  if (f1 > best.profit) best = {f1, x1};
  if (f2 > best.profit) best = {f2, x2};
  return best;
}

inline Benchmark clairvoyant_profit(const Cdf& f, const MarketParams& mp) {
  return std::visit([&](const auto& d) { return clairvoyant_profit(d, mp); }, f);
}

/// max over a finite price set of (w - c) q(w; F).
inline Benchmark finite_clairvoyant_profit(const Cdf& f, const std::vector<double>& prices, const MarketParams& mp) {
  Benchmark best{-kInf, 0.0};
  for (double w : prices) {
    const double v = supplier_profit(w, best_response_order(f, w, mp.s), mp);
    if (v > best.profit) best = {v, w};
  }
  return best;
}

class BenchmarkViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Cumulative dynamic regret.
class RegretLedger {
 public:
  static constexpr double kTolerance = 1e-9;

  void update(double benchmark, double realized) {
    if (!(benchmark >= realized - kTolerance))
      throw BenchmarkViolation("regret: realized profit exceeds the clairvoyant benchmark");
    benchmark_.push_back(benchmark);
    realized_.push_back(realized);
    const double inst = benchmark - realized;
    instantaneous_.push_back(inst);
    total_ += inst;
    cumulative_.push_back(total_);
  }

  const std::vector<double>& benchmark() const { return benchmark_; }
  const std::vector<double>& realized() const { return realized_; }
  const std::vector<double>& instantaneous() const { return instantaneous_; }
  const std::vector<double>& cumulative() const { return cumulative_; }
  double total() const { return total_; }

 private:
  std::vector<double> benchmark_;
  std::vector<double> realized_;
  std::vector<double> instantaneous_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

/// Kolmogorov steps between consecutive perceived distributions, with running
/// totals per epoch. Entry t (0-based) holds d_K(F_t, F_{t+1}) in 1-based
/// rounds; a step counts toward an epoch when both rounds belong to it.
class VariationTrace {
 public:
  void update(double step, int epoch_before, int epoch_after) {
    if (!(step >= 0.0)) throw std::logic_error("variation: negative distance");
    steps_.push_back(step);
    total_ += step;
    running_.push_back(total_);
    if (epoch_before == epoch_after) epoch_sums_[epoch_after] += step;
  }

  const std::vector<double>& steps() const { return steps_; }
  const std::vector<double>& running() const { return running_; }
  double total() const { return total_; }
  double epoch_sum(int epoch) const {
    const auto it = epoch_sums_.find(epoch);
    return it == epoch_sums_.end() ? 0.0 : it->second;
  }
  const std::map<int, double>& epoch_sums() const { return epoch_sums_; }

 private:
  std::vector<double> steps_;
  std::vector<double> running_;
  std::map<int, double> epoch_sums_;
  double total_ = 0.0;
};

/// (s xi)^{2/3} V^{2/3} M^{-1/3} T^{1/3} + 1.
inline double epoch_count_bound(double variation, std::size_t M, long T, const MarketParams& mp) {
  return std::cbrt(mp.s * mp.xi_bar * mp.s * mp.xi_bar * variation * variation * static_cast<double>(T) /
                   static_cast<double>(M)) +
         1.0;
}

}  // namespace lunasim
