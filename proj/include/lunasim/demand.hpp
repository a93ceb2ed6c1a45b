#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
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

/// P(demand = 0) in round t of the sinusoidal Bernoulli scenario:
/// 1/2 + (3/10) sin(5 V pi t / (3 T)).
inline double sinusoidal_p(long t, long T, double V) {
  if (t < 1 || t > T) throw std::invalid_argument("sinusoidal_p: need 1 <= t <= T");
  if (!(V > 0.0)) throw std::invalid_argument("sinusoidal_p: V must be positive");
  return 0.5 + 0.3 * std::sin(5.0 * V * std::numbers::pi * static_cast<double>(t) / (3.0 * static_cast<double>(T)));
}

inline StepCdf bernoulli_cdf(double p_zero) { return StepCdf({0.0, 1.0}, {p_zero, 1.0}); }

/// Daily demand samples grouped by calendar month (index 0 = January).
struct MonthlyPools {
  std::array<std::vector<double>, 12> months;
};

/// Month of day t of a 365-day year starting on January 1st.
inline int month_of_day(long t) {
  static constexpr std::array<int, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  long d = (t - 1) % 365;
  for (int m = 0; m < 12; ++m) {
    if (d < kDays[static_cast<std::size_t>(m)]) return m;
    d -= kDays[static_cast<std::size_t>(m)];
  }
  return 11;
}

inline double sample_step(const StepCdf& f, double u) {
  const auto& cum = f.cum();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  return it == cum.end() ? f.support().back() : f.support()[static_cast<std::size_t>(it - cum.begin())];
}

/// True market demand process.
class DemandModel {
 public:
  enum class Kind { StationaryStep, Sinusoidal, Parametric, Bootstrap };

  static DemandModel stationary(StepCdf f) {
    DemandModel d(Kind::StationaryStep);
    d.step_ = std::move(f);
    return d;
  }
  static DemandModel sinusoidal(double V, long T) {
    if (!(V > 0.0)) throw std::invalid_argument("sinusoidal demand: V must be positive");
    DemandModel d(Kind::Sinusoidal);
    d.V_ = V;
    d.T_ = T;
    return d;
  }
  /// Draws from `f` truncated to [0, upper] by inverse-CDF sampling.
  static DemandModel parametric(ParametricCdf f, double upper = kInf) {
    if (f.cap()) throw std::invalid_argument("parametric demand: use truncation rather than a cap");
    if (!(upper > 0.0)) throw std::invalid_argument("parametric demand: upper bound must be positive");
    DemandModel d(Kind::Parametric);
    d.param_ = std::move(f);
    d.upper_ = upper;
    return d;
  }
  static DemandModel bootstrap(std::shared_ptr<const MonthlyPools> pools) {
    if (!pools) throw std::invalid_argument("bootstrap demand: no dataset");
    DemandModel d(Kind::Bootstrap);
    for (int m = 0; m < 12; ++m) {
      const auto& pool = pools->months[static_cast<std::size_t>(m)];
      if (pool.empty()) throw std::invalid_argument("bootstrap demand: month " + std::to_string(m + 1) + " has no samples");
      d.month_cdfs_.push_back(StepCdf::empirical(pool));
    }
    d.pools_ = std::move(pools);
    return d;
  }

  Kind kind() const { return kind_; }
  double V() const { return V_; }
  const std::optional<ParametricCdf>& parametric_law() const { return param_; }
  double upper() const { return upper_; }

  double sample(long t, const RandomStream& rng) const {
    const double u = rng.uniform(static_cast<std::uint64_t>(t), 0, 0);
    switch (kind_) {
      case Kind::StationaryStep: return sample_step(step_, u);
      case Kind::Sinusoidal: return u < sinusoidal_p(t, T_, V_) ? 0.0 : 1.0;
      case Kind::Parametric: {
        const auto& f = *param_;
        const double lo = f.left_limit(0.0);
        const double hi = std::isfinite(upper_) ? f(upper_) : 1.0;
        const double p = lo + u * (hi - lo);
        const double x = f.quantile(p);
        return std::clamp(x, 0.0, upper_);
      }
      case Kind::Bootstrap: {
        const auto& pool = pools_->months[static_cast<std::size_t>(month_of_day(t))];
        return pool[rng.below(pool.size(), static_cast<std::uint64_t>(t), 0, 1)];
      }
    }
    return 0.0;
  }

  /// Distribution of the round-t demand; only defined for step-type models.
  Cdf truth(long t) const {
    switch (kind_) {
      case Kind::StationaryStep: return step_;
      case Kind::Sinusoidal: return bernoulli_cdf(sinusoidal_p(t, T_, V_));
      case Kind::Bootstrap: return month_cdfs_[static_cast<std::size_t>(month_of_day(t))];
      case Kind::Parametric:
        if (std::isfinite(upper_)) throw std::invalid_argument("demand truth: truncated parametric law has no closed form");
        return *param_;
    }
    return step_;
  }

  /// Largest demand the model can produce, or infinity.
  double max_demand() const {
    switch (kind_) {
      case Kind::StationaryStep: return step_.support().back();
      case Kind::Sinusoidal: return 1.0;
      case Kind::Parametric: return upper_;
      case Kind::Bootstrap: {
        double m = 0.0;
        for (const auto& pool : pools_->months)
          for (double x : pool) m = std::max(m, x);
        return m;
      }
    }
    return kInf;
  }

 private:
  explicit DemandModel(Kind k) : kind_(k) {}

  Kind kind_;
  StepCdf step_;
  double V_ = 1.0;
  long T_ = 1;
  std::optional<ParametricCdf> param_;
  double upper_ = kInf;
  std::shared_ptr<const MonthlyPools> pools_;
  std::vector<StepCdf> month_cdfs_;
};

}  // namespace lunasim
