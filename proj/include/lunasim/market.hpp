#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lunasim/special.hpp"

namespace lunasim {

/// Right-continuous step CDF: F(x) = cum[i] for the last support[i] <= x and
/// 0 below the first support point.
class StepCdf {
 public:
  StepCdf() : support_{0.0}, cum_{1.0} {}

  StepCdf(std::vector<double> support, std::vector<double> cum)
      : support_(std::move(support)), cum_(std::move(cum)) {
    if (support_.empty() || support_.size() != cum_.size())
      throw std::invalid_argument("StepCdf: support and cum must be non-empty and of equal length");
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (!(cum_[i] >= 0.0 && cum_[i] <= 1.0 + 1e-12))
        throw std::invalid_argument("StepCdf: cumulative probability outside [0,1]");
      if (i > 0 && !(support_[i] > support_[i - 1]))
        throw std::invalid_argument("StepCdf: support must be strictly increasing");
      if (i > 0 && cum_[i] < cum_[i - 1]) throw std::invalid_argument("StepCdf: cum must be non-decreasing");
    }
    if (std::fabs(cum_.back() - 1.0) > 1e-12) throw std::invalid_argument("StepCdf: final cum must equal 1");
    cum_.back() = 1.0;
  }

  /// Builds the CDF from point masses on an ascending support.
  static StepCdf from_masses(std::vector<double> support, const std::vector<double>& mass) {
    if (support.size() != mass.size()) throw std::invalid_argument("StepCdf: support/mass size mismatch");
    std::vector<double> cum(mass.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      if (mass[i] < 0.0) throw std::invalid_argument("StepCdf: negative mass");
      acc += mass[i];
      cum[i] = acc;
    }
    return StepCdf(std::move(support), std::move(cum));
  }

  /// Empirical CDF of a sample.
  static StepCdf empirical(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("StepCdf::empirical: no samples");
    std::sort(samples.begin(), samples.end());
    std::vector<double> support;
    std::vector<double> cum;
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
      support.push_back(samples[i]);
      cum.push_back(static_cast<double>(i + 1) / n);
    }
    return StepCdf(std::move(support), std::move(cum));
  }

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& cum() const { return cum_; }
  std::size_t size() const { return support_.size(); }

  double operator()(double x) const {
    const auto it = std::upper_bound(support_.begin(), support_.end(), x);
    if (it == support_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - support_.begin()) - 1];
  }

  /// F(x-), the limit from the left.
  double left_limit(double x) const {
    const auto it = std::lower_bound(support_.begin(), support_.end(), x);
    if (it == support_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - support_.begin()) - 1];
  }

  /// Mass strictly below support point i.
  double mass_below(std::size_t i) const { return i == 0 ? 0.0 : cum_[i - 1]; }

  friend bool operator==(const StepCdf&, const StepCdf&) = default;

 private:
  std::vector<double> support_;
  std::vector<double> cum_;
};

enum class Family { Poisson, Categorical, Exponential, Normal };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::Poisson: return "poisson";
    case Family::Categorical: return "categorical";
    case Family::Exponential: return "exponential";
    case Family::Normal: return "normal";
  }
  return "?";
}

/// Fitted parametric distribution with an optional order cap. When a cap is
/// present the CDF jumps to 1 at the cap.
class ParametricCdf {
 public:
  static ParametricCdf poisson(double lambda, std::optional<double> cap = std::nullopt) {
    if (!(lambda > 0.0)) throw std::invalid_argument("Poisson: lambda must be positive");
    return ParametricCdf(Family::Poisson, lambda, 0.0, {}, cap);
  }
  static ParametricCdf exponential(double lambda, std::optional<double> cap = std::nullopt) {
    if (!(lambda > 0.0)) throw std::invalid_argument("Exponential: lambda must be positive");
    return ParametricCdf(Family::Exponential, lambda, 0.0, {}, cap);
  }
  static ParametricCdf normal(double mu, double sigma, std::optional<double> cap = std::nullopt) {
    if (!(sigma > 0.0)) throw std::invalid_argument("Normal: sigma must be positive");
    return ParametricCdf(Family::Normal, mu, sigma, {}, cap);
  }
  static ParametricCdf categorical(StepCdf dist, std::optional<double> cap = std::nullopt) {
    return ParametricCdf(Family::Categorical, 0.0, 0.0, std::move(dist), cap);
  }

  Family family() const { return family_; }
  double param1() const { return p1_; }
  double param2() const { return p2_; }
  const std::optional<double>& cap() const { return cap_; }
  const StepCdf& categories() const { return cat_; }
  bool is_discrete() const { return family_ == Family::Poisson || family_ == Family::Categorical; }

  double operator()(double x) const {
    if (cap_ && x >= *cap_) return 1.0;
    return uncapped(x);
  }

  double left_limit(double x) const {
    if (cap_ && x > *cap_) return 1.0;
    switch (family_) {
      case Family::Poisson: {
        if (x <= 0.0) return 0.0;
        const double k = std::ceil(x) - 1.0;
        return poisson_cdf(k);
      }
      case Family::Categorical: return cat_.left_limit(x);
      default: return uncapped(x);
    }
  }

  /// Generalized inverse min{q >= 0 : F(q) >= p}, honouring the cap.
  double quantile(double p) const {
    if (p <= 0.0) return 0.0;
    double q = 0.0;
    switch (family_) {
      case Family::Exponential: q = p >= 1.0 ? kInf : -std::log1p(-p) / p1_; break;
      case Family::Normal: q = std::max(0.0, p1_ + p2_ * normal_quantile(std::min(p, 1.0))); break;
      case Family::Poisson: {
        // Binary search on the same CDF used for evaluation, so F(q) >= p holds exactly.
        double hi = std::ceil(p1_ + 50.0 * std::sqrt(p1_) + 50.0);
        if (cap_) hi = std::min(hi, std::floor(*cap_));
        if (poisson_cdf(hi) < p) {
          q = kInf;
          break;
        }
        double lo = -1.0;  // F(lo) < p
        while (hi - lo > 1.0) {
          const double mid = std::floor(0.5 * (lo + hi));
          (poisson_cdf(mid) >= p ? hi : lo) = mid;
        }
        q = hi;
        break;
      }
      case Family::Categorical: {
        const auto& cum = cat_.cum();
        const auto it = std::lower_bound(cum.begin(), cum.end(), p);
        q = it == cum.end() ? cat_.support().back() : cat_.support()[static_cast<std::size_t>(it - cum.begin())];
        break;
      }
    }
    if (cap_) q = std::min(q, *cap_);
    return q;
  }

  /// Points where the CDF may jump.
  std::vector<double> jump_points(double upto) const {
    std::vector<double> pts;
    if (family_ == Family::Categorical) pts = cat_.support();
    if (family_ == Family::Poisson)
      for (double k = 0.0; k <= upto; k += 1.0) pts.push_back(k);
    if (cap_) pts.push_back(*cap_);
    return pts;
  }

  bool operator==(const ParametricCdf& o) const {
    return family_ == o.family_ && p1_ == o.p1_ && p2_ == o.p2_ && cat_ == o.cat_ && cap_ == o.cap_;
  }

 private:
  ParametricCdf(Family f, double p1, double p2, StepCdf cat, std::optional<double> cap)
      : family_(f), p1_(p1), p2_(p2), cat_(std::move(cat)), cap_(cap) {
    if (cap_ && !(*cap_ >= 0.0)) throw std::invalid_argument("ParametricCdf: cap must be non-negative");
  }

  double poisson_cdf(double k) const {
    if (k < 0.0) return 0.0;
    return 1.0 - regularized_gamma_p(k + 1.0, p1_);
  }

  double uncapped(double x) const {
    if (x < 0.0) return 0.0;
    switch (family_) {
      case Family::Poisson: return poisson_cdf(std::floor(x));
      case Family::Categorical: return cat_(x);
      case Family::Exponential: return -std::expm1(-p1_ * x);
      case Family::Normal: return normal_cdf((x - p1_) / p2_);
    }
    return 0.0;
  }

  Family family_;
  double p1_;
  double p2_;
  StepCdf cat_;
  std::optional<double> cap_;
};

using Cdf = std::variant<StepCdf, ParametricCdf>;

struct MarketParams {
  double s = 1.0;
  double c = 0.0;
  double xi_bar = 1.0;
  std::optional<std::vector<double>> support;  // Y_M

  void validate() const {
    if (!(c >= 0.0 && c < s)) throw std::invalid_argument("MarketParams: need 0 <= c < s");
    if (!(xi_bar > 0.0)) throw std::invalid_argument("MarketParams: xi_bar must be positive");
    if (support) {
      const auto& y = *support;
      if (y.empty()) throw std::invalid_argument("MarketParams: empty support");
      for (std::size_t i = 1; i < y.size(); ++i)
        if (!(y[i] > y[i - 1])) throw std::invalid_argument("MarketParams: support must be strictly increasing");
      if (y.back() != xi_bar) throw std::invalid_argument("MarketParams: max support must equal xi_bar");
      if (y.front() < 0.0) throw std::invalid_argument("MarketParams: support must be non-negative");
    }
  }

  friend bool operator==(const MarketParams&, const MarketParams&) = default;
};

inline double cdf_eval(const Cdf& f, double x) {
  return std::visit([x](const auto& d) { return d(x); }, f);
}

inline double cdf_left_limit(const Cdf& f, double x) {
  return std::visit([x](const auto& d) { return d.left_limit(x); }, f);
}

/// Newsvendor best response min{q >= 0 : F(q) >= 1 - w/s}.
inline double best_response_order(const StepCdf& f, double w, double s) {
  if (!(w >= 0.0)) throw std::invalid_argument("best_response_order: negative price");
  const double p = 1.0 - w / s;
  if (p <= 0.0) return 0.0;
  const auto& cum = f.cum();
  const auto it = std::lower_bound(cum.begin(), cum.end(), p);
  if (it == cum.end()) return f.support().back();
  return std::max(0.0, f.support()[static_cast<std::size_t>(it - cum.begin())]);
}

inline double best_response_order(const ParametricCdf& f, double w, double s) {
  if (!(w >= 0.0)) throw std::invalid_argument("best_response_order: negative price");
  return f.quantile(1.0 - w / s);
}

inline double best_response_order(const Cdf& f, double w, double s) {
  return std::visit([&](const auto& d) { return best_response_order(d, w, s); }, f);
}

inline double best_response_order(const Cdf& f, double w, const MarketParams& mp) {
  return best_response_order(f, w, mp.s);
}

/// (w - c) q; a zero margin earns nothing whatever the order.
inline double supplier_profit(double w, double q, const MarketParams& mp) { return w == mp.c ? 0.0 : (w - mp.c) * q; }

/// Exact sup |F - G| for two step CDFs by a merge over the union of support points.
inline double kolmogorov_distance(const StepCdf& f, const StepCdf& g) {
  const auto& xs = f.support();
  const auto& ys = g.support();
  const auto& fc = f.cum();
  const auto& gc = g.cum();
  std::size_t i = 0;
  std::size_t j = 0;
  double fv = 0.0;
  double gv = 0.0;
  double best = 0.0;
  while (i < xs.size() || j < ys.size()) {
    double x;
    if (j == ys.size() || (i < xs.size() && xs[i] < ys[j])) {
      x = xs[i];
    } else {
      x = ys[j];
    }
    while (i < xs.size() && xs[i] == x) fv = fc[i++];
    while (j < ys.size() && ys[j] == x) gv = gc[j++];
    best = std::max(best, std::fabs(fv - gv));
  }
  return best;
}

namespace detail {

inline double golden_max(const auto& fn, double lo, double hi, int iters = 80) {
  constexpr double r = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = fn(x1);
  double f2 = fn(x2);
  for (int i = 0; i < iters && b - a > 1e-15 * std::max(1.0, std::fabs(b)); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = fn(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = fn(x1);
    }
  }
  return std::max(f1, f2);
}

}  // namespace detail

/// sup |F - G| on [0, upto]. Exact for two step CDFs; otherwise evaluated at
/// jump points (both sides) and on a 10^4-point grid with golden-section
/// refinement around the best grid cells.
inline double kolmogorov_distance(const Cdf& f, const Cdf& g, double upto) {
  if (std::holds_alternative<StepCdf>(f) && std::holds_alternative<StepCdf>(g))
    return kolmogorov_distance(std::get<StepCdf>(f), std::get<StepCdf>(g));

  const auto diff = [&](double x) { return std::fabs(cdf_eval(f, x) - cdf_eval(g, x)); };
  const auto diff_left = [&](double x) { return std::fabs(cdf_left_limit(f, x) - cdf_left_limit(g, x)); };

  std::vector<double> jumps;
  for (const Cdf* h : {&f, &g}) {
    if (const auto* st = std::get_if<StepCdf>(h)) {
      jumps.insert(jumps.end(), st->support().begin(), st->support().end());
    } else {
      const auto pts = std::get<ParametricCdf>(*h).jump_points(upto);
      jumps.insert(jumps.end(), pts.begin(), pts.end());
    }
  }
  double best = 0.0;
  for (double x : jumps) best = std::max({best, diff(x), diff_left(x)});

  constexpr int grid = 10000;
  const double step = upto / grid;
  std::vector<double> vals(grid + 1);
  for (int k = 0; k <= grid; ++k) {
    vals[k] = diff(k * step);
    best = std::max(best, vals[k]);
  }
  std::vector<int> peaks;
  for (int k = 1; k < grid; ++k)
    if (vals[k] > 0.0 && vals[k] >= vals[k - 1] && vals[k] >= vals[k + 1]) peaks.push_back(k);
  constexpr std::size_t kRefine = 8;
  if (peaks.size() > kRefine) {
    std::partial_sort(peaks.begin(), peaks.begin() + kRefine, peaks.end(),
                      [&](int a, int b) { return vals[a] > vals[b]; });
    peaks.resize(kRefine);
  }
  for (int k : peaks) best = std::max(best, detail::golden_max(diff, (k - 1) * step, (k + 1) * step, 60));
  return best;
}

inline double kolmogorov_distance(const Cdf& f, const Cdf& g, const MarketParams& mp) {
  return kolmogorov_distance(f, g, mp.xi_bar);
}

}  // namespace lunasim
