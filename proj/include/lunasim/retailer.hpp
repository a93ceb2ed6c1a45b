#pragma once

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lunasim/dro.hpp"
#include "lunasim/market.hpp"

namespace lunasim {

/// Perceived distribution and the order it induces.
struct Perceived {
  Cdf cdf;
  double order = 0.0;
};

struct HistoryEntry {
  double w;
  double q;
  double xi;
};

/// A retailer inventory policy. `respond` sees the history of rounds before t
/// and the current price.
class RetailerPolicy {
 public:
  virtual ~RetailerPolicy() = default;
  virtual std::string name() const = 0;
  virtual Perceived respond(long t, double w) = 0;
  virtual void record(const HistoryEntry& h) { history_.push_back(h); }
  const std::vector<HistoryEntry>& history() const { return history_; }

 protected:
  std::vector<HistoryEntry> history_;
};

/// Uniform distribution on the known support, or on 64 evenly spaced points of
/// [0, xi_bar]; used before any demand has been observed.
inline StepCdf fallback_cdf(const MarketParams& mp) {
  std::vector<double> pts;
  if (mp.support) {
    pts = *mp.support;
  } else {
    for (int k = 0; k < 64; ++k) pts.push_back(mp.xi_bar * k / 63.0);
  }
  std::vector<double> cum(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) cum[i] = static_cast<double>(i + 1) / static_cast<double>(pts.size());
  return StepCdf(std::move(pts), std::move(cum));
}

/// Empirical CDF of the samples.
inline StepCdf saa_perceive(const std::vector<double>& samples) { return StepCdf::empirical(samples); }

/// Sample average approximation: orders against the empirical CDF.
class SaaRetailer : public RetailerPolicy {
 public:
  explicit SaaRetailer(MarketParams mp) : mp_(std::move(mp)) {}
  std::string name() const override { return "saa"; }

  StepCdf current() const {
    if (counts_.empty()) return fallback_cdf(mp_);
    std::vector<double> support;
    std::vector<double> cum;
    support.reserve(counts_.size());
    cum.reserve(counts_.size());
    long acc = 0;
    for (const auto& [x, n] : counts_) {
      acc += n;
      support.push_back(x);
      cum.push_back(static_cast<double>(acc) / static_cast<double>(total_));
    }
    return StepCdf(std::move(support), std::move(cum));
  }

  Perceived respond(long, double w) override {
    StepCdf f = current();
    const double q = best_response_order(f, w, mp_.s);
    return {std::move(f), q};
  }

  void record(const HistoryEntry& h) override {
    RetailerPolicy::record(h);
    ++counts_[h.xi];
    ++total_;
  }

 private:
  MarketParams mp_;
  std::map<double, long> counts_;
  long total_ = 0;
};

/// Distributionally robust retailer; the perceived CDF is the worst case at the
/// played price.
class DroRetailer : public RetailerPolicy {
 public:
  DroRetailer(MarketParams mp, Divergence div, double alpha, std::optional<double> cap)
      : mp_(std::move(mp)), div_(div), alpha_(alpha), cap_(cap), saa_(mp_) {
    dro_epsilon(alpha_, 1);
  }
  std::string name() const override { return "dro"; }

  Perceived respond(long t, double w) override {
    if (history_.empty()) {
      StepCdf f = fallback_cdf(mp_);
      const double q = best_response_order(f, w, mp_.s);
      return {std::move(f), q};
    }
    last_ = dro_worst_case(saa_.current(), div_, dro_epsilon(alpha_, t), w, mp_, cap_);
    const double q = best_response_order(last_.worst, w, mp_.s);
    return {last_.worst, q};
  }

  void record(const HistoryEntry& h) override {
    RetailerPolicy::record(h);
    saa_.record(h);
  }

  /// Maximizer of the robust objective in the last round.
  double robust_order() const { return last_.order; }

 private:
  MarketParams mp_;
  Divergence div_;
  double alpha_;
  std::optional<double> cap_;
  SaaRetailer saa_;
  DroDecision last_;
};

/// Maximum-likelihood fit of a parametric family, capped at q_bar.
inline ParametricCdf mle_perceive(Family family, const std::vector<double>& samples, std::optional<double> cap,
                                  double sigma = 1.0, const std::vector<double>* support = nullptr) {
  if (samples.empty()) throw std::invalid_argument("mle_perceive: no samples");
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double n = static_cast<double>(samples.size());
  switch (family) {
    case Family::Poisson: return ParametricCdf::poisson(sum / n, cap);
    case Family::Exponential:
      if (!(sum > 0.0)) throw std::domain_error("mle_perceive: exponential rate undefined for zero sample sum");
      return ParametricCdf::exponential(n / sum, cap);
    case Family::Normal: return ParametricCdf::normal(sum / n, sigma, cap);
    case Family::Categorical: {
      if (!support) throw std::invalid_argument("mle_perceive: categorical fit needs the support");
      std::vector<double> mass(support->size(), 0.0);
      for (double x : samples) {
        const auto it = std::lower_bound(support->begin(), support->end(), x);
        if (it == support->end() || *it != x) throw std::invalid_argument("mle_perceive: sample outside support");
        mass[static_cast<std::size_t>(it - support->begin())] += 1.0 / n;
      }
      return ParametricCdf::categorical(StepCdf::from_masses(*support, mass), cap);
    }
  }
  throw std::invalid_argument("mle_perceive: unknown family");
}

class MleRetailer : public RetailerPolicy {
 public:
  MleRetailer(MarketParams mp, Family family, std::optional<double> cap, double sigma)
      : mp_(std::move(mp)), family_(family), cap_(cap), sigma_(sigma) {
    if (family_ == Family::Categorical && !mp_.support)
      throw std::invalid_argument("mle: categorical family needs market support");
  }
  std::string name() const override { return "mle"; }

  Perceived respond(long, double w) override {
    if (n_ > 0) refit();
    Cdf f = fit_ ? Cdf(*fit_) : Cdf(fallback_cdf(mp_));
    const double q = best_response_order(f, w, mp_.s);
    return {std::move(f), q};
  }

  void record(const HistoryEntry& h) override {
    RetailerPolicy::record(h);
    sum_ += h.xi;
    ++n_;
    if (family_ == Family::Categorical) {
      const auto& y = *mp_.support;
      const auto it = std::lower_bound(y.begin(), y.end(), h.xi);
      if (it == y.end() || *it != h.xi) throw std::invalid_argument("mle: demand outside the market support");
      counts_.resize(y.size(), 0);
      ++counts_[static_cast<std::size_t>(it - y.begin())];
    }
  }

 private:
  void refit() {
    const double n = static_cast<double>(n_);
    switch (family_) {
      case Family::Poisson:
        if (sum_ > 0.0) fit_ = ParametricCdf::poisson(sum_ / n, cap_);
        break;
      case Family::Exponential:
        // A zero sample sum leaves the rate undefined; keep the previous fit.
        if (sum_ > 0.0) fit_ = ParametricCdf::exponential(n / sum_, cap_);
        break;
      case Family::Normal: fit_ = ParametricCdf::normal(sum_ / n, sigma_, cap_); break;
      case Family::Categorical: {
        std::vector<double> mass(counts_.size());
        for (std::size_t i = 0; i < counts_.size(); ++i) mass[i] = static_cast<double>(counts_[i]) / n;
        fit_ = ParametricCdf::categorical(StepCdf::from_masses(*mp_.support, mass), cap_);
        break;
      }
    }
  }

  MarketParams mp_;
  Family family_;
  std::optional<double> cap_;
  double sigma_;
  double sum_ = 0.0;
  std::size_t n_ = 0;
  std::vector<long> counts_;
  std::optional<ParametricCdf> fit_;
};

struct RateOrder {
  double order;
  double rate;  // lambda_t of the exponential whose quantile reproduces the uncapped order
};

/// f_t(w) = (t - 1)((s/w)^{1/t} - 1) / ln(s/w).
inline double opstats_factor(double w, double s, long t) {
  const double x = s / w;
  return static_cast<double>(t - 1) * std::expm1(std::log(x) / static_cast<double>(t)) / std::log(x);
}

/// Operational-statistics order from the sample sum of n = t - 1 observations.
inline RateOrder opstats_order_from_sum(double sum, std::size_t n, double w, double s, long t,
                                        std::optional<double> cap = std::nullopt) {
  if (!(w > 0.0 && w < s)) throw std::invalid_argument("opstats_order: need 0 < w < s");
  if (t < 2) throw std::invalid_argument("opstats_order: need t >= 2");
  if (n == 0) throw std::invalid_argument("opstats_order: no samples");
  if (!(sum > 0.0)) throw std::invalid_argument("opstats_order: sample sum must be positive");
  const double mean = sum / static_cast<double>(n);
  const double uncapped = static_cast<double>(t - 1) * std::expm1(std::log(s / w) / static_cast<double>(t)) * mean;
  const double rate = std::log(s / w) / uncapped;
  return {cap ? std::min(uncapped, *cap) : uncapped, rate};
}

/// Operational-statistics order for exponential demand.
inline RateOrder opstats_order(const std::vector<double>& samples, double w, double s, long t,
                               std::optional<double> cap = std::nullopt) {
  double sum = 0.0;
  for (double x : samples) sum += x;
  return opstats_order_from_sum(sum, samples.size(), w, s, t, cap);
}

/// Bayesian order from the sample sum, gamma(alpha, beta) prior on the exponential rate.
inline RateOrder bayes_order_from_sum(double sum, std::size_t n, double w, double s, double prior_alpha,
                                      double prior_beta, std::optional<double> cap = std::nullopt) {
  if (!(w > 0.0 && w < s)) throw std::invalid_argument("bayes_order: need 0 < w < s");
  if (!(prior_alpha > 0.0 && prior_beta > 0.0)) throw std::invalid_argument("bayes_order: prior must be positive");
  const double shape = prior_alpha + static_cast<double>(n);
  const double uncapped = (prior_beta + sum) * std::expm1(std::log(s / w) / shape);
  const double rate = std::log(s / w) / uncapped;
  return {cap ? std::min(uncapped, *cap) : uncapped, rate};
}

/// Bayesian order under a gamma(alpha, beta) prior on the exponential rate.
inline RateOrder bayes_order(const std::vector<double>& samples, double w, double s, double prior_alpha,
                             double prior_beta, std::optional<double> cap = std::nullopt) {
  double sum = 0.0;
  for (double x : samples) sum += x;
  return bayes_order_from_sum(sum, samples.size(), w, s, prior_alpha, prior_beta, cap);
}

/// Shared shape of the operational-statistics and Bayesian retailers: both
/// perceive an exponential distribution whose quantile gives their order.
class ExponentialRuleRetailer : public RetailerPolicy {
 public:
  ExponentialRuleRetailer(MarketParams mp, std::optional<double> cap) : mp_(std::move(mp)), cap_(cap) {}

  Perceived respond(long t, double w) override {
    if (w > 0.0 && w < mp_.s) {
      if (auto r = rate(t, w)) rate_ = *r;
    }
    Cdf f = rate_ ? Cdf(ParametricCdf::exponential(*rate_, cap_)) : Cdf(fallback_cdf(mp_));
    const double q = best_response_order(f, w, mp_.s);
    return {std::move(f), q};
  }

  void record(const HistoryEntry& h) override {
    RetailerPolicy::record(h);
    sum_ += h.xi;
    ++count_;
  }

 protected:
  virtual std::optional<double> rate(long t, double w) const = 0;

  MarketParams mp_;
  std::optional<double> cap_;
  double sum_ = 0.0;
  std::size_t count_ = 0;
  std::optional<double> rate_;
};

class OpStatsRetailer : public ExponentialRuleRetailer {
 public:
  using ExponentialRuleRetailer::ExponentialRuleRetailer;
  std::string name() const override { return "opstats"; }

 protected:
  std::optional<double> rate(long t, double w) const override {
    if (t < 2 || count_ == 0 || !(sum_ > 0.0)) return std::nullopt;
    return opstats_order_from_sum(sum_, count_, w, mp_.s, t).rate;
  }
};

class BayesRetailer : public ExponentialRuleRetailer {
 public:
  BayesRetailer(MarketParams mp, std::optional<double> cap, double prior_alpha, double prior_beta)
      : ExponentialRuleRetailer(std::move(mp), cap), alpha_(prior_alpha), beta_(prior_beta) {
    if (!(alpha_ > 0.0 && beta_ > 0.0)) throw std::invalid_argument("bayes: prior parameters must be positive");
  }
  std::string name() const override { return "bayes"; }

 protected:
  std::optional<double> rate(long, double w) const override {
    return bayes_order_from_sum(sum_, count_, w, mp_.s, alpha_, beta_).rate;
  }

 private:
  double alpha_;
  double beta_;
};

/// Perceived distribution given exogenously per round; the retailer only best-responds.
class ScriptedRetailer : public RetailerPolicy {
 public:
  ScriptedRetailer(double s, std::function<Cdf(long)> script, std::string label = "scripted")
      : s_(s), script_(std::move(script)), label_(std::move(label)) {}
  std::string name() const override { return label_; }

  Perceived respond(long t, double w) override {
    Cdf f = script_(t);
    const double q = best_response_order(f, w, s_);
    return {std::move(f), q};
  }

 private:
  double s_;
  std::function<Cdf(long)> script_;
  std::string label_;
};

}  // namespace lunasim
