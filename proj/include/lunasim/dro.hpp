#pragma once

// Worst-case expected newsvendor profit over a phi-divergence ball around an
// empirical distribution, solved through the Lagrangian dual
//   sup_{lambda >= 0, eta} eta - lambda*eps - lambda * sum_i p_i phi*((eta - r_i) / lambda).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "lunasim/market.hpp"
#include "lunasim/special.hpp"

namespace lunasim {

enum class Divergence { KL, ChiSq, Hellinger };

inline std::string to_string(Divergence d) {
  switch (d) {
    case Divergence::KL: return "kl";
    case Divergence::ChiSq: return "chi2";
    case Divergence::Hellinger: return "hellinger";
  }
  return "?";
}

/// phi(x) for each divergence: KL x ln x - x + 1, chi-square (x - 1)^2,
/// Hellinger (sqrt(x) - 1)^2.
inline double phi(Divergence d, double x) {
  switch (d) {
    case Divergence::KL: return x > 0.0 ? x * std::log(x) - x + 1.0 : 1.0;
    case Divergence::ChiSq: return (x - 1.0) * (x - 1.0);
    case Divergence::Hellinger: {
      const double r = std::sqrt(x) - 1.0;
      return r * r;
    }
  }
  return 0.0;
}

inline double phi_conjugate(Divergence d, double y) {
  switch (d) {
    case Divergence::KL: return std::expm1(y);
    case Divergence::ChiSq: return y >= -2.0 ? y + 0.25 * y * y : -1.0;
    case Divergence::Hellinger: return y < 1.0 ? y / (1.0 - y) : kInf;
  }
  return 0.0;
}

/// Derivative of the conjugate; gives the likelihood ratio of the worst case.
inline double phi_conjugate_slope(Divergence d, double y) {
  switch (d) {
    case Divergence::KL: return std::exp(y);
    case Divergence::ChiSq: return std::max(0.0, 1.0 + 0.5 * y);
    case Divergence::Hellinger: return y < 1.0 ? 1.0 / ((1.0 - y) * (1.0 - y)) : kInf;
  }
  return 0.0;
}

/// Divergence sum_i p_i phi(f_i / p_i) between two weight vectors on common atoms.
inline double divergence(Divergence d, const std::vector<double>& f, const std::vector<double>& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * phi(d, f[i] / p[i]);
  return acc;
}

/// Confidence radius chi2_{1,1-2 alpha} / (t - 1); the first round uses 1.
inline double dro_epsilon(double alpha, long t) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("dro_epsilon: alpha must lie in (0, 0.5)");
  if (t < 1) throw std::invalid_argument("dro_epsilon: t must be at least 1");
  if (t == 1) return 1.0;
  return chi_square_quantile(1.0, 1.0 - 2.0 * alpha) / static_cast<double>(t - 1);
}

struct InnerSolution {
  double value = 0.0;          // worst-case expected reward
  std::vector<double> weights;  // worst-case probabilities on the atoms
  double lambda = 0.0;
};

class DroSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct DualPoint {
  double value;
  double eta;
};

/// Dual objective maximized over eta for a fixed lambda > 0.
inline DualPoint dual_at(Divergence d, const std::vector<double>& p, const std::vector<double>& r, double eps,
                         double lambda) {
  const double rmin = *std::min_element(r.begin(), r.end());
  const double rmax = *std::max_element(r.begin(), r.end());
  if (d == Divergence::KL) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * std::exp(-(r[i] - rmin) / lambda);
    const double eta = rmin - lambda * std::log(acc);
    return {eta - lambda * eps, eta};
  }
  // The eta-derivative 1 - sum_i p_i phi*'((eta - r_i) / lambda) is decreasing.
  double lo = d == Divergence::ChiSq ? rmin - 2.0 * lambda : rmin;
  double hi = d == Divergence::ChiSq ? rmax : rmin + lambda;
  const auto slope = [&](double eta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * phi_conjugate_slope(d, (eta - r[i]) / lambda);
    return 1.0 - acc;
  };
  int it = 0;
  for (; it < 10000 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  if (it >= 10000) throw DroSolveError("dro: inner search did not converge");
  const double eta = lo;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * phi_conjugate(d, (eta - r[i]) / lambda);
  return {eta - lambda * eps - lambda * acc, eta};
}

}  // namespace detail

/// inf { sum_i f_i r_i : D_phi(f || p) <= eps } over weight vectors on the atoms.
inline InnerSolution dro_inner(Divergence d, const std::vector<double>& p, const std::vector<double>& r, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("dro: eps must be non-negative");
  if (p.empty() || p.size() != r.size()) throw std::invalid_argument("dro: weights and rewards must match");
  InnerSolution sol;
  if (eps == 0.0) {
    sol.weights = p;
    for (std::size_t i = 0; i < p.size(); ++i) sol.value += p[i] * r[i];
    return sol;
  }

  // Golden section over log(lambda); the dual is concave in lambda.
  constexpr double kGold = 0.6180339887498949;
  double a = std::log(1e-9);
  double b = std::log(1e6);
  const auto g = [&](double ll) { return detail::dual_at(d, p, r, eps, std::exp(ll)).value; };
  double x1 = b - kGold * (b - a);
  double x2 = a + kGold * (b - a);
  double f1 = g(x1);
  double f2 = g(x2);
  int it = 0;
  for (; it < 10000 && b - a > 1e-12; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGold * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGold * (b - a);
      f1 = g(x1);
    }
  }
  if (it >= 10000) throw DroSolveError("dro: dual search did not converge");
  const double lambda = std::exp(0.5 * (a + b));
  const auto best = detail::dual_at(d, p, r, eps, lambda);

  // Primal recovery from the conjugate slope at the dual optimum.
  sol.lambda = lambda;
  sol.weights.resize(p.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sol.weights[i] = p[i] * phi_conjugate_slope(d, (best.eta - r[i]) / lambda);
    if (!std::isfinite(sol.weights[i])) sol.weights[i] = 0.0;
    total += sol.weights[i];
  }
  if (!(total > 0.0)) {
    // Ball contains the point mass on the smallest reward.
    const auto k = static_cast<std::size_t>(std::min_element(r.begin(), r.end()) - r.begin());
    std::fill(sol.weights.begin(), sol.weights.end(), 0.0);
    sol.weights[k] = 1.0;
    total = 1.0;
  }
  for (double& w : sol.weights) w /= total;
  sol.value = best.value;
  return sol;
}

struct DroDecision {
  double order = 0.0;      // maximizer of the worst-case objective
  StepCdf worst;           // worst-case distribution at that order
  double value = 0.0;      // worst-case expected profit at that order
};

/// max_q min_{F in ball} E_F[s min(q, xi) - w q], scanning q over {0}, the
/// atoms and the optional cap.
inline DroDecision dro_worst_case(const StepCdf& empirical, Divergence d, double eps, double w, const MarketParams& mp,
                                  std::optional<double> cap = std::nullopt) {
  if (!(eps >= 0.0)) throw std::invalid_argument("dro_worst_case: eps must be non-negative");
  const auto& atoms = empirical.support();
  std::vector<double> p(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) p[i] = empirical.cum()[i] - empirical.mass_below(i);

  if (eps == 0.0) {
    DroDecision out{best_response_order(empirical, w, mp.s), empirical, 0.0};
    for (std::size_t i = 0; i < atoms.size(); ++i) out.value += p[i] * (mp.s * std::min(out.order, atoms[i]) - w * out.order);
    return out;
  }

  std::vector<double> candidates{0.0};
  for (double a : atoms)
    if (a > 0.0 && (!cap || a < *cap)) candidates.push_back(a);
  if (cap) candidates.push_back(*cap);

  DroDecision out;
  bool have = false;
  std::vector<double> r(atoms.size());
  for (double q : candidates) {
    for (std::size_t i = 0; i < atoms.size(); ++i) r[i] = mp.s * std::min(q, atoms[i]) - w * q;
    const auto sol = dro_inner(d, p, r, eps);
    if (!have || sol.value > out.value) {
      out.order = q;
      out.value = sol.value;
      out.worst = StepCdf::from_masses(atoms, sol.weights);
      have = true;
    }
  }
  return out;
}

}  // namespace lunasim
