#pragma once

// Experiment configuration: flat `key = value` files with dotted section
// prefixes, a scenario catalog, validation and an exact text echo.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lunasim/engine.hpp"

namespace lunasim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DemandKind { Stationary, Sinusoidal, Parametric, Bootstrap };
enum class KRule { Opt, Obl, Fixed };

struct DemandSpec {
  DemandKind model = DemandKind::Sinusoidal;
  double V = 1.0;
  std::vector<double> support{0.0, 1.0};  // stationary law
  std::vector<double> probs{0.5, 0.5};
  Family family = Family::Exponential;    // parametric law
  double lambda = 1.0;
  double mu = 0.0;
  double sigma = 1.0;
  std::optional<double> upper;            // truncation of parametric draws
  std::string dataset;                    // weekly sales CSV for bootstrap

  friend bool operator==(const DemandSpec&, const DemandSpec&) = default;
};

struct ExperimentSpec {
  std::string scenario;
  long T = 10000;
  std::uint64_t seed = 1;
  int replications = 20;
  int threads = 0;
  MarketParams market;
  std::vector<SupplierKind> policies{SupplierKind::Stat};
  KRule k_rule = KRule::Opt;
  int K = 1;  // used when k_rule is Fixed
  int N = 10;
  double V = 1.0;  // variation budget assumed by opt-K
  std::optional<double> budget;
  RetailerSpec retailer;
  DemandSpec demand;
  std::string output_dir = "out";
  bool csv = true;
  bool svg = false;
  double window_lo = 0.1;  // slope window as fractions of T
  double window_hi = 1.0;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

// ---------------------------------------------------------------------------
// Value formatting and parsing.

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::string_view trim_ws(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("expected a number, got '" + std::string(v) + "'");
  return x;
}

inline long long parse_integer(std::string_view v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    // Accept integral values written in floating notation, e.g. 1e5.
    const double d = parse_double(v);
    if (d != std::floor(d) || std::fabs(d) > 9e15) throw ConfigError("expected an integer, got '" + std::string(v) + "'");
    return static_cast<long long>(d);
  }
  return x;
}

inline bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected true or false, got '" + std::string(v) + "'");
}

inline std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(trim_ws(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

inline std::vector<double> parse_doubles(std::string_view v) {
  std::vector<double> out;
  for (auto item : split_list(v)) out.push_back(parse_double(item));
  return out;
}

inline std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

template <typename E>
struct Names {
  std::vector<std::pair<std::string, E>> items;

  E parse(std::string_view v, const char* what) const {
    for (const auto& [name, e] : items)
      if (name == v) return e;
    std::string msg = "unknown " + std::string(what) + " '" + std::string(v) + "'; expected one of:";
    for (const auto& it : items) msg += " " + it.first;
    throw ConfigError(msg);
  }
  std::string name(E e) const {
    for (const auto& [name, x] : items)
      if (x == e) return name;
    return "?";
  }
};

inline const Names<SupplierKind>& supplier_names() {
  static const Names<SupplierKind> n{{{"stat", SupplierKind::Stat},
                                      {"luna", SupplierKind::Luna},
                                      {"lunac", SupplierKind::Lunac},
                                      {"lunacn", SupplierKind::LunacN},
                                      {"lunaf", SupplierKind::Lunaf},
                                      {"exp3s", SupplierKind::Exp3S},
                                      {"restart-bandit", SupplierKind::RestartBandit}}};
  return n;
}

inline const Names<RetailerKind>& retailer_names() {
  static const Names<RetailerKind> n{{{"saa", RetailerKind::Saa},
                                      {"dro", RetailerKind::Dro},
                                      {"mle", RetailerKind::Mle},
                                      {"opstats", RetailerKind::OpStats},
                                      {"bayes", RetailerKind::Bayes},
                                      {"scripted", RetailerKind::Scripted},
                                      {"full-knowledge", RetailerKind::Scripted}}};
  return n;
}

inline const Names<Divergence>& divergence_names() {
  static const Names<Divergence> n{{{"kl", Divergence::KL}, {"chi2", Divergence::ChiSq}, {"hellinger", Divergence::Hellinger}}};
  return n;
}

inline const Names<Family>& family_names() {
  static const Names<Family> n{{{"poisson", Family::Poisson},
                                {"exponential", Family::Exponential},
                                {"normal", Family::Normal},
                                {"categorical", Family::Categorical}}};
  return n;
}

inline const Names<DemandKind>& demand_names() {
  static const Names<DemandKind> n{{{"stationary", DemandKind::Stationary},
                                    {"sinusoidal", DemandKind::Sinusoidal},
                                    {"parametric", DemandKind::Parametric},
                                    {"bootstrap", DemandKind::Bootstrap}}};
  return n;
}

/// One configuration key: how to read it and how to write it back.
struct Field {
  std::string key;
  std::function<void(ExperimentSpec&, std::string_view)> set;
  std::function<std::optional<std::string>(const ExperimentSpec&)> get;
};

inline std::optional<std::string> opt_double(const std::optional<double>& x) {
  if (!x) return std::nullopt;
  return format_double(*x);
}

inline const std::vector<Field>& fields() {
  using S = ExperimentSpec;
  using V = std::string_view;
  using O = std::optional<std::string>;
  static const std::vector<Field> f{
      {"T", [](S& s, V v) { s.T = static_cast<long>(parse_integer(v)); }, [](const S& s) -> O { return std::to_string(s.T); }},
      {"seed", [](S& s, V v) { s.seed = static_cast<std::uint64_t>(parse_integer(v)); },
       [](const S& s) -> O { return std::to_string(s.seed); }},
      {"replications", [](S& s, V v) { s.replications = static_cast<int>(parse_integer(v)); },
       [](const S& s) -> O { return std::to_string(s.replications); }},
      {"threads", [](S& s, V v) { s.threads = static_cast<int>(parse_integer(v)); },
       [](const S& s) -> O { return std::to_string(s.threads); }},
      {"market.s", [](S& s, V v) { s.market.s = parse_double(v); }, [](const S& s) -> O { return format_double(s.market.s); }},
      {"market.c", [](S& s, V v) { s.market.c = parse_double(v); }, [](const S& s) -> O { return format_double(s.market.c); }},
      {"market.xi_bar", [](S& s, V v) { s.market.xi_bar = parse_double(v); },
       [](const S& s) -> O { return format_double(s.market.xi_bar); }},
      {"market.support", [](S& s, V v) { s.market.support = parse_doubles(v); },
       [](const S& s) -> O {
         if (!s.market.support) return std::nullopt;
         return join_doubles(*s.market.support);
       }},
      {"supplier.policy",
       [](S& s, V v) {
         s.policies.clear();
         for (auto item : split_list(v)) s.policies.push_back(supplier_names().parse(item, "supplier policy"));
       },
       [](const S& s) -> O {
         std::string out;
         for (std::size_t i = 0; i < s.policies.size(); ++i) out += (i ? "," : "") + supplier_names().name(s.policies[i]);
         return out;
       }},
      {"supplier.K",
       [](S& s, V v) {
         if (v == "opt") {
           s.k_rule = KRule::Opt;
         } else if (v == "obl") {
           s.k_rule = KRule::Obl;
         } else {
           s.k_rule = KRule::Fixed;
           s.K = static_cast<int>(parse_integer(v));
         }
       },
       [](const S& s) -> O {
         switch (s.k_rule) {
           case KRule::Opt: return "opt";
           case KRule::Obl: return "obl";
           case KRule::Fixed: return std::to_string(s.K);
         }
         return "opt";
       }},
      {"supplier.N", [](S& s, V v) { s.N = static_cast<int>(parse_integer(v)); }, [](const S& s) -> O { return std::to_string(s.N); }},
      {"supplier.V", [](S& s, V v) { s.V = parse_double(v); }, [](const S& s) -> O { return format_double(s.V); }},
      {"supplier.budget", [](S& s, V v) { s.budget = parse_double(v); }, [](const S& s) -> O { return opt_double(s.budget); }},
      {"retailer.policy", [](S& s, V v) { s.retailer.kind = retailer_names().parse(v, "retailer policy"); },
       [](const S& s) -> O { return retailer_names().name(s.retailer.kind); }},
      {"retailer.divergence", [](S& s, V v) { s.retailer.divergence = divergence_names().parse(v, "divergence"); },
       [](const S& s) -> O { return divergence_names().name(s.retailer.divergence); }},
      {"retailer.alpha", [](S& s, V v) { s.retailer.alpha = parse_double(v); },
       [](const S& s) -> O { return format_double(s.retailer.alpha); }},
      {"retailer.family", [](S& s, V v) { s.retailer.family = family_names().parse(v, "family"); },
       [](const S& s) -> O { return family_names().name(s.retailer.family); }},
      {"retailer.sigma", [](S& s, V v) { s.retailer.sigma = parse_double(v); },
       [](const S& s) -> O { return format_double(s.retailer.sigma); }},
      {"retailer.prior_alpha", [](S& s, V v) { s.retailer.prior_alpha = parse_double(v); },
       [](const S& s) -> O { return format_double(s.retailer.prior_alpha); }},
      {"retailer.prior_beta", [](S& s, V v) { s.retailer.prior_beta = parse_double(v); },
       [](const S& s) -> O { return format_double(s.retailer.prior_beta); }},
      {"retailer.cap", [](S& s, V v) { s.retailer.cap = parse_double(v); }, [](const S& s) -> O { return opt_double(s.retailer.cap); }},
      {"demand.model", [](S& s, V v) { s.demand.model = demand_names().parse(v, "demand model"); },
       [](const S& s) -> O { return demand_names().name(s.demand.model); }},
      {"demand.V", [](S& s, V v) { s.demand.V = parse_double(v); }, [](const S& s) -> O { return format_double(s.demand.V); }},
      {"demand.support", [](S& s, V v) { s.demand.support = parse_doubles(v); },
       [](const S& s) -> O { return join_doubles(s.demand.support); }},
      {"demand.probs", [](S& s, V v) { s.demand.probs = parse_doubles(v); },
       [](const S& s) -> O { return join_doubles(s.demand.probs); }},
      {"demand.family", [](S& s, V v) { s.demand.family = family_names().parse(v, "family"); },
       [](const S& s) -> O { return family_names().name(s.demand.family); }},
      {"demand.lambda", [](S& s, V v) { s.demand.lambda = parse_double(v); },
       [](const S& s) -> O { return format_double(s.demand.lambda); }},
      {"demand.mu", [](S& s, V v) { s.demand.mu = parse_double(v); }, [](const S& s) -> O { return format_double(s.demand.mu); }},
      {"demand.sigma", [](S& s, V v) { s.demand.sigma = parse_double(v); },
       [](const S& s) -> O { return format_double(s.demand.sigma); }},
      {"demand.upper", [](S& s, V v) { s.demand.upper = parse_double(v); }, [](const S& s) -> O { return opt_double(s.demand.upper); }},
      {"demand.dataset", [](S& s, V v) { s.demand.dataset = std::string(v); },
       [](const S& s) -> O {
         if (s.demand.dataset.empty()) return std::nullopt;
         return s.demand.dataset;
       }},
      {"output.dir", [](S& s, V v) { s.output_dir = std::string(v); }, [](const S& s) -> O { return s.output_dir; }},
      {"output.csv", [](S& s, V v) { s.csv = parse_bool(v); }, [](const S& s) -> O { return s.csv ? "true" : "false"; }},
      {"output.svg", [](S& s, V v) { s.svg = parse_bool(v); }, [](const S& s) -> O { return s.svg ? "true" : "false"; }},
      {"output.window",
       [](S& s, V v) {
         const auto xs = parse_doubles(v);
         if (xs.size() != 2) throw ConfigError("output.window expects 'lo,hi' as fractions of T");
         s.window_lo = xs[0];
         s.window_hi = xs[1];
       },
       [](const S& s) -> O { return format_double(s.window_lo) + "," + format_double(s.window_hi); }},
  };
  return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenario catalog.

struct Scenario {
  std::string name;
  std::string description;
  std::function<ExperimentSpec()> make;
};

inline const std::vector<Scenario>& scenario_catalog() {
  static const std::vector<Scenario> catalog{
      {"luna-discrete", "LUNA (opt-K) against a scripted Bernoulli retailer with sinusoidal drift",
       [] {
         ExperimentSpec s;
         s.T = 100000;
         s.policies = {SupplierKind::Luna};
         s.retailer.kind = RetailerKind::Scripted;
         s.demand.model = DemandKind::Sinusoidal;
         return s;
       }},
      {"compare-scripted", "LUNAF vs Exp3.S vs restart bandit, scripted Bernoulli retailer, d = ceil(sqrt T) prices",
       [] {
         ExperimentSpec s;
         s.T = 100000;
         s.policies = {SupplierKind::Lunaf, SupplierKind::Exp3S, SupplierKind::RestartBandit};
         s.retailer.kind = RetailerKind::Scripted;
         s.demand.model = DemandKind::Sinusoidal;
         return s;
       }},
      {"compare-saa", "LUNAF vs Exp3.S vs restart bandit, SAA retailer facing sinusoidal Bernoulli demand",
       [] {
         ExperimentSpec s;
         s.T = 100000;
         s.policies = {SupplierKind::Lunaf, SupplierKind::Exp3S, SupplierKind::RestartBandit};
         s.retailer.kind = RetailerKind::Saa;
         s.demand.model = DemandKind::Sinusoidal;
         return s;
       }},
      {"avocado", "LUNAF vs baselines, SAA retailer, demand bootstrapped from monthly pools of weekly sales",
       [] {
         ExperimentSpec s;
         s.T = 1095;
         s.policies = {SupplierKind::Lunaf, SupplierKind::Exp3S, SupplierKind::RestartBandit};
         s.retailer.kind = RetailerKind::Saa;
         s.demand.model = DemandKind::Bootstrap;
         s.demand.dataset = "data/weekly_sales_synthetic.csv";
         return s;
       }},
      {"custom", "no preset; every setting comes from the file", [] { return ExperimentSpec{}; }},
  };
  return catalog;
}

inline const Scenario* find_scenario(std::string_view name) {
  for (const auto& s : scenario_catalog())
    if (s.name == name) return &s;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Validation, parsing and echo.

/// Throws ConfigError naming the offending key.
inline void validate(const ExperimentSpec& s) {
  const auto fail = [](const std::string& key, const std::string& msg) { throw ConfigError(key + ": " + msg); };
  if (!find_scenario(s.scenario)) {
    std::string msg = "unknown scenario '" + s.scenario + "'; expected one of:";
    for (const auto& sc : scenario_catalog()) msg += " " + sc.name;
    fail("scenario", msg);
  }
  if (s.T < 1) fail("T", "must satisfy T ≥ 1");
  if (s.replications < 1) fail("replications", "must be at least 1");
  if (s.threads < 0) fail("threads", "must be non-negative");
  try {
    s.market.validate();
  } catch (const std::invalid_argument& e) {
    fail("market", e.what());
  }
  if (s.policies.empty()) fail("supplier.policy", "at least one policy is required");
  if (s.k_rule == KRule::Fixed && s.K < 1) fail("supplier.K", "must be opt, obl or a positive integer");
  if (s.N < 1) fail("supplier.N", "must be at least 1");
  if (!(s.V > 0.0)) fail("supplier.V", "must be positive");
  if (s.budget && !(*s.budget >= 0.0)) fail("supplier.budget", "must be non-negative");
  if (!(s.retailer.alpha > 0.0 && s.retailer.alpha < 0.5)) fail("retailer.alpha", "must lie in (0, 0.5)");
  if (!(s.retailer.sigma > 0.0)) fail("retailer.sigma", "must be positive");
  if (!(s.retailer.prior_alpha > 0.0 && s.retailer.prior_beta > 0.0)) fail("retailer.prior_alpha", "prior must be positive");
  if (s.retailer.cap && !(*s.retailer.cap > 0.0)) fail("retailer.cap", "must be positive");
  if (s.retailer.kind == RetailerKind::Scripted && s.demand.model == DemandKind::Parametric)
    fail("retailer.policy", "a scripted retailer needs a demand model with a closed-form law");
  if (s.retailer.kind == RetailerKind::Mle && s.retailer.family == Family::Categorical && !s.market.support &&
      s.demand.model == DemandKind::Parametric)
    fail("retailer.family", "categorical fit needs market.support");
  if (!(s.demand.V > 0.0)) fail("demand.V", "must be positive");
  if (s.demand.model == DemandKind::Stationary) {
    if (s.demand.support.empty() || s.demand.support.size() != s.demand.probs.size())
      fail("demand.probs", "must have one probability per support point");
    double total = 0.0;
    for (double p : s.demand.probs) {
      if (!(p >= 0.0)) fail("demand.probs", "probabilities must be non-negative");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) fail("demand.probs", "probabilities must sum to 1");
    for (std::size_t i = 0; i < s.demand.support.size(); ++i)
      if (s.demand.support[i] < 0.0 || (i > 0 && !(s.demand.support[i] > s.demand.support[i - 1])))
        fail("demand.support", "must be non-negative and strictly increasing");
  }
  if (s.demand.model == DemandKind::Parametric) {
    if (s.demand.family == Family::Categorical) fail("demand.family", "use demand.model = stationary for categorical laws");
    if (s.demand.family != Family::Normal && !(s.demand.lambda > 0.0)) fail("demand.lambda", "must be positive");
    if (!(s.demand.sigma > 0.0)) fail("demand.sigma", "must be positive");
    if (s.demand.upper && !(*s.demand.upper > 0.0)) fail("demand.upper", "must be positive");
  }
  if (s.demand.model == DemandKind::Bootstrap && s.demand.dataset.empty()) fail("demand.dataset", "required for bootstrap demand");
  if (s.output_dir.empty()) fail("output.dir", "must not be empty");
  if (!(s.window_lo > 0.0 && s.window_lo < s.window_hi && s.window_hi <= 1.0))
    fail("output.window", "need 0 < lo < hi <= 1");
}

/// Parses a configuration. The scenario preset supplies defaults; the other
/// keys override it in file order. Errors carry the line number.
inline ExperimentSpec parse_config(std::istream& in) {
  struct Entry {
    std::string key;
    std::string value;
    int line;
  };
  std::vector<Entry> entries;
  std::map<std::string, int> seen;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = detail::trim_ws(raw);
    if (lineno == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key(detail::trim_ws(line.substr(0, eq)));
    std::string value(detail::trim_ws(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (const auto it = seen.find(key); it != seen.end())
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "' (first set on line " +
                        std::to_string(it->second) + ")");
    seen[key] = lineno;
    entries.push_back({std::move(key), std::move(value), lineno});
  }

  const auto sc = std::find_if(entries.begin(), entries.end(), [](const Entry& e) { return e.key == "scenario"; });
  if (sc == entries.end()) throw ConfigError("missing required key 'scenario'");
  const Scenario* preset = find_scenario(sc->value);
  if (!preset) {
    std::string msg = "line " + std::to_string(sc->line) + ": unknown scenario '" + sc->value + "'; expected one of:";
    for (const auto& s : scenario_catalog()) msg += " " + s.name;
    throw ConfigError(msg);
  }
  ExperimentSpec spec = preset->make();
  spec.scenario = sc->value;

  for (const auto& e : entries) {
    if (e.key == "scenario") continue;
    const auto& fs = detail::fields();
    const auto f = std::find_if(fs.begin(), fs.end(), [&](const detail::Field& x) { return x.key == e.key; });
    if (f == fs.end()) throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    try {
      f->set(spec, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError("line " + std::to_string(e.line) + ": " + e.key + ": " + err.what());
    }
  }

  try {
    validate(spec);
  } catch (const ConfigError& err) {
    const std::string msg = err.what();
    const auto colon = msg.find(':');
    const std::string key = msg.substr(0, colon);
    std::string where;
    for (const auto& [k, l] : seen)
      if (k == key || k.rfind(key + ".", 0) == 0) where = "line " + std::to_string(l) + ": ";
    throw ConfigError(where + msg);
  }
  return spec;
}

inline ExperimentSpec parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

/// Every setting, defaults included, in the configuration format.
inline std::string emit_config(const ExperimentSpec& s) {
  std::string out = "scenario = " + s.scenario + "\n";
  for (const auto& f : detail::fields())
    if (auto v = f.get(s)) out += f.key + " = " + *v + "\n";
  return out;
}

}  // namespace lunasim
