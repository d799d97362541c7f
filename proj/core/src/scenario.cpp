#include "hrafl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hrafl/aggregators.hpp"
#include "hrafl/error.hpp"

namespace hrafl {

namespace {

template <typename Fn>
void rethrow_as(const std::string& key, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

bool uses_rule(const ScenarioConfig& cfg, const std::string& rule) {
  if (cfg.aggregator.rule == rule) return true;
  const auto& rules = cfg.experiments.compare_rules;
  return std::find(rules.begin(), rules.end(), rule) != rules.end();
}

}  // namespace

const std::vector<std::string>& known_rule_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> all = memoryless_rule_names();
    all.push_back("hra");
    std::sort(all.begin(), all.end());
    return all;
  }();
  return names;
}

std::string_view to_string(PartitionMode mode) {
  return mode == PartitionMode::uniform ? "uniform" : "dirichlet";
}

std::string_view to_string(DataSourceKind kind) {
  return kind == DataSourceKind::synthetic ? "synthetic" : "csv";
}

void resolve_defaults(ScenarioConfig& cfg) {
  const std::size_t m = cfg.clients;
  auto& agg = cfg.aggregator;
  if (!agg.krum_f) agg.krum_f = m >= 3 ? (m - 3) / 2 : 0;
  if (!agg.bulyan_f) agg.bulyan_f = m >= 3 ? (m - 3) / 4 : 0;
  if (!agg.trim_k) {
    const auto k = static_cast<std::size_t>(std::floor(0.2 * static_cast<double>(m)));
    agg.trim_k = std::min(k, m > 0 ? (m - 1) / 2 : 0);
  }
  if (!agg.multi_krum_m) agg.multi_krum_m = m >= *agg.krum_f + 3 ? m - *agg.krum_f - 2 : 1;
  if (cfg.data.source == DataSourceKind::synthetic && !cfg.roster.attack.trigger_count) {
    cfg.roster.attack.trigger_count = std::min<std::size_t>(5, cfg.data.synthetic.features);
  }
  cfg.hra.geomed = agg.geomed;

  auto& plan = cfg.experiments;
  if (plan.compare_rules.empty()) {
    plan.compare_rules = {"hra",  "simple_mean", "coordinate_median", "trimmed_mean",
                          "krum", "multi_krum",  "bulyan",            "geometric_median"};
  }
  if (plan.threshold_pairs.empty()) {
    plan.threshold_pairs = {{3.0, 7.0},  {2.0, 6.0},  {2.0, 7.0},  {3.0, 6.0},  {5.0, 6.0},
                            {5.0, 7.0},  {2.0, 10.0}, {3.0, 10.0}, {3.0, 20.0}, {2.0, 20.0},
                            {5.0, 10.0}, {5.0, 20.0}, {10.0, 20.0}};
  }
  if (plan.learning_rates.empty()) plan.learning_rates = {0.1, 0.01, 0.05, 0.2};
}

RuleConfig rule_config_for(const ScenarioConfig& cfg, const std::string& rule) {
  RuleConfig rc;
  rc.geomed = cfg.aggregator.geomed;
  rc.trim_k = cfg.aggregator.trim_k;
  rc.multi_krum_m = cfg.aggregator.multi_krum_m;
  rc.f = rule == "bulyan" ? cfg.aggregator.bulyan_f : cfg.aggregator.krum_f;
  return rc;
}

void ScenarioConfig::validate() const {
  if (name.empty()) throw ConfigError("name", "must not be empty");
  if (clients < 1) throw ConfigError("clients", "must be >= 1");
  if (rounds < 1) throw ConfigError("rounds", "must be >= 1");
  if (runs < 1) throw ConfigError("runs", "must be >= 1");
  if (threads < 1) throw ConfigError("threads", "must be >= 1");

  if (!(train.eta0 > 0.0)) throw ConfigError("train.eta0", "must be > 0");
  if (!(train.gamma > 0.0 && train.gamma <= 1.0)) throw ConfigError("train.gamma", "must lie in (0,1]");
  if (train.epochs < 1) throw ConfigError("train.epochs", "must be >= 1");

  if (data.source == DataSourceKind::synthetic) {
    rethrow_as("data.synthetic", [&] { data.synthetic.validate(); });
    if (data.synthetic.n_train < clients) {
      throw ConfigError("data.synthetic.n_train", "fewer training samples than clients");
    }
  } else {
    if (data.csv.train_path.empty()) throw ConfigError("data.csv.train", "path required");
    if (data.csv.label_column.empty()) throw ConfigError("data.csv.label_column", "must not be empty");
    if (data.csv.test_path.empty() &&
        !(data.csv.test_fraction > 0.0 && data.csv.test_fraction < 1.0)) {
      throw ConfigError("data.csv.test_fraction", "must lie in (0,1)");
    }
  }
  if (partition.mode == PartitionMode::dirichlet && !(partition.alpha > 0.0)) {
    throw ConfigError("partition.alpha", "must be > 0");
  }

  if (!(roster.malicious_fraction >= 0.0 && roster.malicious_fraction <= 1.0)) {
    throw ConfigError("attacks.malicious_fraction", "must lie in [0,1]");
  }
  if (roster.malicious_fraction * static_cast<double>(clients) >= 1.0 - 1e-9 &&
      roster.kinds.empty()) {
    throw ConfigError("attacks.kinds", "malicious clients requested but no attack kinds given");
  }
  if (!(roster.attack.noise_std > 0.0)) throw ConfigError("attacks.noise_std", "must be > 0");
  if (!(roster.attack.amplification > 0.0)) throw ConfigError("attacks.amplification", "must be > 0");
  if (!std::isfinite(roster.attack.trigger_magnitude)) {
    throw ConfigError("attacks.trigger_magnitude", "must be finite");
  }
  if (!(roster.attack.sybil_scale > 0.0)) throw ConfigError("attacks.sybil_scale", "must be > 0");
  if (data.source == DataSourceKind::synthetic && roster.attack.trigger_count &&
      *roster.attack.trigger_count > data.synthetic.features) {
    throw ConfigError("attacks.trigger_count", "exceeds the feature count");
  }

  const auto& known = known_rule_names();
  auto check_rule = [&](const std::string& rule, const std::string& key) {
    if (std::find(known.begin(), known.end(), rule) == known.end()) {
      std::string list;
      for (const auto& n : known) list += (list.empty() ? "" : ", ") + n;
      throw ConfigError(key, "unknown rule '" + rule + "' (available: " + list + ")");
    }
  };
  check_rule(aggregator.rule, "aggregator.rule");
  std::set<std::string> seen;
  for (const auto& rule : experiments.compare_rules) {
    check_rule(rule, "experiments.compare_rules");
    if (!seen.insert(rule).second) {
      throw ConfigError("experiments.compare_rules", "duplicate rule '" + rule + "'");
    }
  }

  rethrow_as("aggregator.geomed", [&] { aggregator.geomed.validate(); });
  if ((uses_rule(*this, "krum") || uses_rule(*this, "multi_krum")) && aggregator.krum_f &&
      clients < *aggregator.krum_f + 3) {
    throw ConfigError("aggregator.krum_f", "krum needs clients >= krum_f + 3");
  }
  if (uses_rule(*this, "multi_krum") && aggregator.krum_f && aggregator.multi_krum_m &&
      (*aggregator.multi_krum_m < 1 || clients < *aggregator.krum_f + 3 ||
       *aggregator.multi_krum_m > clients - *aggregator.krum_f - 2)) {
    throw ConfigError("aggregator.multi_krum_m", "must lie in [1, clients - krum_f - 2]");
  }
  if (uses_rule(*this, "bulyan") && aggregator.bulyan_f && clients < 4 * *aggregator.bulyan_f + 3) {
    throw ConfigError("aggregator.bulyan_f", "bulyan needs clients >= 4 * bulyan_f + 3");
  }
  if (uses_rule(*this, "trimmed_mean") && aggregator.trim_k && 2 * *aggregator.trim_k >= clients) {
    throw ConfigError("aggregator.trim_k", "needs 2 * trim_k < clients");
  }

  if (!(hra.t_low > 0.0)) throw ConfigError("hra.t_low", "must be > 0");
  if (!(hra.t_low < hra.t_high)) {
    throw ConfigError("hra.t_low/hra.t_high", "t_low must be strictly below t_high");
  }
  if (!(hra.rho >= 0.0 && hra.rho <= 1.0)) throw ConfigError("hra.rho", "must lie in [0,1]");
  if (!(hra.initial_reputation >= 0.0 && hra.initial_reputation <= 1.0)) {
    throw ConfigError("hra.initial_reputation", "must lie in [0,1]");
  }

  for (const auto& [lo, hi] : experiments.threshold_pairs) {
    if (!(lo > 0.0 && lo < hi)) {
      throw ConfigError("experiments.threshold_pairs", "each pair needs 0 < t_low < t_high");
    }
  }
  for (double lr : experiments.learning_rates) {
    if (!(lr > 0.0)) throw ConfigError("experiments.learning_rates", "entries must be > 0");
  }
}

}  // namespace hrafl
