#include "hrafl/hybrid_reputation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hrafl/error.hpp"

namespace hrafl {

namespace {

std::vector<double> anomaly_vector(const ModelParams& params, bool include_bias) {
  std::vector<double> v = params.w;
  if (include_bias) v.push_back(params.b);
  return v;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::string_view to_string(HraVariant variant) {
  switch (variant) {
    case HraVariant::full: return "full";
    case HraVariant::anomaly_only: return "anomaly_only";
    case HraVariant::reputation_only: return "reputation_only";
  }
  return "unknown";
}

HraVariant parse_hra_variant(std::string_view name) {
  if (name == "full") return HraVariant::full;
  if (name == "anomaly_only") return HraVariant::anomaly_only;
  if (name == "reputation_only") return HraVariant::reputation_only;
  throw InvalidArgument("unknown HRA variant '" + std::string(name) +
                        "' (expected full, anomaly_only, reputation_only)");
}

void HraConfig::validate() const {
  if (!(t_low > 0.0)) throw ConfigError("hra.t_low", "must be > 0");
  if (!(t_high > t_low)) {
    throw ConfigError("hra.t_low/hra.t_high", "t_low (" + std::to_string(t_low) +
                                                  ") must be below t_high (" +
                                                  std::to_string(t_high) + ")");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("hra.rho", "must lie in [0,1]");
  if (!(initial_reputation >= 0.0 && initial_reputation <= 1.0)) {
    throw ConfigError("hra.initial_reputation", "must lie in [0,1]");
  }
  geomed.validate();
}

ReputationState ReputationState::initial(std::span<const ClientId> ids, double initial) {
  ReputationState state;
  for (ClientId id : ids) state.reputations[id] = initial;
  return state;
}

AnomalyScores anomaly_scores(const UpdateSet& updates, const HraConfig& cfg) {
  updates.validate();
  std::vector<std::vector<double>> points;
  points.reserve(updates.size());
  for (const auto& p : updates.params) points.push_back(anomaly_vector(p, cfg.anomaly_includes_bias));

  AnomalyScores scores;
  scores.reference = geometric_median(points, cfg.geomed);
  scores.distances.reserve(points.size());
  for (const auto& p : points) scores.distances.push_back(euclidean_distance(p, scores.reference));
  return scores;
}

double trust_weight(double delta, double t_low, double t_high) {
  if (delta <= t_low) return 1.0;
  if (delta >= t_high) return 0.0;
  return (t_high - delta) / (t_high - t_low);
}

ReputationState update_reputation(const ReputationState& state,
                                  const std::map<ClientId, double>& phi, double rho) {
  ReputationState next = state;
  for (const auto& [id, weight] : phi) {
    auto it = next.reputations.find(id);
    if (it == next.reputations.end()) {
      throw InvalidArgument("update_reputation: unknown client id " + std::to_string(id));
    }
    if (!(weight >= 0.0 && weight <= 1.0)) {
      throw InvalidArgument("update_reputation: trust weight outside [0,1]");
    }
    // Same recursion as rho*r + (1-rho)*phi, arranged so phi == r is an exact fixed point.
    const double r = it->second;
    it->second = std::clamp(r + (1.0 - rho) * (weight - r), 0.0, 1.0);
  }
  ++next.rounds_observed;
  return next;
}

HraOutcome aggregate_hra(const UpdateSet& updates, const ReputationState& state,
                         const HraConfig& cfg) {
  updates.validate();
  cfg.validate();

  ReputationState current = state;
  for (ClientId id : updates.ids) current.reputations.try_emplace(id, cfg.initial_reputation);

  const auto scores = anomaly_scores(updates, cfg);
  const std::size_t m = updates.size();
  const std::size_t d = updates.params.front().dim();

  HraOutcome out;
  auto& diag = out.diagnostics;
  diag.anomaly = scores.distances;
  diag.reference = scores.reference;
  diag.trust.resize(m);
  diag.combined.resize(m);

  std::map<ClientId, double> phi;
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    diag.trust[j] = trust_weight(scores.distances[j], cfg.t_low, cfg.t_high);
    phi[updates.ids[j]] = diag.trust[j];
    const double r = current.reputations.at(updates.ids[j]);
    switch (cfg.variant) {
      case HraVariant::full: diag.combined[j] = r * diag.trust[j]; break;
      case HraVariant::anomaly_only: diag.combined[j] = diag.trust[j]; break;
      case HraVariant::reputation_only: diag.combined[j] = r; break;
    }
    total += diag.combined[j];
  }

  const bool uniform = std::all_of(diag.combined.begin(), diag.combined.end(),
                                   [&](double c) { return c == diag.combined.front(); });
  if (total > 0.0 && uniform) {
    // Equal weights: plain mean, summed exactly like simple_mean so the two agree bit for bit.
    out.params = ModelParams::zeros(d);
    for (const auto& p : updates.params) {
      for (std::size_t k = 0; k < d; ++k) out.params.w[k] += p.w[k];
      out.params.b += p.b;
    }
    for (double& v : out.params.w) v /= static_cast<double>(m);
    out.params.b /= static_cast<double>(m);
  } else if (total > 0.0) {
    out.params = ModelParams::zeros(d);
    for (std::size_t j = 0; j < m; ++j) {
      const double c = diag.combined[j];
      const auto& p = updates.params[j];
      for (std::size_t k = 0; k < d; ++k) out.params.w[k] += c * p.w[k];
      out.params.b += c * p.b;
    }
    for (double& v : out.params.w) v /= total;
    out.params.b /= total;
  } else {
    // Nobody trusted: fall back to the robust reference.
    diag.fallback = true;
    out.params.w.assign(scores.reference.begin(), scores.reference.begin() + static_cast<long>(d));
    if (cfg.anomaly_includes_bias) {
      out.params.b = scores.reference.back();
    } else {
      std::vector<double> biases;
      for (const auto& p : updates.params) biases.push_back(p.b);
      out.params.b = median_of(std::move(biases));
    }
  }

  out.state = cfg.variant == HraVariant::anomaly_only ? std::move(current)
                                                      : update_reputation(current, phi, cfg.rho);
  return out;
}

double closed_form_reputation(double r0, double rho, std::span<const double> history) {
  const std::size_t t = history.size();
  double value = std::pow(rho, static_cast<double>(t)) * r0;
  for (std::size_t i = 0; i < t; ++i) {
    value += (1.0 - rho) * std::pow(rho, static_cast<double>(t - 1 - i)) * history[i];
  }
  return value;
}

}  // namespace hrafl
