#pragma once

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "hrafl/aggregators.hpp"
#include "hrafl/geometric_median.hpp"
#include "hrafl/model.hpp"

namespace hrafl {

// Which signals feed the aggregation weight.
//   full            r_j * phi_j, reputation updated
//   anomaly_only    phi_j, reputation frozen
//   reputation_only r_j, reputation still updated from phi_j
enum class HraVariant { full, anomaly_only, reputation_only };

std::string_view to_string(HraVariant variant);
HraVariant parse_hra_variant(std::string_view name);

struct HraConfig {
  double t_low = 3.0;
  double t_high = 7.0;
  double rho = 0.5;
  HraVariant variant = HraVariant::full;
  double initial_reputation = 1.0;
  GeoMedConfig geomed;
  bool anomaly_includes_bias = false;

  void validate() const;
  friend bool operator==(const HraConfig&, const HraConfig&) = default;
};

struct ReputationState {
  std::map<ClientId, double> reputations;
  std::size_t rounds_observed = 0;

  // Every id present at `initial` reputation.
  static ReputationState initial(std::span<const ClientId> ids, double initial);
  friend bool operator==(const ReputationState&, const ReputationState&) = default;
};

struct AnomalyScores {
  std::vector<double> distances;
  std::vector<double> reference;
};

struct HraDiagnostics {
  std::vector<double> anomaly;
  std::vector<double> trust;
  std::vector<double> combined;
  std::vector<double> reference;
  bool fallback = false;
};

struct HraOutcome {
  ModelParams params;
  ReputationState state;
  HraDiagnostics diagnostics;
};

// Geometric median of the client weight vectors (bias appended only when
// cfg.anomaly_includes_bias) and each client's Euclidean distance to it.
AnomalyScores anomaly_scores(const UpdateSet& updates, const HraConfig& cfg);

// Piecewise-linear trust: 1 up to t_low, 0 from t_high, linear in between.
double trust_weight(double delta, double t_low, double t_high);

// r <- rho * r + (1 - rho) * phi for every client in `phi`.
ReputationState update_reputation(const ReputationState& state,
                                  const std::map<ClientId, double>& phi, double rho);

// One aggregation round. Weights use the reputations held in `state`
// (pre-update); the returned state carries the post-round reputations.
HraOutcome aggregate_hra(const UpdateSet& updates, const ReputationState& state,
                         const HraConfig& cfg);

// rho^t r0 + (1 - rho) sum_i rho^(t-1-i) phi_i
double closed_form_reputation(double r0, double rho, std::span<const double> history);

}  // namespace hrafl
