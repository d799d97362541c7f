#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrafl/geometric_median.hpp"
#include "hrafl/model.hpp"

namespace hrafl {

using ClientId = std::size_t;

// One round of client submissions.
struct UpdateSet {
  std::vector<ClientId> ids;
  std::vector<ModelParams> params;

  std::size_t size() const noexcept { return params.size(); }
  // Throws unless non-empty, ids unique and dimensions consistent.
  void validate() const;
};

struct AggregationResult {
  ModelParams params;
  // Per-client share of the aggregate; sums to 1 when any client is retained.
  std::vector<double> weights;
  std::map<std::string, double> diagnostics;
};

// Parameters for the memoryless rules. Rules that need a value fail when it is unset.
struct RuleConfig {
  std::optional<std::size_t> f;             // krum, multi_krum, bulyan
  std::optional<std::size_t> trim_k;        // trimmed_mean
  std::optional<std::size_t> multi_krum_m;  // multi_krum
  GeoMedConfig geomed;                      // geometric_median
};

// Bias appended as the last coordinate.
std::vector<double> flatten(const ModelParams& params);
ModelParams unflatten(const std::vector<double>& flat);
std::vector<std::vector<double>> flatten_all(const UpdateSet& updates);

AggregationResult simple_mean(const UpdateSet& updates);
AggregationResult coordinate_median(const UpdateSet& updates);
AggregationResult trimmed_mean(const UpdateSet& updates, std::size_t k);

// Sum of squared distances to the M - f - 2 nearest other updates.
std::vector<double> krum_scores(const UpdateSet& updates, std::size_t f);
AggregationResult krum_select(const UpdateSet& updates, std::size_t f);
AggregationResult multi_krum(const UpdateSet& updates, std::size_t f, std::size_t m);
AggregationResult bulyan(const UpdateSet& updates, std::size_t f);
AggregationResult geometric_median_rule(const UpdateSet& updates, const GeoMedConfig& cfg);

// Names accepted by aggregate(), sorted.
const std::vector<std::string>& memoryless_rule_names();
AggregationResult aggregate(const std::string& rule, const UpdateSet& updates,
                            const RuleConfig& config);

}  // namespace hrafl
