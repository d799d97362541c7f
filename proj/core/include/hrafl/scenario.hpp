#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hrafl/adversary.hpp"
#include "hrafl/data.hpp"
#include "hrafl/geometric_median.hpp"
#include "hrafl/hybrid_reputation.hpp"
#include "hrafl/model.hpp"

namespace hrafl {

enum class DataSourceKind { synthetic, csv };
enum class PartitionMode { uniform, dirichlet };

struct CsvSource {
  std::string train_path;
  // Empty: the training file is split with test_fraction.
  std::string test_path;
  std::string label_column = "label";
  std::vector<std::string> positive_labels;
  std::vector<std::string> negative_labels;
  double test_fraction = 0.2;

  friend bool operator==(const CsvSource&, const CsvSource&) = default;
};

struct DataConfig {
  DataSourceKind source = DataSourceKind::synthetic;
  SyntheticSpec synthetic;
  CsvSource csv;

  friend bool operator==(const DataConfig&, const DataConfig&) = default;
};

struct PartitionConfig {
  PartitionMode mode = PartitionMode::dirichlet;
  double alpha = 0.5;

  friend bool operator==(const PartitionConfig&, const PartitionConfig&) = default;
};

struct RosterSpec {
  double malicious_fraction = 0.0;
  std::vector<AttackKind> kinds;
  AttackConfig attack;

  friend bool operator==(const RosterSpec&, const RosterSpec&) = default;
};

// Rule selection. Unset counts take defaults derived from the client count
// (see resolve_defaults).
struct AggregatorConfig {
  std::string rule = "hra";
  std::optional<std::size_t> krum_f;
  std::optional<std::size_t> bulyan_f;
  std::optional<std::size_t> trim_k;
  std::optional<std::size_t> multi_krum_m;
  // Shared by the geometric_median rule and the HRA reference point.
  GeoMedConfig geomed;

  friend bool operator==(const AggregatorConfig&, const AggregatorConfig&) = default;
};

// Inputs of the multi-experiment subcommands.
struct ExperimentPlan {
  std::vector<std::string> compare_rules;
  std::vector<std::pair<double, double>> threshold_pairs;
  std::vector<double> learning_rates;

  friend bool operator==(const ExperimentPlan&, const ExperimentPlan&) = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  DataConfig data;
  PartitionConfig partition;
  std::size_t clients = 10;
  std::size_t rounds = 20;
  std::size_t runs = 5;
  std::uint64_t seed = 1;
  // Worker threads for client training; results do not depend on it.
  std::size_t threads = 1;
  TrainConfig train;
  RosterSpec roster;
  AggregatorConfig aggregator;
  HraConfig hra;
  ExperimentPlan experiments;

  void validate() const;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Rule names the simulator accepts: every memoryless rule plus "hra".
const std::vector<std::string>& known_rule_names();

// Fills unset rule parameters from the client count:
//   krum_f = floor((M-3)/2), bulyan_f = floor((M-3)/4), trim_k = floor(0.2 M),
//   multi_krum_m = M - krum_f - 2,
// and copies aggregator.geomed into hra.geomed.
void resolve_defaults(ScenarioConfig& cfg);

// Parameters handed to aggregate() for `rule`.
RuleConfig rule_config_for(const ScenarioConfig& cfg, const std::string& rule);

std::string_view to_string(PartitionMode mode);
std::string_view to_string(DataSourceKind kind);

}  // namespace hrafl
