#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hrafl/adversary.hpp"
#include "hrafl/aggregators.hpp"
#include "hrafl/data.hpp"
#include "hrafl/hybrid_reputation.hpp"
#include "hrafl/model.hpp"
#include "hrafl/scenario.hpp"
#include "hrafl/stats.hpp"

namespace hrafl {

// Evaluation of the global model after one round.
struct RoundRecord {
  std::size_t round = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.0;
  double lr = 0.0;
  // HRA only.
  std::optional<double> mean_anomaly_distance;
  std::optional<double> mean_reputation;
  std::vector<double> reputations;  // post-round, indexed by client id
  std::vector<double> anomaly;
  std::vector<double> trust;
  bool fallback = false;
  // Digest of the client datasets, roster and per-client random streams.
  std::uint64_t stream_fingerprint = 0;
};

struct RunResult {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  ClientRoster roster;
  std::vector<RoundRecord> rounds;
  ModelParams final_model;

  double final_accuracy() const { return rounds.empty() ? 0.0 : rounds.back().accuracy; }
};

struct ExperimentResult {
  std::string label;
  std::string rule;
  std::vector<RunResult> runs;
  std::vector<Summary> accuracy_per_round;
  std::vector<double> final_accuracies;

  Summary final_accuracy() const { return summarize(final_accuracies); }
};

// Everything that stays fixed over the rounds of one run.
struct RunContext {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  PreparedData data;
  PartitionPlan plan;
  ClientRoster roster;
  // Per-client training data, labels already flipped for label_flipping clients.
  std::vector<FeatureMatrix> client_data;
  std::uint64_t data_fingerprint = 0;
};

struct FederationState {
  ModelParams global;
  ReputationState reputation;
};

struct RoundOutcome {
  FederationState next;
  double lr = 0.0;
  std::vector<double> weights;
  std::optional<HraDiagnostics> hra;
  std::uint64_t stream_fingerprint = 0;
};

// Seed of run `run_index` under master seed `seed`.
std::uint64_t run_seed(std::uint64_t seed, std::size_t run_index);

// Loads, cleans and splits the CSV source of `cfg`. Synthetic sources return nullopt
// (they are regenerated per run).
std::optional<PreparedData> load_shared_data(const ScenarioConfig& cfg);

RunContext prepare_run(const ScenarioConfig& cfg, std::size_t run_index,
                       const std::optional<PreparedData>& shared = std::nullopt);

// One communication round: local training at lr_schedule(eta0, gamma, round),
// post-training attacks, aggregation by `cfg.aggregator.rule`.
RoundOutcome run_round(const ScenarioConfig& cfg, const RunContext& ctx,
                       const FederationState& state, std::size_t round);

RunResult run_simulation(const ScenarioConfig& cfg, std::size_t run_index,
                         const std::optional<PreparedData>& shared = std::nullopt);

ExperimentResult run_experiment(const ScenarioConfig& cfg, std::string label = {});

struct SweepRow {
  std::string label;
  Summary final_accuracy;
  // Percentage points relative to the first row.
  double change_pp = 0.0;
};

struct SweepResult {
  std::vector<ExperimentResult> experiments;
  std::vector<SweepRow> rows;
};

SweepResult sweep_thresholds(const ScenarioConfig& base,
                             const std::vector<std::pair<double, double>>& pairs);
SweepResult sweep_learning_rates(const ScenarioConfig& base, const std::vector<double>& rates);
// Rows in order full, anomaly_only, reputation_only.
SweepResult ablate_synergy(const ScenarioConfig& base);

struct ComparisonResult {
  std::vector<ExperimentResult> experiments;
  // Paired t-test of each experiment's final accuracies against the first one.
  // Unset when fewer than two runs were made.
  std::vector<std::optional<TTestResult>> vs_reference;
};

ComparisonResult compare_aggregators(const ScenarioConfig& base,
                                     const std::vector<std::string>& rules);

}  // namespace hrafl
