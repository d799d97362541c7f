#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hrafl/scenario.hpp"
#include "hrafl/simulation.hpp"

namespace hrafl {

inline constexpr const char* kRoundsHeader =
    "run,round,aggregator,accuracy,precision,recall,f1,roc_auc,mean_anomaly_distance,"
    "mean_reputation,lr";
inline constexpr const char* kSummaryHeader =
    "aggregator,final_acc_mean,final_acc_std,final_acc_stderr,p_value_vs_reference";
inline constexpr const char* kReputationsHeader =
    "run,round,aggregator,client,attack,anomaly_distance,trust_weight,reputation";
inline constexpr const char* kSweepHeader = "label,final_acc_mean,final_acc_std,change_pp";

// Everything one CLI subcommand produced.
struct ResultBundle {
  std::string subcommand;
  ScenarioConfig config;
  std::vector<ExperimentResult> experiments;
  // Per experiment; unset entries are written as empty cells.
  std::vector<std::optional<double>> p_values;
  std::vector<SweepRow> sweep_rows;
};

std::string rounds_csv(const std::vector<ExperimentResult>& experiments);
std::string summary_csv(const std::vector<ExperimentResult>& experiments,
                        const std::vector<std::optional<double>>& p_values);
// Per-client HRA trace; empty string when no experiment used HRA.
std::string reputations_csv(const std::vector<ExperimentResult>& experiments);
std::string sweep_csv(const std::vector<SweepRow>& rows);
// Config echo with every default resolved, plus run seeds and the library version.
// parse_config accepts this document directly.
std::string manifest_json(const ResultBundle& bundle);

// Writes rounds.csv, summary.csv, manifest.json and, when applicable,
// reputations.csv and sweep.csv into `dir` (created if needed).
void write_results(const ResultBundle& bundle, const std::filesystem::path& dir);

std::string library_version();

}  // namespace hrafl
