#include "hrafl/results_io.hpp"

#include <fstream>
#include <sstream>

#include "hrafl/config.hpp"
#include "hrafl/error.hpp"
#include "json.hpp"
#include "text_format.hpp"

#ifndef HRAFL_VERSION
#define HRAFL_VERSION "unknown"
#endif

namespace hrafl {

namespace {

using detail::format_double;

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string library_version() { return HRAFL_VERSION; }

std::string rounds_csv(const std::vector<ExperimentResult>& experiments) {
  std::ostringstream out;
  out << kRoundsHeader << '\n';
  for (const auto& e : experiments) {
    for (const auto& run : e.runs) {
      for (const auto& r : run.rounds) {
        out << run.run_index << ',' << r.round << ',' << e.label << ',' << format_double(r.accuracy)
            << ',' << format_double(r.precision) << ',' << format_double(r.recall) << ','
            << format_double(r.f1) << ',' << format_double(r.roc_auc) << ','
            << optional_cell(r.mean_anomaly_distance) << ',' << optional_cell(r.mean_reputation)
            << ',' << format_double(r.lr) << '\n';
      }
    }
  }
  return out.str();
}

std::string summary_csv(const std::vector<ExperimentResult>& experiments,
                        const std::vector<std::optional<double>>& p_values) {
  std::ostringstream out;
  out << kSummaryHeader << '\n';
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    const auto s = experiments[i].final_accuracy();
    const std::optional<double> p = i < p_values.size() ? p_values[i] : std::nullopt;
    out << experiments[i].label << ',' << format_double(s.mean) << ',' << format_double(s.stddev)
        << ',' << format_double(s.standard_error) << ',' << optional_cell(p) << '\n';
  }
  return out.str();
}

std::string reputations_csv(const std::vector<ExperimentResult>& experiments) {
  std::ostringstream out;
  bool any = false;
  for (const auto& e : experiments) {
    for (const auto& run : e.runs) {
      for (const auto& r : run.rounds) {
        if (r.reputations.empty()) continue;
        if (!any) out << kReputationsHeader << '\n';
        any = true;
        for (std::size_t j = 0; j < r.reputations.size(); ++j) {
          out << run.run_index << ',' << r.round << ',' << e.label << ',' << j << ','
              << to_string(run.roster.kinds.at(j)) << ',' << format_double(r.anomaly.at(j)) << ','
              << format_double(r.trust.at(j)) << ',' << format_double(r.reputations[j]) << '\n';
        }
      }
    }
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kSweepHeader << '\n';
  for (const auto& row : rows) {
    out << row.label << ',' << format_double(row.final_accuracy.mean) << ','
        << format_double(row.final_accuracy.stddev) << ',' << format_double(row.change_pp) << '\n';
  }
  return out.str();
}

std::string manifest_json(const ResultBundle& bundle) {
  using nlohmann::json;
  json experiments = json::array();
  for (const auto& e : bundle.experiments) {
    json seeds = json::array();
    for (const auto& run : e.runs) seeds.push_back(run.seed);
    experiments.push_back({{"label", e.label}, {"rule", e.rule}, {"run_seeds", seeds}});
  }
  json doc = {
      {"artifact", "hrafl-manifest"},
      {"version", library_version()},
      {"subcommand", bundle.subcommand},
      {"config", json::parse(config_to_json(bundle.config))},
      {"experiments", experiments},
      {"conventions",
       "precision and recall are 0 when their denominator is 0 (F1 then 0); predictions use "
       "probability >= 0.5; empty HRA-only cells mean the rule has no anomaly/reputation state"},
  };
  return doc.dump(2) + "\n";
}

void write_results(const ResultBundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());

  write_file(dir / "rounds.csv", rounds_csv(bundle.experiments));
  write_file(dir / "summary.csv", summary_csv(bundle.experiments, bundle.p_values));
  write_file(dir / "manifest.json", manifest_json(bundle));
  const std::string reps = reputations_csv(bundle.experiments);
  if (!reps.empty()) write_file(dir / "reputations.csv", reps);
  if (!bundle.sweep_rows.empty()) write_file(dir / "sweep.csv", sweep_csv(bundle.sweep_rows));
}

}  // namespace hrafl
