#include "cli_app.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "hrafl/config.hpp"
#include "hrafl/error.hpp"
#include "hrafl/results_io.hpp"
#include "hrafl/simulation.hpp"

namespace hrafl::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string out_dir = "results";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  bool quiet = false;
  bool verbose = false;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void print_summary(std::ostream& out, const ExperimentResult& e, const std::optional<double>& p) {
  const Summary s = e.final_accuracy();
  out << e.label << ": final accuracy " << fixed(s.mean, 4) << " +/- " << fixed(s.stddev, 4)
      << " over " << e.final_accuracies.size() << " run(s)";
  if (p) out << ", p vs reference " << fixed(*p, 4);
  out << '\n';
}

ScenarioConfig load(const Options& opt) {
  std::vector<std::string> overrides = opt.overrides;
  if (opt.seed) overrides.push_back("seed=" + std::to_string(*opt.seed));
  if (opt.runs) overrides.push_back("runs=" + std::to_string(*opt.runs));
  return parse_config(opt.config, overrides);
}

fs::path experiment_dir(const Options& opt, const std::string& subcommand) {
  return fs::path(opt.out_dir) / (fs::path(opt.config).stem().string() + "-" + subcommand);
}

void finish(const Options& opt, ResultBundle& bundle, std::ostream& out) {
  const fs::path dir = experiment_dir(opt, bundle.subcommand);
  write_results(bundle, dir);
  if (!opt.quiet) {
    for (std::size_t i = 0; i < bundle.experiments.size(); ++i) {
      print_summary(out, bundle.experiments[i], bundle.p_values[i]);
    }
  }
  if (opt.verbose) out << "wrote " << dir.string() << '\n';
}

void from_sweep(ResultBundle& bundle, SweepResult sweep) {
  bundle.experiments = std::move(sweep.experiments);
  bundle.sweep_rows = std::move(sweep.rows);
  bundle.p_values.assign(bundle.experiments.size(), std::nullopt);
}

void dispatch(const std::string& sub, const Options& opt, std::ostream& out) {
  ScenarioConfig cfg = load(opt);
  if (sub == "validate-config") {
    if (!opt.quiet) out << "ok: " << cfg.name << '\n';
    if (opt.verbose) out << config_to_json(cfg) << '\n';
    return;
  }
  if (sub == "gen-data") {
    if (cfg.data.source != DataSourceKind::synthetic) {
      throw ConfigError("data.source", "gen-data needs a synthetic source");
    }
    const fs::path dir = experiment_dir(opt, sub);
    fs::create_directories(dir);
    const PreparedData data = generate_synthetic(cfg.data.synthetic, run_seed(cfg.seed, 0));
    write_csv(data.train, dir / "train.csv");
    write_csv(data.test, dir / "test.csv");
    if (!opt.quiet) {
      out << "gen-data: " << data.train.X.rows() << " train / " << data.test.X.rows()
          << " test rows written to " << dir.string() << '\n';
    }
    return;
  }

  ResultBundle bundle;
  bundle.subcommand = sub;
  bundle.config = cfg;
  if (sub == "run") {
    bundle.experiments.push_back(run_experiment(cfg));
    bundle.p_values.assign(1, std::nullopt);
  } else if (sub == "compare") {
    if (cfg.experiments.compare_rules.size() < 2) {
      throw UsageError("compare needs at least two rules in experiments.compare_rules");
    }
    ComparisonResult cmp = compare_aggregators(cfg, cfg.experiments.compare_rules);
    bundle.experiments = std::move(cmp.experiments);
    for (std::size_t i = 0; i < cmp.vs_reference.size(); ++i) {
      const auto& t = cmp.vs_reference[i];
      bundle.p_values.push_back(i > 0 && t ? std::optional<double>(t->p) : std::nullopt);
    }
  } else if (sub == "sweep-thresholds") {
    from_sweep(bundle, sweep_thresholds(cfg, cfg.experiments.threshold_pairs));
  } else if (sub == "sweep-lr") {
    from_sweep(bundle, sweep_learning_rates(cfg, cfg.experiments.learning_rates));
  } else if (sub == "ablate-synergy") {
    from_sweep(bundle, ablate_synergy(cfg));
  }
  finish(opt, bundle, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Federated learning simulator with hybrid reputation aggregation", "hrafl"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", library_version());

  Options opt;
  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"run", "Run one aggregation rule over all runs"},
      {"compare", "Run every rule in experiments.compare_rules and test against the first"},
      {"sweep-thresholds", "Run HRA over experiments.threshold_pairs"},
      {"sweep-lr", "Run the configured rule over experiments.learning_rates"},
      {"ablate-synergy", "Run the full, anomaly-only and reputation-only HRA variants"},
      {"gen-data", "Write the synthetic dataset of run 0 as train.csv and test.csv"},
      {"validate-config", "Parse and validate a scenario file without running it"},
  };
  for (const auto& [name, help] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Scenario JSON file or run manifest")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--set", opt.overrides, "Override a config key: dotted.key=value")
        ->allow_extra_args(false);
    sub->add_option("--seed", opt.seed, "Override the master seed");
    sub->add_option("--runs", opt.runs, "Override the number of runs")->check(CLI::PositiveNumber);
    auto* quiet = sub->add_flag("-q,--quiet", opt.quiet, "Print nothing on success");
    sub->add_flag("-v,--verbose", opt.verbose, "Print output paths and the resolved config")
        ->excludes(quiet);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << library_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    dispatch(sub, opt, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace hrafl::cli
