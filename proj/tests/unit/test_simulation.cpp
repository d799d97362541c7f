#include <cmath>

#include "doctest.h"
#include "hrafl/config.hpp"
#include "hrafl/error.hpp"
#include "hrafl/simulation.hpp"

using namespace hrafl;

namespace {

ScenarioConfig small(const std::string& rule = "hra") {
  ScenarioConfig cfg = parse_config_text(R"({
    "name": "small",
    "clients": 6, "rounds": 4, "runs": 2, "seed": 99,
    "data": {"source": "synthetic", "synthetic": {"n_train": 600, "n_test": 200, "features": 4}},
    "partition": {"mode": "dirichlet", "alpha": 0.5},
    "attacks": {"malicious_fraction": 0.5, "kinds": ["sign_flipping", "noise", "sybil"]}
  })");
  cfg.aggregator.rule = rule;
  return cfg;
}

bool same_records(const RunResult& a, const RunResult& b) {
  if (a.rounds.size() != b.rounds.size()) return false;
  for (std::size_t r = 0; r < a.rounds.size(); ++r) {
    const auto& x = a.rounds[r];
    const auto& y = b.rounds[r];
    if (x.accuracy != y.accuracy || x.roc_auc != y.roc_auc || x.f1 != y.f1 ||
        x.reputations != y.reputations || x.anomaly != y.anomaly ||
        x.stream_fingerprint != y.stream_fingerprint) {
      return false;
    }
  }
  return a.final_model.w == b.final_model.w && a.final_model.b == b.final_model.b;
}

}  // namespace

TEST_CASE("run seeds differ per run and are stable") {
  CHECK(run_seed(1, 0) == run_seed(1, 0));
  CHECK(run_seed(1, 0) != run_seed(1, 1));
  CHECK(run_seed(1, 0) != run_seed(2, 0));
}

TEST_CASE("prepare_run builds a consistent context") {
  const ScenarioConfig cfg = small();
  const RunContext ctx = prepare_run(cfg, 0);
  CHECK(ctx.client_data.size() == 6);
  std::size_t total = 0;
  for (const auto& c : ctx.client_data) total += c.samples();
  CHECK(total == ctx.data.train.samples());
  CHECK(ctx.roster.malicious() == 3);
  CHECK(prepare_run(cfg, 0).data_fingerprint == ctx.data_fingerprint);
  CHECK(prepare_run(cfg, 1).data_fingerprint != ctx.data_fingerprint);
}

TEST_CASE("label flipping clients train on flipped labels") {
  ScenarioConfig cfg = small();
  cfg.roster.kinds = {AttackKind::label_flipping};
  const RunContext ctx = prepare_run(cfg, 0);
  for (std::size_t j = 0; j < cfg.clients; ++j) {
    const FeatureMatrix original = ctx.data.train.subset(ctx.plan.assignments[j]);
    if (ctx.roster.kinds[j] == AttackKind::label_flipping) {
      CHECK(ctx.client_data[j].y == flip_labels(original.y));
    } else {
      CHECK(ctx.client_data[j].y == original.y);
    }
  }
}

TEST_CASE("run_round records learning rate and weights") {
  const ScenarioConfig cfg = small("simple_mean");
  const RunContext ctx = prepare_run(cfg, 0);
  FederationState state;
  state.global = ModelParams::zeros(ctx.data.train.features());
  const RoundOutcome out = run_round(cfg, ctx, state, 2);
  CHECK(out.lr == lr_schedule(cfg.train.eta0, cfg.train.gamma, 2));
  CHECK(out.weights.size() == cfg.clients);
  CHECK_FALSE(out.hra.has_value());
  CHECK(out.next.global.w.size() == ctx.data.train.features());
}

TEST_CASE("simulation is reproducible and independent of thread count") {
  for (const char* rule : {"hra", "krum", "geometric_median"}) {
    ScenarioConfig cfg = small(rule);
    const RunResult a = run_simulation(cfg, 0);
    const RunResult b = run_simulation(cfg, 0);
    cfg.threads = 4;
    const RunResult c = run_simulation(cfg, 0);
    CHECK(same_records(a, b));
    CHECK(same_records(a, c));
  }
}

TEST_CASE("random streams do not depend on the aggregation rule") {
  const RunResult hra = run_simulation(small("hra"), 1);
  const RunResult mean = run_simulation(small("simple_mean"), 1);
  REQUIRE(hra.rounds.size() == mean.rounds.size());
  for (std::size_t r = 0; r < hra.rounds.size(); ++r) {
    CHECK(hra.rounds[r].stream_fingerprint == mean.rounds[r].stream_fingerprint);
  }
  CHECK(hra.roster.kinds == mean.roster.kinds);
}

TEST_CASE("HRA records per-client diagnostics") {
  const RunResult run = run_simulation(small("hra"), 0);
  for (const auto& rec : run.rounds) {
    CHECK(rec.reputations.size() == 6);
    CHECK(rec.anomaly.size() == 6);
    CHECK(rec.trust.size() == 6);
    REQUIRE(rec.mean_reputation.has_value());
    CHECK(*rec.mean_reputation >= 0.0);
    CHECK(*rec.mean_reputation <= 1.0);
    CHECK(rec.accuracy >= 0.0);
    CHECK(rec.accuracy <= 1.0);
  }
  const RunResult plain = run_simulation(small("coordinate_median"), 0);
  CHECK_FALSE(plain.rounds.front().mean_reputation.has_value());
  CHECK(plain.rounds.front().reputations.empty());
}

TEST_CASE("run_experiment aggregates runs") {
  const ExperimentResult e = run_experiment(small("trimmed_mean"));
  CHECK(e.label == "trimmed_mean");
  CHECK(e.runs.size() == 2);
  CHECK(e.final_accuracies.size() == 2);
  CHECK(e.accuracy_per_round.size() == 4);
  CHECK(e.final_accuracies[0] == e.runs[0].final_accuracy());
  CHECK(e.runs[0].seed == run_seed(99, 0));

  ScenarioConfig variant = small();
  variant.hra.variant = HraVariant::anomaly_only;
  CHECK(run_experiment(variant).label == "hra:anomaly_only");
}

TEST_CASE("sweeps label their experiments and report changes against the first row") {
  ScenarioConfig cfg = small();
  cfg.runs = 1;
  const SweepResult t = sweep_thresholds(cfg, {{3.0, 7.0}, {10.0, 20.0}});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].label == "hra[t_low=3;t_high=7]");
  CHECK(t.rows[0].change_pp == 0.0);
  CHECK(t.rows[1].change_pp ==
        doctest::Approx(100.0 * (t.rows[1].final_accuracy.mean - t.rows[0].final_accuracy.mean)));
  CHECK_THROWS_AS(sweep_thresholds(cfg, {{7.0, 3.0}}), ConfigError);
  CHECK_THROWS_AS(sweep_thresholds(cfg, {}), InvalidArgument);

  const SweepResult lr = sweep_learning_rates(cfg, {0.1, 0.05});
  CHECK(lr.rows[1].label == "hra[eta0=0.05]");

  const SweepResult ab = ablate_synergy(cfg);
  REQUIRE(ab.rows.size() == 3);
  CHECK(ab.rows[0].label == "hra:full");
  CHECK(ab.rows[1].label == "hra:anomaly_only");
  CHECK(ab.rows[2].label == "hra:reputation_only");
  CHECK_THROWS_AS(ablate_synergy(small("krum")), ConfigError);
}

TEST_CASE("compare_aggregators tests against the first rule") {
  const ComparisonResult c = compare_aggregators(small(), {"hra", "simple_mean", "krum"});
  REQUIRE(c.experiments.size() == 3);
  REQUIRE(c.vs_reference.size() == 3);
  REQUIRE(c.vs_reference[0].has_value());
  CHECK(c.vs_reference[0]->p == 1.0);
  CHECK(c.vs_reference[1].has_value());
  CHECK_THROWS_AS(compare_aggregators(small(), {"hra"}), InvalidArgument);
  CHECK_THROWS_AS(compare_aggregators(small(), {"hra", "hra"}), ConfigError);

  ScenarioConfig one = small();
  one.runs = 1;
  CHECK_FALSE(compare_aggregators(one, {"hra", "krum"}).vs_reference[1].has_value());
}

TEST_CASE("invalid scenarios are rejected before running") {
  ScenarioConfig cfg = small();
  cfg.hra.t_low = 9.0;
  CHECK_THROWS_AS(run_simulation(cfg, 0), ConfigError);
}
