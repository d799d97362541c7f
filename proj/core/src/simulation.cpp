#include "hrafl/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "hrafl/error.hpp"
#include "hrafl/metrics.hpp"
#include "hrafl/rng.hpp"
#include "text_format.hpp"

namespace hrafl {

namespace {

std::uint64_t hash_step(std::uint64_t h, std::uint64_t v) { return derive_seed(h, {v}); }

std::uint64_t hash_double(std::uint64_t h, double v) {
  return hash_step(h, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t fingerprint_data(const std::vector<FeatureMatrix>& clients) {
  std::uint64_t h = 0;
  for (const auto& c : clients) {
    h = hash_step(h, c.samples());
    for (double v : c.X.values()) h = hash_double(h, v);
    for (double v : c.y) h = hash_double(h, v);
  }
  return h;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

RoundRecord evaluate(const ModelParams& global, const FeatureMatrix& test, std::size_t round) {
  const auto probs = predict_proba(global, test.X);
  const auto counts = confusion(probs, test.y, 0.5);
  RoundRecord rec;
  rec.round = round;
  rec.accuracy = accuracy(counts);
  rec.precision = precision(counts);
  rec.recall = recall(counts);
  rec.f1 = f1_score(counts);
  rec.roc_auc = roc_auc(probs, test.y);
  return rec;
}

std::string number_label(double v) { return detail::format_double(v); }

std::vector<SweepRow> rows_from(const std::vector<ExperimentResult>& experiments) {
  std::vector<SweepRow> rows;
  for (const auto& e : experiments) {
    SweepRow row;
    row.label = e.label;
    row.final_accuracy = e.final_accuracy();
    row.change_pp = 100.0 * (row.final_accuracy.mean - experiments.front().final_accuracy().mean);
    rows.push_back(row);
  }
  if (!rows.empty()) rows.front().change_pp = 0.0;
  return rows;
}

}  // namespace

std::uint64_t run_seed(std::uint64_t seed, std::size_t run_index) {
  return derive_seed(seed, {stream::kRun, run_index});
}

std::optional<PreparedData> load_shared_data(const ScenarioConfig& cfg) {
  if (cfg.data.source != DataSourceKind::csv) return std::nullopt;
  const auto& csv = cfg.data.csv;
  LabelSpec labels{{csv.positive_labels.begin(), csv.positive_labels.end()},
                   {csv.negative_labels.begin(), csv.negative_labels.end()}};

  RawTable table = load_csv(csv.train_path, csv.label_column, labels);
  const std::size_t train_rows = table.rows.size();
  if (!csv.test_path.empty()) {
    // Coerce both files together so categorical codes agree.
    RawTable test = load_csv(csv.test_path, csv.label_column, labels);
    if (test.columns != table.columns) {
      throw DataError("test CSV '" + csv.test_path + "' has a different header than the train CSV");
    }
    table.rows.insert(table.rows.end(), test.rows.begin(), test.rows.end());
  }
  const FeatureMatrix all = coerce_numeric(table);

  PreparedData split;
  if (csv.test_path.empty()) {
    split = split_train_test(all, csv.test_fraction, cfg.seed);
  } else {
    std::vector<std::size_t> train_idx(train_rows);
    std::iota(train_idx.begin(), train_idx.end(), 0);
    std::vector<std::size_t> test_idx(all.samples() - train_rows);
    std::iota(test_idx.begin(), test_idx.end(), train_rows);
    split = {all.subset(train_idx), all.subset(test_idx)};
  }
  return preprocess(split.train, split.test);
}

RunContext prepare_run(const ScenarioConfig& cfg, std::size_t run_index,
                       const std::optional<PreparedData>& shared) {
  RunContext ctx;
  ctx.run_index = run_index;
  ctx.seed = run_seed(cfg.seed, run_index);

  if (cfg.data.source == DataSourceKind::synthetic) {
    const auto raw = generate_synthetic(cfg.data.synthetic, ctx.seed);
    ctx.data = preprocess(raw.train, raw.test);
  } else if (shared) {
    ctx.data = *shared;
  } else {
    ctx.data = *load_shared_data(cfg);
  }

  const auto& train = ctx.data.train;
  ctx.plan = cfg.partition.mode == PartitionMode::uniform
                 ? partition_uniform(train.samples(), cfg.clients, ctx.seed)
                 : partition_dirichlet(train.y, cfg.clients, cfg.partition.alpha, ctx.seed);
  ctx.roster = assign_attacks(cfg.clients, cfg.roster.malicious_fraction, cfg.roster.kinds, ctx.seed);

  ctx.client_data.reserve(cfg.clients);
  for (std::size_t j = 0; j < cfg.clients; ++j) {
    FeatureMatrix local = train.subset(ctx.plan.assignments[j]);
    if (ctx.roster.kinds[j] == AttackKind::label_flipping) local.y = flip_labels(local.y);
    ctx.client_data.push_back(std::move(local));
  }
  ctx.data_fingerprint = fingerprint_data(ctx.client_data);
  return ctx;
}

RoundOutcome run_round(const ScenarioConfig& cfg, const RunContext& ctx,
                       const FederationState& state, std::size_t round) {
  const std::size_t m = ctx.client_data.size();
  RoundOutcome out;
  out.lr = lr_schedule(cfg.train.eta0, cfg.train.gamma, round);

  UpdateSet updates;
  updates.ids.resize(m);
  std::iota(updates.ids.begin(), updates.ids.end(), 0);
  updates.params.resize(m);

  std::vector<std::uint64_t> stream_seeds(m);
  for (std::size_t j = 0; j < m; ++j) {
    const bool shared_sybil =
        cfg.roster.attack.sybil_collusion && ctx.roster.kinds[j] == AttackKind::sybil;
    stream_seeds[j] = shared_sybil ? derive_seed(ctx.seed, {stream::kSybil, round})
                                   : derive_seed(ctx.seed, {stream::kClient, round, j});
  }

  parallel_for(m, cfg.threads, [&](std::size_t j) {
    const ModelParams local = train_local(state.global, ctx.client_data[j], cfg.train, out.lr);
    Rng rng(stream_seeds[j]);
    updates.params[j] =
        apply_post_training_attack(ctx.roster.kinds[j], state.global, local, cfg.roster.attack, rng);
  });

  std::uint64_t fp = hash_step(ctx.data_fingerprint, round);
  for (std::size_t j = 0; j < m; ++j) {
    fp = hash_step(fp, static_cast<std::uint64_t>(ctx.roster.kinds[j]));
    fp = hash_step(fp, stream_seeds[j]);
  }
  out.stream_fingerprint = fp;

  if (cfg.aggregator.rule == "hra") {
    auto outcome = aggregate_hra(updates, state.reputation, cfg.hra);
    out.next.global = std::move(outcome.params);
    out.next.reputation = std::move(outcome.state);
    out.weights = outcome.diagnostics.combined;
    out.hra = std::move(outcome.diagnostics);
  } else {
    auto result = aggregate(cfg.aggregator.rule, updates, rule_config_for(cfg, cfg.aggregator.rule));
    out.next.global = std::move(result.params);
    out.next.reputation = state.reputation;
    out.weights = std::move(result.weights);
  }
  return out;
}

RunResult run_simulation(const ScenarioConfig& cfg, std::size_t run_index,
                         const std::optional<PreparedData>& shared) {
  cfg.validate();
  const RunContext ctx = prepare_run(cfg, run_index, shared);

  RunResult result;
  result.run_index = run_index;
  result.seed = ctx.seed;
  result.roster = ctx.roster;

  FederationState state;
  state.global = ModelParams::zeros(ctx.data.train.features());
  if (cfg.aggregator.rule == "hra") {
    std::vector<ClientId> ids(cfg.clients);
    std::iota(ids.begin(), ids.end(), 0);
    state.reputation = ReputationState::initial(ids, cfg.hra.initial_reputation);
  }

  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    RoundOutcome outcome = run_round(cfg, ctx, state, r);
    state = std::move(outcome.next);

    RoundRecord rec = evaluate(state.global, ctx.data.test, r);
    rec.lr = outcome.lr;
    rec.stream_fingerprint = outcome.stream_fingerprint;
    if (outcome.hra) {
      rec.anomaly = outcome.hra->anomaly;
      rec.trust = outcome.hra->trust;
      rec.fallback = outcome.hra->fallback;
      rec.mean_anomaly_distance = mean_of(rec.anomaly);
      for (const auto& [id, rep] : state.reputation.reputations) rec.reputations.push_back(rep);
      rec.mean_reputation = mean_of(rec.reputations);
    }
    result.rounds.push_back(std::move(rec));
  }
  result.final_model = state.global;
  return result;
}

ExperimentResult run_experiment(const ScenarioConfig& cfg, std::string label) {
  cfg.validate();
  ExperimentResult exp;
  exp.rule = cfg.aggregator.rule;
  if (label.empty()) {
    label = cfg.aggregator.rule;
    if (cfg.aggregator.rule == "hra" && cfg.hra.variant != HraVariant::full) {
      label += ":" + std::string(to_string(cfg.hra.variant));
    }
  }
  exp.label = std::move(label);

  const auto shared = load_shared_data(cfg);
  for (std::size_t run = 0; run < cfg.runs; ++run) {
    exp.runs.push_back(run_simulation(cfg, run, shared));
    exp.final_accuracies.push_back(exp.runs.back().final_accuracy());
  }
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    std::vector<double> acc;
    for (const auto& run : exp.runs) acc.push_back(run.rounds[r].accuracy);
    exp.accuracy_per_round.push_back(summarize(acc));
  }
  return exp;
}

SweepResult sweep_thresholds(const ScenarioConfig& base,
                             const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) throw InvalidArgument("sweep_thresholds: no threshold pairs");
  SweepResult sweep;
  for (const auto& [lo, hi] : pairs) {
    if (!(lo > 0.0 && lo < hi)) {
      throw ConfigError("experiments.threshold_pairs",
                        "invalid pair (" + number_label(lo) + ", " + number_label(hi) + ")");
    }
    ScenarioConfig cfg = base;
    cfg.aggregator.rule = "hra";
    cfg.hra.t_low = lo;
    cfg.hra.t_high = hi;
    sweep.experiments.push_back(
        run_experiment(cfg, "hra[t_low=" + number_label(lo) + ";t_high=" + number_label(hi) + "]"));
  }
  sweep.rows = rows_from(sweep.experiments);
  return sweep;
}

SweepResult sweep_learning_rates(const ScenarioConfig& base, const std::vector<double>& rates) {
  if (rates.empty()) throw InvalidArgument("sweep_learning_rates: no learning rates");
  SweepResult sweep;
  for (double eta0 : rates) {
    if (!(eta0 > 0.0)) {
      throw ConfigError("experiments.learning_rates", "invalid rate " + number_label(eta0));
    }
    ScenarioConfig cfg = base;
    cfg.train.eta0 = eta0;
    sweep.experiments.push_back(
        run_experiment(cfg, cfg.aggregator.rule + "[eta0=" + number_label(eta0) + "]"));
  }
  sweep.rows = rows_from(sweep.experiments);
  return sweep;
}

SweepResult ablate_synergy(const ScenarioConfig& base) {
  if (base.aggregator.rule != "hra") {
    throw ConfigError("aggregator.rule", "synergy ablation needs the hra rule");
  }
  SweepResult sweep;
  for (HraVariant v : {HraVariant::full, HraVariant::anomaly_only, HraVariant::reputation_only}) {
    ScenarioConfig cfg = base;
    cfg.hra.variant = v;
    sweep.experiments.push_back(run_experiment(cfg, "hra:" + std::string(to_string(v))));
  }
  sweep.rows = rows_from(sweep.experiments);
  return sweep;
}

ComparisonResult compare_aggregators(const ScenarioConfig& base,
                                     const std::vector<std::string>& rules) {
  if (rules.size() < 2) throw InvalidArgument("compare_aggregators: need at least two rules");
  std::set<std::string> seen;
  for (const auto& r : rules) {
    if (!seen.insert(r).second) {
      throw ConfigError("experiments.compare_rules", "duplicate rule '" + r + "'");
    }
  }
  ComparisonResult out;
  for (const auto& rule : rules) {
    ScenarioConfig cfg = base;
    cfg.aggregator.rule = rule;
    out.experiments.push_back(run_experiment(cfg));
  }
  const auto& reference = out.experiments.front().final_accuracies;
  for (const auto& e : out.experiments) {
    if (reference.size() < 2) {
      out.vs_reference.push_back(std::nullopt);
    } else {
      out.vs_reference.push_back(paired_t_test(e.final_accuracies, reference));
    }
  }
  return out;
}

}  // namespace hrafl
