#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "hrafl/error.hpp"
#include "hrafl/hybrid_reputation.hpp"
#include "oracles.hpp"

using namespace hrafl;
using hrafl::testing::Gen;
using hrafl::testing::make_updates;

namespace {

std::vector<ClientId> ids_of(const UpdateSet& u) { return u.ids; }

}  // namespace

TEST_CASE("HraConfig validation") {
  HraConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.t_low = 7.0;
  cfg.t_high = 3.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.rho = 1.5;
  CHECK_THROWS(cfg.validate());
  CHECK(parse_hra_variant("anomaly_only") == HraVariant::anomaly_only);
  CHECK(to_string(HraVariant::reputation_only) == "reputation_only");
  CHECK_THROWS(parse_hra_variant("both"));
}

TEST_CASE("anomaly_scores examples") {
  HraConfig cfg;
  const UpdateSet same = make_updates({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}});
  for (double d : anomaly_scores(same, cfg).distances) CHECK(d == 0.0);

  const AnomalyScores s = anomaly_scores(make_updates({{1.0}, {1.2}, {9.0}}), cfg);
  CHECK(s.reference[0] == doctest::Approx(1.2).epsilon(1e-9));
  CHECK(s.distances[0] == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(s.distances[1] < 1e-9);
  CHECK(s.distances[2] == doctest::Approx(7.8).epsilon(1e-9));
}

TEST_CASE("anomaly distances scale with the client vectors") {
  Gen g(61);
  HraConfig cfg;
  for (int t = 0; t < 50; ++t) {
    const UpdateSet u = g.updates(g.index(2, 8), g.index(1, 4));
    const double c = g.uniform(0.1, 10.0);
    UpdateSet scaled = u;
    for (auto& p : scaled.params) {
      for (double& v : p.w) v *= c;
    }
    const auto a = anomaly_scores(u, cfg).distances;
    const auto b = anomaly_scores(scaled, cfg).distances;
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(b[j] == doctest::Approx(c * a[j]).epsilon(1e-6));
  }
}

TEST_CASE("bias enters the anomaly distance only when enabled") {
  const UpdateSet u = make_updates({{0.0}, {0.0}, {0.0}}, {0.0, 0.0, 50.0});
  HraConfig cfg;
  CHECK(anomaly_scores(u, cfg).distances[2] == 0.0);
  cfg.anomaly_includes_bias = true;
  CHECK(anomaly_scores(u, cfg).distances[2] == doctest::Approx(50.0));
}

TEST_CASE("trust_weight examples") {
  CHECK(trust_weight(2.0, 3.0, 7.0) == 1.0);
  CHECK(trust_weight(5.0, 3.0, 7.0) == 0.5);
  CHECK(trust_weight(7.0, 3.0, 7.0) == 0.0);
  CHECK(trust_weight(3.0, 3.0, 7.0) == 1.0);
  CHECK(trust_weight(1e9, 3.0, 7.0) == 0.0);
}

TEST_CASE("trust_weight equals the piecewise formula on a dense grid") {
  for (int i = 0; i < 10000; ++i) {
    const double delta = static_cast<double>(i) * 0.001;
    CHECK(trust_weight(delta, 3.0, 7.0) == oracle::trust_piecewise(delta, 3.0, 7.0));
  }
}

TEST_CASE("trust_weight is monotone and Lipschitz") {
  Gen g(62);
  for (int t = 0; t < 2000; ++t) {
    const double lo = g.uniform(0.1, 5.0);
    const double hi = lo + g.uniform(0.1, 10.0);
    const double a = g.uniform(0.0, 20.0);
    const double b = g.uniform(0.0, 20.0);
    const double fa = trust_weight(a, lo, hi);
    const double fb = trust_weight(b, lo, hi);
    CHECK(std::fabs(fa - fb) <= std::fabs(a - b) / (hi - lo) + 1e-12);
    if (a <= b) CHECK(fa >= fb);
    CHECK(fa >= 0.0);
    CHECK(fa <= 1.0);
  }
}

TEST_CASE("update_reputation examples") {
  const ReputationState s = ReputationState::initial(std::vector<ClientId>{0, 1}, 1.0);
  const ReputationState n = update_reputation(s, {{0, 0.0}, {1, 1.0}}, 0.5);
  CHECK(n.reputations.at(0) == 0.5);
  CHECK(n.reputations.at(1) == 1.0);
  CHECK(n.rounds_observed == 1);
  CHECK(s.reputations.at(0) == 1.0);  // input untouched
  CHECK(s.rounds_observed == 0);

  CHECK_THROWS_AS(update_reputation(s, {{5, 1.0}}, 0.5), InvalidArgument);
}

TEST_CASE("a reputation equal to its trust weight is a fixed point") {
  Gen g(63);
  for (int t = 0; t < 500; ++t) {
    const double r = g.uniform(0.0, 1.0);
    ReputationState s;
    s.reputations[3] = r;
    const double rho = g.uniform(0.0, 1.0);
    CHECK(update_reputation(s, {{3, r}}, rho).reputations.at(3) == r);
  }
}

TEST_CASE("zero trust decays reputation geometrically") {
  for (double rho : {0.5, 0.3, 0.9, 0.77}) {
    ReputationState s = ReputationState::initial(std::vector<ClientId>{0}, 1.0);
    for (int t = 1; t <= 60; ++t) {
      s = update_reputation(s, {{0, 0.0}}, rho);
      CHECK(std::fabs(s.reputations.at(0) - std::pow(rho, t)) <= 1e-12);
    }
  }
}

TEST_CASE("iterated reputation matches the closed form") {
  Gen g(64);
  for (int t = 0; t < 200; ++t) {
    const double rho = g.uniform(0.0, 1.0);
    const double r0 = g.uniform(0.0, 1.0);
    const std::size_t len = g.index(0, 50);
    std::vector<double> hist;
    ReputationState s = ReputationState::initial(std::vector<ClientId>{7}, r0);
    for (std::size_t i = 0; i < len; ++i) {
      hist.push_back(g.coin(0.3) ? g.uniform(0.0, 1.0) : (g.coin() ? 1.0 : 0.0));
      s = update_reputation(s, {{7, hist.back()}}, rho);
      CHECK(s.reputations.at(7) >= 0.0);
      CHECK(s.reputations.at(7) <= 1.0);
    }
    CHECK(std::fabs(s.reputations.at(7) - closed_form_reputation(r0, rho, hist)) <= 1e-12);
    CHECK(std::fabs(s.reputations.at(7) - oracle::reputation_closed_form(r0, rho, hist)) <= 1e-12);
  }
}

TEST_CASE("closed_form_reputation examples") {
  CHECK(closed_form_reputation(0.8, 0.5, {}) == 0.8);
  const std::vector<double> constant(200, 0.3);
  CHECK(std::fabs(closed_form_reputation(1.0, 0.9, constant) - 0.3) <= 1e-9);
}

TEST_CASE("aggregate_hra worked example") {
  const UpdateSet u = make_updates({{1.0}, {1.2}, {9.0}});
  HraConfig cfg;
  const HraOutcome out = aggregate_hra(u, ReputationState::initial(ids_of(u), 1.0), cfg);
  CHECK(out.diagnostics.trust == std::vector<double>{1.0, 1.0, 0.0});
  CHECK(out.params.w[0] == doctest::Approx(1.1).epsilon(1e-15));
  CHECK_FALSE(out.diagnostics.fallback);
  CHECK(out.state.reputations.at(2) == 0.5);
  CHECK(out.state.reputations.at(0) == 1.0);
}

TEST_CASE("aggregate_hra equals simple_mean bit for bit under benign conditions") {
  Gen g(65);
  HraConfig cfg;
  for (int t = 0; t < 100; ++t) {
    const UpdateSet u = g.updates(g.index(1, 10), g.index(1, 5), 0.0, 0.5);
    const double r = g.uniform(0.1, 1.0);
    const HraOutcome out = aggregate_hra(u, ReputationState::initial(ids_of(u), r), cfg);
    for (double d : out.diagnostics.anomaly) REQUIRE(d <= cfg.t_low);
    CHECK(out.params == simple_mean(u).params);
  }
}

TEST_CASE("aggregate_hra falls back to the reference when no client is trusted") {
  // Triangle vertices: the reference is the Fermat point, far from every vertex.
  const UpdateSet u =
      make_updates({{0.0, 0.0}, {10.0, 0.0}, {5.0, 8.0}}, {1.0, 4.0, 2.0});
  HraConfig cfg;
  cfg.t_low = 0.1;
  cfg.t_high = 0.2;
  const HraOutcome out = aggregate_hra(u, ReputationState::initial(ids_of(u), 1.0), cfg);
  CHECK(out.diagnostics.fallback);
  CHECK(out.params.w == std::vector<double>{out.diagnostics.reference[0], out.diagnostics.reference[1]});
  CHECK(out.params.b == 2.0);  // median of the client biases
  for (const auto& [id, r] : out.state.reputations) CHECK(r == 0.5);

  // Zero reputation everywhere also leaves nothing to weight.
  const UpdateSet near = make_updates({{1.0}, {1.0}, {1.0}, {1.0}}, {1.0, 2.0, 3.0, 4.0});
  const HraOutcome z = aggregate_hra(near, ReputationState::initial(ids_of(near), 0.0), HraConfig{});
  CHECK(z.diagnostics.fallback);
  CHECK(z.params.w == std::vector<double>{1.0});
  CHECK(z.params.b == 2.5);

  cfg.anomaly_includes_bias = true;
  const HraOutcome withb = aggregate_hra(u, ReputationState::initial(ids_of(u), 1.0), cfg);
  CHECK(withb.diagnostics.fallback);
  CHECK(withb.params.b == withb.diagnostics.reference[2]);
}

TEST_CASE("aggregate_hra is a convex combination of the client vectors") {
  Gen g(66);
  for (int t = 0; t < 200; ++t) {
    HraConfig cfg;
    cfg.t_low = g.uniform(0.5, 3.0);
    cfg.t_high = cfg.t_low + g.uniform(0.5, 5.0);
    const UpdateSet u = g.updates(g.index(1, 9), g.index(1, 4), -3.0, 3.0);
    ReputationState s = ReputationState::initial(ids_of(u), 1.0);
    for (auto& [id, r] : s.reputations) r = g.uniform(0.0, 1.0);
    const HraOutcome out = aggregate_hra(u, s, cfg);
    if (out.diagnostics.fallback) continue;
    for (std::size_t k = 0; k < out.params.dim(); ++k) {
      double lo = INFINITY;
      double hi = -INFINITY;
      for (const auto& p : u.params) {
        lo = std::min(lo, p.w[k]);
        hi = std::max(hi, p.w[k]);
      }
      CHECK(out.params.w[k] >= lo - 1e-12);
      CHECK(out.params.w[k] <= hi + 1e-12);
    }
  }
}

TEST_CASE("with rho = 0 and full initial trust, round one of full equals anomaly_only") {
  Gen g(67);
  for (int t = 0; t < 50; ++t) {
    const UpdateSet u = g.updates(g.index(2, 8), 2, -6.0, 6.0);
    HraConfig full;
    full.rho = 0.0;
    HraConfig anomaly = full;
    anomaly.variant = HraVariant::anomaly_only;
    const auto s = ReputationState::initial(ids_of(u), 1.0);
    CHECK(aggregate_hra(u, s, full).params == aggregate_hra(u, s, anomaly).params);
  }
}

TEST_CASE("variants weight and update as documented") {
  const UpdateSet u = make_updates({{1.0}, {1.2}, {9.0}});
  ReputationState s = ReputationState::initial(ids_of(u), 1.0);
  s.reputations[0] = 0.5;

  HraConfig cfg;
  cfg.variant = HraVariant::anomaly_only;
  const HraOutcome a = aggregate_hra(u, s, cfg);
  CHECK(a.state == s);
  CHECK(a.diagnostics.combined == std::vector<double>{1.0, 1.0, 0.0});

  cfg.variant = HraVariant::reputation_only;
  const HraOutcome r = aggregate_hra(u, s, cfg);
  CHECK(r.diagnostics.combined == std::vector<double>{0.5, 1.0, 1.0});
  CHECK(r.state.reputations.at(2) == 0.5);
  CHECK(r.state.reputations.at(0) == 0.75);

  cfg.variant = HraVariant::full;
  const HraOutcome f = aggregate_hra(u, s, cfg);
  CHECK(f.diagnostics.combined == std::vector<double>{0.5, 1.0, 0.0});
  // weights use the pre-update reputation 0.5 for client 0
  CHECK(f.params.w[0] == doctest::Approx((0.5 * 1.0 + 1.2) / 1.5).epsilon(1e-15));
}

TEST_CASE("unseen clients join at the initial reputation") {
  const UpdateSet u = make_updates({{1.0}, {1.1}});
  HraConfig cfg;
  cfg.initial_reputation = 0.8;
  const HraOutcome out = aggregate_hra(u, ReputationState{}, cfg);
  CHECK(out.state.reputations.size() == 2);
  CHECK(out.state.reputations.at(0) == doctest::Approx(0.8 + 0.5 * 0.2));
}

TEST_CASE("aggregate_hra rejects an empty update set") {
  CHECK_THROWS_AS(aggregate_hra(UpdateSet{}, ReputationState{}, HraConfig{}), InvalidArgument);
}
