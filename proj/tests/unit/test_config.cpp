#include "doctest.h"
#include "hrafl/config.hpp"
#include "hrafl/error.hpp"
#include "json.hpp"
#include "temp_dir.hpp"

using namespace hrafl;
using hrafl::testing::TempDir;

namespace {

std::string error_key(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config_text(text, overrides);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

const char* kMinimal = R"({"data": {"source": "synthetic"}, "aggregator": {"rule": "krum"}})";

}  // namespace

TEST_CASE("minimal config resolves every default") {
  const ScenarioConfig cfg = parse_config_text(kMinimal);
  CHECK(cfg.aggregator.rule == "krum");
  CHECK(cfg.clients == 10);
  CHECK(cfg.rounds == 20);
  CHECK(cfg.runs == 5);
  CHECK(cfg.hra.t_low == 3.0);
  CHECK(cfg.hra.t_high == 7.0);
  CHECK(cfg.hra.rho == 0.5);
  CHECK(cfg.train.eta0 == 0.1);
  CHECK(cfg.train.gamma == 0.998);
  CHECK(cfg.aggregator.krum_f == std::optional<std::size_t>(3));
  CHECK(cfg.aggregator.bulyan_f == std::optional<std::size_t>(1));
  CHECK(cfg.aggregator.trim_k == std::optional<std::size_t>(2));
  CHECK(cfg.aggregator.multi_krum_m == std::optional<std::size_t>(5));

  const auto echo = nlohmann::json::parse(config_to_json(cfg));
  CHECK(echo["hra"]["t_low"] == 3.0);
  CHECK(echo["aggregator"]["krum_f"] == 3);
  CHECK(echo["train"]["eta0"] == 0.1);
}

TEST_CASE("overrides apply after the file") {
  const ScenarioConfig cfg = parse_config_text(kMinimal, {"hra.t_low=5.0", "name=renamed", "runs=2"});
  CHECK(cfg.hra.t_low == 5.0);
  CHECK(cfg.name == "renamed");
  CHECK(cfg.runs == 2);
  CHECK(error_key(kMinimal, {"hra.t_low"}) == "hra.t_low");
  CHECK(error_key(kMinimal, {"hra.bogus=1"}) == "hra.bogus");
}

TEST_CASE("invalid documents name the offending key") {
  CHECK(error_key(R"({"hra": {"t_low": 7, "t_high": 3}})") == "hra.t_low/hra.t_high");
  CHECK(error_key(R"({"hra": {"t_lo": 3}})") == "hra.t_lo");
  CHECK(error_key(R"({"clients": "ten"})") == "clients");
  CHECK(error_key(R"({"clients": -1})") == "clients");
  CHECK(error_key(R"({"aggregator": {"rule": "median"}})") == "aggregator.rule");
  CHECK(error_key(R"({"attacks": {"kinds": ["teleport"]}})") == "attacks.kinds");
  CHECK(error_key(R"({"attacks": {"malicious_fraction": 0.5}})") == "attacks.kinds");
  CHECK(error_key(R"({"partition": {"mode": "zipf"}})") == "partition.mode");
  CHECK(error_key(R"({"train": {"gamma": 1.5}})") == "train.gamma");
  CHECK(error_key(R"({"clients": 4, "aggregator": {"rule": "bulyan", "bulyan_f": 1}})") ==
        "aggregator.bulyan_f");
  CHECK(error_key(R"({"experiments": {"threshold_pairs": [[5, 2]]}})") ==
        "experiments.threshold_pairs");
  CHECK(error_key("[1, 2]").empty());
  CHECK(error_key("{not json").empty());
}

TEST_CASE("config echo round-trips") {
  const ScenarioConfig cfg =
      parse_config_text(R"({"name": "x", "seed": 12345678901, "hra": {"rho": 0.25, "variant": "anomaly_only"},
                            "attacks": {"malicious_fraction": 0.3, "kinds": ["noise", "backdoor"]}})");
  const ScenarioConfig again = parse_config_text(config_to_json(cfg));
  CHECK(again == cfg);
}

TEST_CASE("manifest documents are accepted as configs") {
  const ScenarioConfig cfg = parse_config_text(kMinimal, {"seed=42"});
  const std::string manifest = std::string(R"({"artifact": "hrafl-manifest", "version": "0", "config": )") +
                               config_to_json(cfg) + "}";
  CHECK(parse_config_text(manifest) == cfg);
  CHECK(error_key(R"({"artifact": "hrafl-manifest"})") == "config");
}

TEST_CASE("parse_config reads files and reports the path") {
  TempDir dir;
  dir.write("a.json", kMinimal);
  CHECK(parse_config(dir / "a.json").aggregator.rule == "krum");
  dir.write("bad.json", R"({"rounds": 0})");
  try {
    parse_config(dir / "bad.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "rounds");
    CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(dir / "missing.json"), ConfigError);
}
