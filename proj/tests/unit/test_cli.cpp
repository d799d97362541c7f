#include <sstream>

#include "cli_app.hpp"
#include "doctest.h"
#include "temp_dir.hpp"

using hrafl::testing::TempDir;
using hrafl::testing::read_file;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = hrafl::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kScenario = R"({
  "name": "cli-small", "clients": 5, "rounds": 3, "runs": 2, "seed": 3,
  "data": {"source": "synthetic", "synthetic": {"n_train": 300, "n_test": 100, "features": 3}},
  "attacks": {"malicious_fraction": 0.2, "kinds": ["noise"]},
  "experiments": {"compare_rules": ["hra", "simple_mean"], "threshold_pairs": [[3, 7], [10, 20]],
                  "learning_rates": [0.1, 0.05]}
})";

}  // namespace

TEST_CASE("validate-config writes nothing") {
  TempDir dir;
  const auto cfg = dir.write("s.json", kScenario);
  const Outcome o = invoke({"validate-config", "--config", cfg.string(), "--out", (dir / "out").string()});
  CHECK(o.code == 0);
  CHECK(o.out == "ok: cli-small\n");
  CHECK(o.err.empty());
  CHECK_FALSE(std::filesystem::exists(dir / "out"));
}

TEST_CASE("run is byte-for-byte reproducible") {
  TempDir dir;
  const auto cfg = dir.write("s.json", kScenario);
  const auto a = dir / "a";
  const auto b = dir / "b";
  REQUIRE(invoke({"run", "--config", cfg.string(), "--out", a.string(), "-q"}).code == 0);
  const Outcome second = invoke({"run", "--config", cfg.string(), "--out", b.string(), "--set", "threads=3"});
  REQUIRE(second.code == 0);
  CHECK(second.out.find("hra: final accuracy") != std::string::npos);
  for (const char* file : {"rounds.csv", "summary.csv", "reputations.csv"}) {
    CHECK(read_file(a / "s-run" / file) == read_file(b / "s-run" / file));
  }
}

TEST_CASE("a manifest reproduces its run") {
  TempDir dir;
  const auto cfg = dir.write("s.json", kScenario);
  REQUIRE(invoke({"compare", "--config", cfg.string(), "--out", dir.path().string(), "-q"}).code == 0);
  const auto first = dir / "s-compare";
  const auto manifest = dir.write("manifest.json", read_file(first / "manifest.json"));
  REQUIRE(invoke({"compare", "--config", manifest.string(), "--out", dir.path().string(), "-q"}).code == 0);
  const auto second = dir / "manifest-compare";
  CHECK(read_file(first / "rounds.csv") == read_file(second / "rounds.csv"));
  CHECK(read_file(first / "summary.csv") == read_file(second / "summary.csv"));
  CHECK(read_file(first / "manifest.json") == read_file(second / "manifest.json"));
}

TEST_CASE("sweeps and gen-data write their outputs") {
  TempDir dir;
  const auto cfg = dir.write("s.json", kScenario);
  const std::string out = dir.path().string();
  CHECK(invoke({"sweep-thresholds", "--config", cfg.string(), "--out", out, "--runs", "1", "-q"}).code == 0);
  CHECK(std::filesystem::exists(dir / "s-sweep-thresholds" / "sweep.csv"));
  CHECK(invoke({"sweep-lr", "--config", cfg.string(), "--out", out, "--runs", "1", "-q"}).code == 0);
  CHECK(std::filesystem::exists(dir / "s-sweep-lr" / "sweep.csv"));
  CHECK(invoke({"ablate-synergy", "--config", cfg.string(), "--out", out, "--runs", "1", "-q"}).code == 0);
  CHECK(read_file(dir / "s-ablate-synergy" / "sweep.csv").find("hra:reputation_only") != std::string::npos);
  CHECK(invoke({"gen-data", "--config", cfg.string(), "--out", out, "-q"}).code == 0);
  CHECK(std::filesystem::exists(dir / "s-gen-data" / "train.csv"));
  CHECK(std::filesystem::exists(dir / "s-gen-data" / "test.csv"));
}

TEST_CASE("failures exit non-zero and explain themselves on stderr") {
  TempDir dir;
  const auto cfg = dir.write("s.json", kScenario);
  const std::string out = dir.path().string();

  const Outcome one_rule =
      invoke({"compare", "--config", cfg.string(), "--out", out, "--set", "experiments.compare_rules=[\"hra\"]"});
  CHECK(one_rule.code == hrafl::cli::kExitUsage);
  CHECK_FALSE(one_rule.err.empty());

  const Outcome bad_key = invoke({"run", "--config", cfg.string(), "--out", out, "--set", "hra.t_low=9"});
  CHECK(bad_key.code == hrafl::cli::kExitFailure);
  CHECK(bad_key.err.find("hra.t_low/hra.t_high") != std::string::npos);

  const Outcome missing = invoke({"run", "--config", (dir / "nope.json").string()});
  CHECK(missing.code == hrafl::cli::kExitUsage);
  CHECK_FALSE(missing.err.empty());

  const Outcome no_sub = invoke({});
  CHECK(no_sub.code == hrafl::cli::kExitUsage);
  CHECK_FALSE(no_sub.err.empty());

  const Outcome ok = invoke({"validate-config", "--config", cfg.string(), "-q"});
  CHECK(ok.code == 0);
  CHECK(ok.out.empty());
  CHECK(ok.err.empty());
}
