#include "hrafl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hrafl/error.hpp"
#include "json.hpp"

namespace hrafl {

namespace {

using nlohmann::json;

constexpr const char* kManifestMarker = "hrafl-manifest";

std::string join_key(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Strict view over one JSON object: every key must be consumed.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError(prefix_, "expected an object");
  }

  ~ObjectReader() = default;
  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* find(const std::string& key) {
    consumed_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string key(const std::string& k) const { return join_key(prefix_, k); }

  void real(const std::string& k, double& out) {
    if (const json* v = find(k)) {
      if (!v->is_number()) throw ConfigError(key(k), "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void count(const std::string& k, Int& out) {
    if (const json* v = find(k)) out = as_count<Int>(*v, key(k));
  }

  void count(const std::string& k, std::optional<std::size_t>& out) {
    if (const json* v = find(k)) {
      if (v->is_null()) out.reset();
      else out = as_count<std::size_t>(*v, key(k));
    }
  }

  void flag(const std::string& k, bool& out) {
    if (const json* v = find(k)) {
      if (!v->is_boolean()) throw ConfigError(key(k), "expected true or false");
      out = v->get<bool>();
    }
  }

  void text(const std::string& k, std::string& out) {
    if (const json* v = find(k)) {
      if (!v->is_string()) throw ConfigError(key(k), "expected a string");
      out = v->get<std::string>();
    }
  }

  void texts(const std::string& k, std::vector<std::string>& out) {
    if (const json* v = find(k)) {
      if (!v->is_array()) throw ConfigError(key(k), "expected an array of strings");
      out.clear();
      for (const auto& item : *v) {
        if (!item.is_string()) throw ConfigError(key(k), "expected an array of strings");
        out.push_back(item.get<std::string>());
      }
    }
  }

  void reals(const std::string& k, std::vector<double>& out) {
    if (const json* v = find(k)) {
      if (!v->is_array()) throw ConfigError(key(k), "expected an array of numbers");
      out.clear();
      for (const auto& item : *v) {
        if (!item.is_number()) throw ConfigError(key(k), "expected an array of numbers");
        out.push_back(item.get<double>());
      }
    }
  }

  // Throws on the first key nobody asked for.
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (consumed_.count(it.key()) == 0) throw ConfigError(key(it.key()), "unknown key");
    }
  }

 private:
  template <typename Int>
  static Int as_count(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return static_cast<Int>(v.get<std::uint64_t>());
    if (v.is_number_integer()) {
      if (v.get<std::int64_t>() < 0) throw ConfigError(key, "must be non-negative");
      return static_cast<Int>(v.get<std::int64_t>());
    }
    throw ConfigError(key, "expected a non-negative integer");
  }

  const json& obj_;
  std::string prefix_;
  std::set<std::string> consumed_;
};

template <typename Fn>
void with_object(ObjectReader& parent, const std::string& key, Fn&& fn) {
  if (const json* v = parent.find(key)) {
    ObjectReader child(*v, parent.key(key));
    fn(child);
    child.finish();
  }
}

void read_geomed(ObjectReader& r, GeoMedConfig& g) {
  r.real("tolerance", g.tolerance);
  r.count("max_iterations", g.max_iterations);
  r.real("epsilon", g.epsilon);
}

ScenarioConfig read_scenario(const json& doc) {
  ScenarioConfig cfg;
  ObjectReader top(doc, "");
  top.text("name", cfg.name);
  top.count("clients", cfg.clients);
  top.count("rounds", cfg.rounds);
  top.count("runs", cfg.runs);
  top.count("seed", cfg.seed);
  top.count("threads", cfg.threads);

  with_object(top, "data", [&](ObjectReader& r) {
    std::string source = std::string(to_string(cfg.data.source));
    r.text("source", source);
    if (source == "synthetic") cfg.data.source = DataSourceKind::synthetic;
    else if (source == "csv") cfg.data.source = DataSourceKind::csv;
    else throw ConfigError(r.key("source"), "expected 'synthetic' or 'csv'");

    with_object(r, "synthetic", [&](ObjectReader& s) {
      auto& spec = cfg.data.synthetic;
      s.count("n_train", spec.n_train);
      s.count("n_test", spec.n_test);
      s.count("features", spec.features);
      s.real("positive_fraction", spec.positive_fraction);
      s.real("separation", spec.separation);
      s.real("noise", spec.noise);
    });
    with_object(r, "csv", [&](ObjectReader& c) {
      auto& csv = cfg.data.csv;
      c.text("train", csv.train_path);
      c.text("test", csv.test_path);
      c.text("label_column", csv.label_column);
      c.texts("positive_labels", csv.positive_labels);
      c.texts("negative_labels", csv.negative_labels);
      c.real("test_fraction", csv.test_fraction);
    });
  });

  with_object(top, "partition", [&](ObjectReader& r) {
    std::string mode = std::string(to_string(cfg.partition.mode));
    r.text("mode", mode);
    if (mode == "uniform") cfg.partition.mode = PartitionMode::uniform;
    else if (mode == "dirichlet") cfg.partition.mode = PartitionMode::dirichlet;
    else throw ConfigError(r.key("mode"), "expected 'uniform' or 'dirichlet'");
    r.real("alpha", cfg.partition.alpha);
  });

  with_object(top, "train", [&](ObjectReader& r) {
    r.real("eta0", cfg.train.eta0);
    r.real("gamma", cfg.train.gamma);
    r.count("epochs", cfg.train.epochs);
  });

  with_object(top, "attacks", [&](ObjectReader& r) {
    auto& roster = cfg.roster;
    r.real("malicious_fraction", roster.malicious_fraction);
    std::vector<std::string> kinds;
    r.texts("kinds", kinds);
    roster.kinds.clear();
    for (const auto& k : kinds) {
      try {
        roster.kinds.push_back(parse_attack_kind(k));
      } catch (const Error& e) {
        throw ConfigError(r.key("kinds"), e.what());
      }
    }
    r.real("noise_std", roster.attack.noise_std);
    r.real("amplification", roster.attack.amplification);
    r.real("trigger_magnitude", roster.attack.trigger_magnitude);
    r.count("trigger_count", roster.attack.trigger_count);
    r.real("sybil_scale", roster.attack.sybil_scale);
    r.flag("sybil_collusion", roster.attack.sybil_collusion);
  });

  with_object(top, "aggregator", [&](ObjectReader& r) {
    auto& agg = cfg.aggregator;
    r.text("rule", agg.rule);
    r.count("krum_f", agg.krum_f);
    r.count("bulyan_f", agg.bulyan_f);
    r.count("trim_k", agg.trim_k);
    r.count("multi_krum_m", agg.multi_krum_m);
    with_object(r, "geomed", [&](ObjectReader& g) { read_geomed(g, agg.geomed); });
  });

  with_object(top, "hra", [&](ObjectReader& r) {
    auto& hra = cfg.hra;
    r.real("t_low", hra.t_low);
    r.real("t_high", hra.t_high);
    r.real("rho", hra.rho);
    std::string variant = std::string(to_string(hra.variant));
    r.text("variant", variant);
    try {
      hra.variant = parse_hra_variant(variant);
    } catch (const Error& e) {
      throw ConfigError(r.key("variant"), e.what());
    }
    r.real("initial_reputation", hra.initial_reputation);
    r.flag("anomaly_includes_bias", hra.anomaly_includes_bias);
  });

  with_object(top, "experiments", [&](ObjectReader& r) {
    auto& plan = cfg.experiments;
    r.texts("compare_rules", plan.compare_rules);
    if (const json* pairs = r.find("threshold_pairs")) {
      const std::string key = r.key("threshold_pairs");
      if (!pairs->is_array()) throw ConfigError(key, "expected an array of [t_low, t_high] pairs");
      plan.threshold_pairs.clear();
      for (const auto& p : *pairs) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          throw ConfigError(key, "expected an array of [t_low, t_high] pairs");
        }
        plan.threshold_pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
    }
    r.reals("learning_rates", plan.learning_rates);
  });

  top.finish();
  resolve_defaults(cfg);
  cfg.validate();
  return cfg;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override must look like dotted.key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) throw ConfigError(key, "empty path segment in override");
    path.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    json& next = (*node)[path[i]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError(key, "'" + path[i] + "' is not an object");
    node = &next;
  }
  (*node)[path.back()] = std::move(value);
}

json parse_document(const std::string& text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false, /*ignore_comments=*/true);
  if (doc.is_discarded()) throw ConfigError("", "config is not valid JSON");
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  return doc;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  json doc = parse_document(text);
  json* scenario = &doc;
  if (doc.contains("artifact") && doc["artifact"] == kManifestMarker) {
    if (!doc.contains("config")) throw ConfigError("config", "manifest has no config object");
    scenario = &doc["config"];
  }
  for (const auto& o : overrides) apply_override(*scenario, o);
  return read_scenario(*scenario);
}

ScenarioConfig parse_config(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config_text(buffer.str(), overrides);
  } catch (const ConfigError& e) {
    throw ConfigError(e.key(), std::string(e.what()) + " (in " + path.string() + ")");
  }
}

std::string config_to_json(const ScenarioConfig& cfg, int indent) {
  auto opt = [](const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); };
  auto geomed = [](const GeoMedConfig& g) {
    return json{{"tolerance", g.tolerance}, {"max_iterations", g.max_iterations}, {"epsilon", g.epsilon}};
  };

  json kinds = json::array();
  for (AttackKind k : cfg.roster.kinds) kinds.push_back(std::string(to_string(k)));
  json pairs = json::array();
  for (const auto& [lo, hi] : cfg.experiments.threshold_pairs) pairs.push_back({lo, hi});

  const auto& s = cfg.data.synthetic;
  const auto& c = cfg.data.csv;
  json doc = {
      {"name", cfg.name},
      {"clients", cfg.clients},
      {"rounds", cfg.rounds},
      {"runs", cfg.runs},
      {"seed", cfg.seed},
      {"threads", cfg.threads},
      {"data",
       {{"source", std::string(to_string(cfg.data.source))},
        {"synthetic",
         {{"n_train", s.n_train},
          {"n_test", s.n_test},
          {"features", s.features},
          {"positive_fraction", s.positive_fraction},
          {"separation", s.separation},
          {"noise", s.noise}}},
        {"csv",
         {{"train", c.train_path},
          {"test", c.test_path},
          {"label_column", c.label_column},
          {"positive_labels", c.positive_labels},
          {"negative_labels", c.negative_labels},
          {"test_fraction", c.test_fraction}}}}},
      {"partition", {{"mode", std::string(to_string(cfg.partition.mode))}, {"alpha", cfg.partition.alpha}}},
      {"train", {{"eta0", cfg.train.eta0}, {"gamma", cfg.train.gamma}, {"epochs", cfg.train.epochs}}},
      {"attacks",
       {{"malicious_fraction", cfg.roster.malicious_fraction},
        {"kinds", kinds},
        {"noise_std", cfg.roster.attack.noise_std},
        {"amplification", cfg.roster.attack.amplification},
        {"trigger_magnitude", cfg.roster.attack.trigger_magnitude},
        {"trigger_count", opt(cfg.roster.attack.trigger_count)},
        {"sybil_scale", cfg.roster.attack.sybil_scale},
        {"sybil_collusion", cfg.roster.attack.sybil_collusion}}},
      {"aggregator",
       {{"rule", cfg.aggregator.rule},
        {"krum_f", opt(cfg.aggregator.krum_f)},
        {"bulyan_f", opt(cfg.aggregator.bulyan_f)},
        {"trim_k", opt(cfg.aggregator.trim_k)},
        {"multi_krum_m", opt(cfg.aggregator.multi_krum_m)},
        {"geomed", geomed(cfg.aggregator.geomed)}}},
      {"hra",
       {{"t_low", cfg.hra.t_low},
        {"t_high", cfg.hra.t_high},
        {"rho", cfg.hra.rho},
        {"variant", std::string(to_string(cfg.hra.variant))},
        {"initial_reputation", cfg.hra.initial_reputation},
        {"anomaly_includes_bias", cfg.hra.anomaly_includes_bias}}},
      {"experiments",
       {{"compare_rules", cfg.experiments.compare_rules},
        {"threshold_pairs", pairs},
        {"learning_rates", cfg.experiments.learning_rates}}},
  };
  return doc.dump(indent);
}

}  // namespace hrafl
