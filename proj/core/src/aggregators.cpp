#include "hrafl/aggregators.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "hrafl/error.hpp"

namespace hrafl {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sq += diff * diff;
  }
  return sq;
}

// Krum score of every member of `active` against the other active members.
std::vector<double> scores_among(const std::vector<std::vector<double>>& points,
                                 const std::vector<std::size_t>& active, std::size_t neighbors) {
  std::vector<double> scores(active.size(), 0.0);
  std::vector<double> dists;
  for (std::size_t a = 0; a < active.size(); ++a) {
    dists.clear();
    for (std::size_t o = 0; o < active.size(); ++o) {
      if (o != a) dists.push_back(squared_distance(points[active[a]], points[active[o]]));
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t take = std::min(neighbors, dists.size());
    double total = 0.0;
    for (std::size_t i = 0; i < take; ++i) total += dists[i];
    scores[a] = total;
  }
  return scores;
}

// Repeatedly removes the current Krum winner from the active set. Returns
// indices into the update set in selection order.
std::vector<std::size_t> iterated_krum(const UpdateSet& updates,
                                       const std::vector<std::vector<double>>& points,
                                       std::size_t f, std::size_t count) {
  std::vector<std::size_t> active(updates.size());
  std::iota(active.begin(), active.end(), 0);
  std::vector<std::size_t> selected;
  while (selected.size() < count) {
    const std::size_t neighbors = active.size() >= f + 2 ? active.size() - f - 2 : 0;
    const auto scores = scores_among(points, active, neighbors);
    std::size_t best = 0;
    for (std::size_t a = 1; a < active.size(); ++a) {
      if (scores[a] < scores[best] ||
          (scores[a] == scores[best] && updates.ids[active[a]] < updates.ids[active[best]])) {
        best = a;
      }
    }
    selected.push_back(active[best]);
    active.erase(active.begin() + static_cast<long>(best));
  }
  return selected;
}

AggregationResult mean_of_selected(const UpdateSet& updates,
                                   const std::vector<std::vector<double>>& points,
                                   std::vector<std::size_t> selected) {
  std::sort(selected.begin(), selected.end());
  const std::size_t p = points.front().size();
  std::vector<double> sum(p, 0.0);
  for (std::size_t idx : selected) {
    for (std::size_t k = 0; k < p; ++k) sum[k] += points[idx][k];
  }
  const double m = static_cast<double>(selected.size());
  for (double& v : sum) v /= m;
  AggregationResult result;
  result.params = unflatten(sum);
  result.weights.assign(updates.size(), 0.0);
  for (std::size_t idx : selected) result.weights[idx] = 1.0 / m;
  result.diagnostics["selected"] = m;
  return result;
}

// Client indices ordered by (value, index) for one coordinate.
std::vector<std::size_t> order_by_value(const std::vector<std::vector<double>>& points,
                                        const std::vector<std::size_t>& members, std::size_t k) {
  std::vector<std::size_t> order = members;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a][k] != points[b][k]) return points[a][k] < points[b][k];
    return a < b;
  });
  return order;
}

double median_sorted(const std::vector<std::vector<double>>& points,
                     const std::vector<std::size_t>& order, std::size_t k) {
  const std::size_t n = order.size();
  if (n % 2 == 1) return points[order[n / 2]][k];
  return 0.5 * (points[order[n / 2 - 1]][k] + points[order[n / 2]][k]);
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

void require_krum_bound(std::size_t m, std::size_t f, const char* rule) {
  if (m < f + 3) {
    throw InvalidArgument(std::string(rule) + " needs at least f + 3 = " + std::to_string(f + 3) +
                          " updates, got " + std::to_string(m));
  }
}

}  // namespace

void UpdateSet::validate() const {
  if (params.empty()) throw InvalidArgument("update set is empty");
  if (ids.size() != params.size()) throw InvalidArgument("update set: ids and params differ in length");
  std::set<ClientId> seen(ids.begin(), ids.end());
  if (seen.size() != ids.size()) throw InvalidArgument("update set: duplicate client ids");
  const std::size_t d = params.front().dim();
  if (d == 0) throw InvalidArgument("update set: zero-dimensional model");
  for (const auto& p : params) {
    if (p.dim() != d) throw InvalidArgument("update set: client models differ in dimension");
  }
}

std::vector<double> flatten(const ModelParams& params) {
  if (params.w.empty()) throw InvalidArgument("flatten: zero-dimensional model");
  std::vector<double> flat = params.w;
  flat.push_back(params.b);
  return flat;
}

ModelParams unflatten(const std::vector<double>& flat) {
  if (flat.size() < 2) throw InvalidArgument("unflatten: need at least one weight plus the bias");
  return {std::vector<double>(flat.begin(), flat.end() - 1), flat.back()};
}

std::vector<std::vector<double>> flatten_all(const UpdateSet& updates) {
  std::vector<std::vector<double>> out;
  out.reserve(updates.size());
  for (const auto& p : updates.params) out.push_back(flatten(p));
  return out;
}

AggregationResult simple_mean(const UpdateSet& updates) {
  updates.validate();
  const auto points = flatten_all(updates);
  AggregationResult result = mean_of_selected(updates, points, all_indices(updates.size()));
  result.diagnostics.clear();
  return result;
}

AggregationResult coordinate_median(const UpdateSet& updates) {
  updates.validate();
  const auto points = flatten_all(updates);
  const std::size_t n = points.size();
  const std::size_t p = points.front().size();
  const auto members = all_indices(n);
  std::vector<double> out(p);
  std::vector<double> share(n, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    const auto order = order_by_value(points, members, k);
    out[k] = median_sorted(points, order, k);
    if (n % 2 == 1) {
      share[order[n / 2]] += 1.0;
    } else {
      share[order[n / 2 - 1]] += 0.5;
      share[order[n / 2]] += 0.5;
    }
  }
  AggregationResult result;
  result.params = unflatten(out);
  for (double& s : share) s /= static_cast<double>(p);
  result.weights = std::move(share);
  return result;
}

AggregationResult trimmed_mean(const UpdateSet& updates, std::size_t k) {
  updates.validate();
  const std::size_t n = updates.size();
  if (2 * k >= n) {
    throw InvalidArgument("trimmed_mean: trimming " + std::to_string(k) + " per side leaves nothing of " +
                          std::to_string(n) + " updates (need 2k < M)");
  }
  const auto points = flatten_all(updates);
  const std::size_t p = points.front().size();
  const auto members = all_indices(n);
  const std::size_t kept = n - 2 * k;
  std::vector<double> out(p);
  std::vector<double> share(n, 0.0);
  for (std::size_t c = 0; c < p; ++c) {
    const auto order = order_by_value(points, members, c);
    double sum = 0.0;
    for (std::size_t i = k; i < n - k; ++i) {
      sum += points[order[i]][c];
      share[order[i]] += 1.0;
    }
    out[c] = sum / static_cast<double>(kept);
  }
  AggregationResult result;
  result.params = unflatten(out);
  for (double& s : share) s /= static_cast<double>(kept * p);
  result.weights = std::move(share);
  result.diagnostics["trim_k"] = static_cast<double>(k);
  return result;
}

std::vector<double> krum_scores(const UpdateSet& updates, std::size_t f) {
  updates.validate();
  require_krum_bound(updates.size(), f, "krum");
  const auto points = flatten_all(updates);
  return scores_among(points, all_indices(updates.size()), updates.size() - f - 2);
}

AggregationResult krum_select(const UpdateSet& updates, std::size_t f) {
  return multi_krum(updates, f, 1);
}

AggregationResult multi_krum(const UpdateSet& updates, std::size_t f, std::size_t m) {
  updates.validate();
  require_krum_bound(updates.size(), f, "multi_krum");
  if (m < 1 || m > updates.size() - f - 2) {
    throw InvalidArgument("multi_krum: selection count m=" + std::to_string(m) +
                          " must lie in [1, M - f - 2 = " + std::to_string(updates.size() - f - 2) +
                          "]");
  }
  const auto points = flatten_all(updates);
  auto result = mean_of_selected(updates, points, iterated_krum(updates, points, f, m));
  result.diagnostics["f"] = static_cast<double>(f);
  return result;
}

AggregationResult bulyan(const UpdateSet& updates, std::size_t f) {
  updates.validate();
  const std::size_t n = updates.size();
  if (n < 4 * f + 3) {
    throw InvalidArgument("bulyan requires M >= 4f + 3 = " + std::to_string(4 * f + 3) + ", got M=" +
                          std::to_string(n));
  }
  const auto points = flatten_all(updates);
  const std::size_t p = points.front().size();
  const std::size_t theta = n - 2 * f;
  const std::size_t beta = theta - 2 * f;

  auto candidates = iterated_krum(updates, points, f, theta);
  std::sort(candidates.begin(), candidates.end());

  std::vector<double> out(p);
  std::vector<double> share(n, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    const auto by_value = order_by_value(points, candidates, k);
    const double med = median_sorted(points, by_value, k);
    auto closest = by_value;
    std::stable_sort(closest.begin(), closest.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(points[a][k] - med) < std::abs(points[b][k] - med);
    });
    double sum = 0.0;
    for (std::size_t i = 0; i < beta; ++i) {
      sum += points[closest[i]][k];
      share[closest[i]] += 1.0;
    }
    out[k] = sum / static_cast<double>(beta);
  }
  AggregationResult result;
  result.params = unflatten(out);
  for (double& s : share) s /= static_cast<double>(beta * p);
  result.weights = std::move(share);
  result.diagnostics["f"] = static_cast<double>(f);
  result.diagnostics["theta"] = static_cast<double>(theta);
  result.diagnostics["beta"] = static_cast<double>(beta);
  return result;
}

AggregationResult geometric_median_rule(const UpdateSet& updates, const GeoMedConfig& cfg) {
  updates.validate();
  const auto sol = solve_geometric_median(flatten_all(updates), cfg);
  AggregationResult result;
  result.params = unflatten(sol.point);
  result.weights = sol.weights;
  result.diagnostics["iterations"] = static_cast<double>(sol.iterations);
  result.diagnostics["converged"] = sol.converged ? 1.0 : 0.0;
  return result;
}

const std::vector<std::string>& memoryless_rule_names() {
  static const std::vector<std::string> names{
      "bulyan", "coordinate_median", "geometric_median", "krum",
      "multi_krum", "simple_mean", "trimmed_mean"};
  return names;
}

AggregationResult aggregate(const std::string& rule, const UpdateSet& updates,
                            const RuleConfig& config) {
  auto need = [&](const std::optional<std::size_t>& v, const char* key) {
    if (!v) throw ConfigError(key, "rule '" + rule + "' requires this setting");
    return *v;
  };
  if (rule == "simple_mean") return simple_mean(updates);
  if (rule == "coordinate_median") return coordinate_median(updates);
  if (rule == "trimmed_mean") return trimmed_mean(updates, need(config.trim_k, "trim_k"));
  if (rule == "krum") return krum_select(updates, need(config.f, "f"));
  if (rule == "multi_krum") {
    return multi_krum(updates, need(config.f, "f"), need(config.multi_krum_m, "multi_krum_m"));
  }
  if (rule == "bulyan") return bulyan(updates, need(config.f, "f"));
  if (rule == "geometric_median") return geometric_median_rule(updates, config.geomed);

  std::string known;
  for (const auto& name : memoryless_rule_names()) known += (known.empty() ? "" : ", ") + name;
  throw ConfigError("aggregator.rule", "unknown rule '" + rule + "' (available: " + known + ")");
}

}  // namespace hrafl
