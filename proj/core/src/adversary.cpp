#include "hrafl/adversary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "hrafl/error.hpp"

namespace hrafl {

namespace {

constexpr std::array<std::pair<AttackKind, std::string_view>, 6> kNames{{
    {AttackKind::none, "none"},
    {AttackKind::label_flipping, "label_flipping"},
    {AttackKind::noise, "noise"},
    {AttackKind::sign_flipping, "sign_flipping"},
    {AttackKind::backdoor, "backdoor"},
    {AttackKind::sybil, "sybil"},
}};

void perturb(ModelParams& params, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  for (double& v : params.w) v += normal(rng);
  params.b += normal(rng);
}

}  // namespace

std::string_view to_string(AttackKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

AttackKind parse_attack_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw InvalidArgument("unknown attack kind '" + std::string(name) +
                        "' (expected none, label_flipping, noise, sign_flipping, backdoor, sybil)");
}

std::size_t AttackConfig::trigger_coordinates(std::size_t d) const {
  const std::size_t k = trigger_count.value_or(std::min<std::size_t>(5, d));
  if (k > d) {
    throw InvalidArgument("backdoor trigger count " + std::to_string(k) +
                          " exceeds model dimension " + std::to_string(d));
  }
  return k;
}

void AttackConfig::validate() const {
  if (!(noise_std > 0.0)) throw InvalidArgument("attack config: noise_std must be > 0");
  if (!(amplification > 0.0)) throw InvalidArgument("attack config: amplification must be > 0");
  if (!std::isfinite(trigger_magnitude)) {
    throw InvalidArgument("attack config: trigger_magnitude must be finite");
  }
  if (!(sybil_scale > 0.0)) throw InvalidArgument("attack config: sybil_scale must be > 0");
}

std::size_t ClientRoster::malicious() const {
  return static_cast<std::size_t>(
      std::count_if(kinds.begin(), kinds.end(), [](AttackKind k) { return k != AttackKind::none; }));
}

std::vector<double> flip_labels(const std::vector<double>& y) {
  std::vector<double> out(y.size());
  std::transform(y.begin(), y.end(), out.begin(), [](double v) { return 1.0 - v; });
  return out;
}

ModelParams apply_post_training_attack(AttackKind kind, const ModelParams& global,
                                       const ModelParams& local, const AttackConfig& cfg,
                                       Rng& rng) {
  if (global.dim() != local.dim()) {
    throw InvalidArgument("attack: global and local models differ in dimension");
  }
  ModelParams out = local;
  switch (kind) {
    case AttackKind::none:
    case AttackKind::label_flipping:
      break;
    case AttackKind::noise:
      perturb(out, cfg.noise_std, rng);
      break;
    case AttackKind::sign_flipping:
      for (std::size_t j = 0; j < out.w.size(); ++j) {
        out.w[j] = global.w[j] - cfg.amplification * (local.w[j] - global.w[j]);
      }
      out.b = global.b - cfg.amplification * (local.b - global.b);
      break;
    case AttackKind::backdoor: {
      const std::size_t k = cfg.trigger_coordinates(out.dim());
      for (std::size_t j = 0; j < k; ++j) out.w[j] += cfg.trigger_magnitude;
      break;
    }
    case AttackKind::sybil:
      perturb(out, cfg.sybil_scale, rng);
      break;
  }
  return out;
}

ClientRoster assign_attacks(std::size_t clients, double malicious_fraction,
                            const std::vector<AttackKind>& kinds, std::uint64_t seed) {
  if (!(malicious_fraction >= 0.0 && malicious_fraction <= 1.0)) {
    throw InvalidArgument("assign_attacks: malicious fraction must lie in [0,1]");
  }
  // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
  const auto count = std::min(
      clients,
      static_cast<std::size_t>(std::floor(malicious_fraction * static_cast<double>(clients) + 1e-9)));
  ClientRoster roster{std::vector<AttackKind>(clients, AttackKind::none)};
  if (count == 0) return roster;
  if (kinds.empty()) throw InvalidArgument("assign_attacks: no attack kinds given");

  std::vector<std::size_t> ids(clients);
  std::iota(ids.begin(), ids.end(), 0);
  auto rng = make_rng(seed, {stream::kRoster});
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(count);
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i) roster.kinds[ids[i]] = kinds[i % kinds.size()];
  return roster;
}

}  // namespace hrafl
