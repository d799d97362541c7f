#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrafl/model.hpp"
#include "hrafl/rng.hpp"

namespace hrafl {

enum class AttackKind { none, label_flipping, noise, sign_flipping, backdoor, sybil };

std::string_view to_string(AttackKind kind);
// Throws InvalidArgument on an unknown name.
AttackKind parse_attack_kind(std::string_view name);

struct AttackConfig {
  double noise_std = 1.0;
  double amplification = 3.0;
  double trigger_magnitude = 5.0;
  // Leading weight coordinates receiving the trigger; unset means min(5, d).
  std::optional<std::size_t> trigger_count;
  double sybil_scale = 10.0;
  // Sybil clients draw one shared perturbation per round.
  bool sybil_collusion = false;

  std::size_t trigger_coordinates(std::size_t d) const;
  void validate() const;
  friend bool operator==(const AttackConfig&, const AttackConfig&) = default;
};

struct ClientRoster {
  std::vector<AttackKind> kinds;

  std::size_t clients() const noexcept { return kinds.size(); }
  std::size_t malicious() const;
  friend bool operator==(const ClientRoster&, const ClientRoster&) = default;
};

// y -> 1 - y
std::vector<double> flip_labels(const std::vector<double>& y);

// Post-training manipulation of a client's locally trained parameters.
// `global` is the round-start model that the local update is measured from.
ModelParams apply_post_training_attack(AttackKind kind, const ModelParams& global,
                                       const ModelParams& local, const AttackConfig& cfg, Rng& rng);

// floor(fraction * M) clients picked by seeded sampling without replacement,
// then given `kinds` round-robin in ascending client-id order.
ClientRoster assign_attacks(std::size_t clients, double malicious_fraction,
                            const std::vector<AttackKind>& kinds, std::uint64_t seed);

}  // namespace hrafl
