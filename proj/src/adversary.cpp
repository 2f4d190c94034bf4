#include "senate/adversary.hpp"

#include <algorithm>

namespace senate {

bool AttackProfile::disabled() const {
  return !chorus_always_transmit && sybil_seats <= 1 && shout_offset == 0.0 && !asymmetric_lie &&
         std::holds_alternative<ba::Honest>(ba_strategy);
}

std::vector<PseudonymGeometry> pseudonym_positions(const NodeTruth& node,
                                                   const AttackProfile& profile, Rng& rng) {
  if (!node.is_faulty) return {{node.position, 0.0}};
  const int seats = std::max(1, profile.sybil_seats);
  std::vector<PseudonymGeometry> identities;
  identities.reserve(static_cast<std::size_t>(seats));
  for (int s = 0; s < seats; ++s) {
    double offset = profile.shout_offset;
    if (profile.shout_mode == ShoutMode::Independent && profile.shout_offset != 0.0)
      offset *= uniform(rng, 0.5, 1.5);
    identities.push_back({node.position, offset});
  }
  return identities;
}

std::optional<double> ba_emit(const BaStrategy& strategy, const BaContext& ctx, Rng& rng) {
  return std::visit(
      [&](const auto& s) -> std::optional<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ba::ExtremeValue>) {
          return s.value.value_or(ctx.own_value);
        } else if constexpr (std::is_same_v<T, ba::Silent>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, ba::RandomVote>) {
          return uniform(rng, s.lo, s.hi);
        } else {
          return ctx.honest_value;
        }
      },
      strategy);
}

std::optional<bool> ba_vote(const BaStrategy& strategy, const BaContext& ctx, double leader_value,
                            Rng& rng) {
  return std::visit(
      [&](const auto& s) -> std::optional<bool> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ba::ExtremeValue>) {
          // Backs only its own value; obstructs everything else.
          return leader_value == s.value.value_or(ctx.own_value);
        } else if constexpr (std::is_same_v<T, ba::Silent>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, ba::RandomVote>) {
          return (rng() & 1U) != 0;
        } else {
          return std::nullopt;
        }
      },
      strategy);
}

}  // namespace senate
