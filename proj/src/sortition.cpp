#include "senate/sortition.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "senate/error.hpp"
#include "senate/world.hpp"

namespace senate {

double nash_probability(double cost, double n) {
  if (!(cost > 0.0) || cost > 1.0)
    throw Error(ErrorCode::Domain, "transmission cost must lie in (0, 1], got " + std::to_string(cost));
  if (!(n >= 2.0))
    throw Error(ErrorCode::Domain, "population must be at least 2, got " + std::to_string(n));
  return 1.0 - std::pow(cost, 1.0 / (n - 1.0));
}

double transmit_payoff(double p_self, double p_other, int n, double cost) {
  if (p_self == 0.0) return 0.0;
  const double all_silent = std::pow(1.0 - p_other, n - 1);
  return p_self * ((1.0 - cost) * all_silent - cost * (1.0 - all_silent));
}

double lottery_probability(double cost, double population_estimate) {
  // Alone in the world: nobody to collide with.
  if (population_estimate < 2.0) return 1.0;
  return nash_probability(cost, population_estimate);
}

double population_estimate(int slots, int observed) {
  return 1.0 + static_cast<double>(slots) / (slots - 1) * observed;
}

std::vector<ChorusReport> run_chorus(const World& world, int slots, const AttackProfile& attack,
                                     Rng& rng) {
  if (slots < 2) throw Error(ErrorCode::Domain, "chorus needs at least 2 slots");
  const int n = static_cast<int>(world.size());

  std::vector<ChorusReport> reports(world.size());
  // Listeners per slot; always-transmitting nodes never fall silent.
  std::unordered_map<int, int> silent_in_slot;
  for (int i = 0; i < n; ++i) {
    reports[i].node_id = world[i].id;
    reports[i].receive_slot = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(slots));
    const bool always_on = world[i].is_faulty && attack.chorus_always_transmit;
    if (!always_on) ++silent_in_slot[reports[i].receive_slot];
  }
  for (int i = 0; i < n; ++i) {
    auto& r = reports[i];
    const bool always_on = world[i].is_faulty && attack.chorus_always_transmit;
    const int silent_others = silent_in_slot[r.receive_slot] - (always_on ? 0 : 1);
    r.observed_transmitters = (n - 1) - silent_others;
    r.population_estimate = population_estimate(slots, r.observed_transmitters);
  }
  return reports;
}

SortitionOutcome run_aloha(const World& world, const std::vector<ChorusReport>& reports,
                           const AlohaParams& params, Rng& slot_rng, Rng& ranging_rng) {
  if (params.seats < 1) throw Error(ErrorCode::Domain, "at least one seat is required");
  const std::size_t n = world.size();

  std::vector<double> prob(n);
  std::vector<int> budget(n);
  double mean_prob = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    prob[i] = lottery_probability(params.tx_cost, reports.at(i).population_estimate);
    budget[i] = world[i].is_faulty ? std::max(1, world[i].pseudonym_budget) : 1;
    mean_prob += prob[i];
  }
  mean_prob /= static_cast<double>(n);

  long cap = params.slot_cap;
  if (cap <= 0) {
    const double auto_cap = mean_prob > 0.0 ? 50.0 * params.seats / mean_prob : 1e12;
    cap = static_cast<long>(std::min(auto_cap, 1e12));
  }

  SortitionOutcome out;
  out.reports = reports;
  std::vector<int> held(n, 0);
  std::vector<std::size_t> contenders(n);
  for (std::size_t i = 0; i < n; ++i) contenders[i] = i;

  while (static_cast<int>(out.candidates.size()) < params.seats) {
    if (contenders.empty())
      throw Error(ErrorCode::SortitionTimeout, "no contenders left before the seat quota was met");
    if (out.slots_elapsed >= cap)
      throw Error(ErrorCode::SortitionTimeout,
                  "no quorum after " + std::to_string(cap) + " slots");
    ++out.slots_elapsed;

    // One radio per node: at most one transmission per slot, whatever the pseudonym count.
    int transmitters = 0;
    std::size_t sender = 0;
    for (const auto i : contenders) {
      if (uniform(slot_rng, 0.0, 1.0) < prob[i]) {
        ++transmitters;
        sender = i;
      }
    }
    if (transmitters != 1) continue;

    Seat seat;
    seat.seat = static_cast<int>(out.candidates.size()) + 1;
    seat.owner = world[sender].id;
    seat.pseudonym = held[sender]++;
    out.candidates.push_back(seat);
    if (held[sender] >= budget[sender]) std::erase(contenders, sender);
  }

  // Each winner's pilot is heard by everyone, giving one estimate per ordered pair.
  const auto s = static_cast<Eigen::Index>(out.candidates.size());
  out.pilot_estimates = Eigen::MatrixXd::Zero(s, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) {
      if (i == j) continue;
      const auto& a = world[out.candidates[i].owner];
      const auto& b = world[out.candidates[j].owner];
      out.pilot_estimates(i, j) = estimate_distance(true_distance(a, b), params.ranging, ranging_rng);
    }
  }
  return out;
}

}  // namespace senate
