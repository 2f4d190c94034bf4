#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "senate/error.hpp"
#include "senate/sortition.hpp"
#include "senate/world.hpp"

using namespace senate;

namespace {

ScenarioConfig world_config(int n, int f, int seats) {
  ScenarioConfig c;
  c.n_nodes = n;
  c.n_faulty = f;
  c.n_candidates = seats;
  c.n_senators = 1;
  c.agreement_fault_budget = 0;
  return c;
}

// Second implementation of the lottery: per slot, every node that is still
// playing draws one uniform in id order; a lone transmitter takes a seat.
std::vector<std::pair<int, long>> replay_lottery(const World& world, const std::vector<double>& prob,
                                                 int seats, Rng rng) {
  std::vector<int> left(world.size());
  for (std::size_t i = 0; i < world.size(); ++i)
    left[i] = world[i].is_faulty ? std::max(1, world[i].pseudonym_budget) : 1;
  std::vector<std::pair<int, long>> won;
  long slot = 0;
  while (static_cast<int>(won.size()) < seats) {
    ++slot;
    std::vector<int> tx;
    for (std::size_t i = 0; i < world.size(); ++i) {
      if (left[i] == 0) continue;
      const double u = static_cast<double>(rng() >> 11) / 9007199254740992.0;
      if (u < prob[i]) tx.push_back(static_cast<int>(i));
    }
    if (tx.size() == 1) {
      won.emplace_back(tx[0], slot);
      --left[static_cast<std::size_t>(tx[0])];
    }
  }
  return won;
}

}  // namespace

TEST_SUITE("sortition") {
  TEST_CASE("equilibrium probability at hand-computed points") {
    CHECK(nash_probability(0.25, 3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(nash_probability(1.0, 10) == 0.0);
    CHECK(nash_probability(0.01, 2) == doctest::Approx(0.99).epsilon(1e-15));
    // Fractional populations go straight into the exponent.
    CHECK(nash_probability(0.5, 2.5) == doctest::Approx(1.0 - std::pow(0.5, 1.0 / 1.5)));
  }

  TEST_CASE("equilibrium probability domain") {
    CHECK_THROWS_AS(nash_probability(0.0, 5), Error);
    CHECK_THROWS_AS(nash_probability(-0.1, 5), Error);
    CHECK_THROWS_AS(nash_probability(1.5, 5), Error);
    CHECK_THROWS_AS(nash_probability(0.3, 1.99), Error);
    for (double c = 0.05; c < 1.0; c += 0.05)
      for (int n = 2; n <= 60; ++n) {
        const double p = nash_probability(c, n);
        CHECK(p >= 0.0);
        CHECK(p < 1.0);
      }
  }

  TEST_CASE("payoff at hand-computed points") {
    CHECK(transmit_payoff(0.0, 0.7, 9, 0.3) == 0.0);
    CHECK(transmit_payoff(1.0, 0.5, 3, 0.25) == doctest::Approx(0.0));
    CHECK(transmit_payoff(1.0, 0.0, 5, 0.2) == doctest::Approx(0.8));
    // One rival always transmits: every attempt collides.
    CHECK(transmit_payoff(1.0, 1.0, 2, 0.4) == doctest::Approx(-0.4));
  }

  TEST_CASE("indifference at equilibrium over the full grid") {
    for (int ci = 1; ci <= 19; ++ci) {
      const double c = 0.05 * ci;
      for (int n = 2; n <= 50; ++n)
        CHECK(std::abs(transmit_payoff(1.0, nash_probability(c, n), n, c)) < 1e-12);
    }
  }

  TEST_CASE("no unilateral deviation pays when the others play the equilibrium") {
    for (const double c : {0.1, 0.3, 0.7})
      for (const int n : {2, 5, 20, 50}) {
        const double p = nash_probability(c, n);
        for (double q = 0.0; q <= 1.0; q += 0.05) CHECK(transmit_payoff(q, p, n, c) < 1e-12);
      }
  }

  TEST_CASE("lottery probability for a lone node") {
    CHECK(lottery_probability(0.3, 1.0) == 1.0);
    CHECK(lottery_probability(0.3, 1.9) == 1.0);
    CHECK(lottery_probability(0.3, 4.0) == doctest::Approx(nash_probability(0.3, 4.0)));
  }

  TEST_CASE("population estimate formula") {
    CHECK(population_estimate(10, 9) == doctest::Approx(11.0));
    CHECK(population_estimate(2000, 0) == 1.0);
  }

  TEST_CASE("a single node hears nobody") {
    const World w = spawn_world(world_config(1, 0, 1), 3);
    Rng rng(5);
    const auto reports = run_chorus(w, 100, AttackProfile{}, rng);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].observed_transmitters == 0);
    CHECK(reports[0].population_estimate == 1.0);
  }

  TEST_CASE("chorus reports are internally consistent") {
    const World w = spawn_world(world_config(50, 10, 10), 8);
    AttackProfile attack;
    attack.chorus_always_transmit = true;
    attack.sybil_seats = 5;
    Rng rng(9);
    const auto reports = run_chorus(w, 20, attack, rng);
    std::map<int, int> listeners;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!w[i].is_faulty) ++listeners[reports[i].receive_slot];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto& r = reports[i];
      CHECK(r.receive_slot >= 1);
      CHECK(r.receive_slot <= 20);
      CHECK(r.population_estimate == doctest::Approx(1.0 + 20.0 / 19.0 * r.observed_transmitters));
      // Pseudonyms never add to the count.
      CHECK(r.observed_transmitters <= 49);
      const int silent_others = listeners[r.receive_slot] - (w[i].is_faulty ? 0 : 1);
      CHECK(r.observed_transmitters == 49 - silent_others);
    }
  }

  TEST_CASE("chorus estimate stays within the always-transmit bound") {
    const ScenarioConfig c = world_config(100, 20, 1);
    AttackProfile attack;
    attack.chorus_always_transmit = true;
    const int trials = 1000;
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
      const World w = spawn_world(c, static_cast<std::uint64_t>(t));
      Rng rng = make_stream(static_cast<std::uint64_t>(t), Stream::Chorus);
      double mean = 0.0;
      for (const auto& r : run_chorus(w, 2000, attack, rng)) mean += r.population_estimate;
      mean /= 100.0;
      sum += mean;
      sum_sq += mean * mean;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sum_sq / trials - mean * mean) / (trials - 1));
    CHECK(mean >= 99.0);
    CHECK(mean <= 100.0 + 20.0 / 1999.0 + 3.0 * se);
  }

  TEST_CASE("one node takes the only seat") {
    const World w = spawn_world(world_config(1, 0, 1), 2);
    Rng chorus(1), slots(2), ranging_rng(3);
    const auto reports = run_chorus(w, 10, AttackProfile{}, chorus);
    const auto out = run_aloha(w, reports, {1, 0.3, 0, ranging::Perfect{}}, slots, ranging_rng);
    REQUIRE(out.candidates.size() == 1);
    CHECK(out.candidates[0].owner == 0);
    CHECK(out.candidates[0].seat == 1);
    CHECK(out.slots_elapsed == 1);
  }

  TEST_CASE("two good nodes are both seated and see each other") {
    const World w = spawn_world(world_config(2, 0, 2), 6);
    Rng chorus(1), slots(2), ranging_rng(3);
    const auto reports = run_chorus(w, 50, AttackProfile{}, chorus);
    const auto out = run_aloha(w, reports, {2, 0.3, 0, ranging::Perfect{}}, slots, ranging_rng);
    REQUIRE(out.candidates.size() == 2);
    CHECK(out.candidates[0].owner != out.candidates[1].owner);
    const double d = true_distance(w[0], w[1]);
    CHECK(out.pilot_estimates(0, 1) == d);
    CHECK(out.pilot_estimates(1, 0) == d);
  }

  TEST_CASE("lottery matches an independent replay on the same stream") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ScenarioConfig c = world_config(10, 3, 5);
      c.attack.sybil_seats = 2;
      const World w = spawn_world(c, seed);
      Rng chorus = make_stream(seed, Stream::Chorus);
      const auto reports = run_chorus(w, 200, c.attack, chorus);
      std::vector<double> prob;
      for (const auto& r : reports) prob.push_back(lottery_probability(0.3, r.population_estimate));

      Rng slots = make_stream(seed, Stream::Aloha);
      Rng ranging_rng(1);
      const auto out = run_aloha(w, reports, {5, 0.3, 0, ranging::Perfect{}}, slots, ranging_rng);
      const auto expected = replay_lottery(w, prob, 5, make_stream(seed, Stream::Aloha));
      REQUIRE(out.candidates.size() == expected.size());
      for (std::size_t k = 0; k < expected.size(); ++k) CHECK(out.candidates[k].owner == expected[k].first);
      CHECK(out.slots_elapsed == expected.back().second);
    }
  }

  TEST_CASE("seat accounting") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      ScenarioConfig c = world_config(100, 25, 50);
      c.attack.sybil_seats = 3;
      c.attack.chorus_always_transmit = true;
      const World w = spawn_world(c, seed);
      Rng chorus = make_stream(seed, Stream::Chorus);
      Rng slots = make_stream(seed, Stream::Aloha);
      Rng ranging_rng = make_stream(seed, Stream::Ranging);
      const auto reports = run_chorus(w, 2000, c.attack, chorus);
      const auto out = run_aloha(w, reports, {50, 0.3, 0, ranging::Perfect{}}, slots, ranging_rng);
      REQUIRE(out.candidates.size() == 50);
      std::map<int, int> per_owner;
      for (std::size_t k = 0; k < out.candidates.size(); ++k) {
        const auto& seat = out.candidates[k];
        CHECK(seat.seat == static_cast<int>(k) + 1);
        CHECK(seat.pseudonym == per_owner[seat.owner]++);
      }
      CHECK(per_owner.size() <= 50);
      for (const auto& [owner, count] : per_owner) {
        if (w[static_cast<std::size_t>(owner)].is_faulty)
          CHECK(count <= 3);
        else
          CHECK(count == 1);
      }
      CHECK(out.pilot_estimates.rows() == 50);
    }
  }

  TEST_CASE("slot cap turns a stalled lottery into a timeout") {
    const World w = spawn_world(world_config(30, 0, 30), 1);
    Rng chorus(1), slots(2), ranging_rng(3);
    const auto reports = run_chorus(w, 100, AttackProfile{}, chorus);
    try {
      run_aloha(w, reports, {30, 0.3, 3, ranging::Perfect{}}, slots, ranging_rng);
      FAIL("expected a timeout");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SortitionTimeout);
    }
  }
}
