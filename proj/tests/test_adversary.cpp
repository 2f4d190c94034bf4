#include <doctest.h>

#include "senate/adversary.hpp"
#include "senate/harness.hpp"
#include "senate/selection.hpp"
#include "senate/world.hpp"

using namespace senate;

namespace {

NodeTruth node(int id, double x, double y, bool faulty) {
  NodeTruth n;
  n.id = id;
  n.position = Point(x, y);
  n.is_faulty = faulty;
  n.pseudonym_budget = faulty ? 2 : 0;
  return n;
}

// Three nodes, the middle one faulty with two seats; perfect pilots.
struct Fixture {
  World world{node(0, 0, 0, false), node(1, 30, 40, true), node(2, 60, 0, false)};
  SortitionOutcome sortition;

  Fixture() {
    sortition.candidates = {{1, 0, 0}, {2, 1, 0}, {3, 1, 1}, {4, 2, 0}};
    sortition.pilot_estimates = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        sortition.pilot_estimates(i, j) =
            true_distance(world[sortition.candidates[i].owner], world[sortition.candidates[j].owner]);
  }
};

}  // namespace

TEST_SUITE("adversary") {
  TEST_CASE("a good node presents one honest identity") {
    Rng rng(1);
    AttackProfile attack;
    attack.sybil_seats = 4;
    attack.shout_offset = 50.0;
    const auto ids = pseudonym_positions(node(0, 3, 4, false), attack, rng);
    REQUIRE(ids.size() == 1);
    CHECK(ids[0].position == Point(3, 4));
    CHECK(ids[0].offset == 0.0);
  }

  TEST_CASE("shared shout gives every identity the same offset") {
    Rng rng(1);
    AttackProfile attack;
    attack.sybil_seats = 3;
    attack.shout_offset = 50.0;
    attack.shout_mode = ShoutMode::Shared;
    const auto ids = pseudonym_positions(node(5, 7, 8, true), attack, rng);
    REQUIRE(ids.size() == 3);
    for (const auto& id : ids) {
      CHECK(id.position == Point(7, 8));
      CHECK(id.offset == 50.0);
    }
  }

  TEST_CASE("independent shout scales the offset per identity") {
    AttackProfile attack;
    attack.sybil_seats = 3;
    attack.shout_offset = 40.0;
    Rng rng(77), replay(77);
    const auto ids = pseudonym_positions(node(5, 0, 0, true), attack, rng);
    REQUIRE(ids.size() == 3);
    for (const auto& id : ids) {
      CHECK(id.offset >= 20.0);
      CHECK(id.offset <= 60.0);
      CHECK(id.offset == 40.0 * uniform(replay, 0.5, 1.5));
    }
  }

  TEST_CASE("a disabled profile yields a single honest identity") {
    Rng rng(1);
    const auto ids = pseudonym_positions(node(5, 1, 1, true), AttackProfile{}, rng);
    REQUIRE(ids.size() == 1);
    CHECK(ids[0].offset == 0.0);
    CHECK(AttackProfile{}.disabled());
    AttackProfile a;
    a.ba_strategy = ba::Silent{};
    CHECK_FALSE(a.disabled());
  }

  TEST_CASE("a consistent shout survives the reciprocity check") {
    Fixture fx;
    AttackProfile attack;
    attack.sybil_seats = 2;
    attack.shout_offset = 10.0;
    attack.shout_mode = ShoutMode::Shared;
    Rng rng(3);
    const auto table = collect_feedback(fx.sortition, fx.world, attack, rng);
    // Seat 0 hears seat 1 at 50 m plus the delay; seat 1 pads its own report equally.
    CHECK(table.reports[0](1) == doctest::Approx(60.0));
    CHECK(table.reports[1](0) == doctest::Approx(60.0));
    // Two identities of one node: both ends padded.
    CHECK(table.reports[1](2) == doctest::Approx(20.0));
    CHECK(table.reports[0](3) == doctest::Approx(60.0));
    const auto verified = symmetry_verify(table.edm, 1e-6);
    CHECK(verified.valid.all());
  }

  TEST_CASE("an asymmetric lie is caught") {
    Fixture fx;
    AttackProfile attack;
    attack.sybil_seats = 2;
    attack.shout_offset = 10.0;
    attack.shout_mode = ShoutMode::Shared;
    attack.asymmetric_lie = true;
    Rng rng(3);
    const auto table = collect_feedback(fx.sortition, fx.world, attack, rng);
    CHECK(table.reports[1](0) == doctest::Approx(60.0));
    CHECK(table.reports[0](1) == doctest::Approx(50.0));
    const auto verified = symmetry_verify(table.edm, 1e-6);
    // Pairs between a liar and a good seat go; the liar's own two seats agree.
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const bool liar_i = i == 1 || i == 2;
        const bool liar_j = j == 1 || j == 2;
        CHECK(verified.valid(i, j) == (i == j || liar_i == liar_j));
      }
  }

  TEST_CASE("extreme value strategy") {
    Rng rng(1);
    const BaContext ctx{BaContext::Phase::Proposal, 2, 100.5, 0.3};
    CHECK(*ba_emit(ba::ExtremeValue{}, ctx, rng) == 100.5);
    CHECK(*ba_emit(ba::ExtremeValue{-7.0}, ctx, rng) == -7.0);
    CHECK(*ba_vote(ba::ExtremeValue{}, ctx, 100.5, rng));
    CHECK_FALSE(*ba_vote(ba::ExtremeValue{}, ctx, 0.3, rng));
    CHECK(*ba_vote(ba::ExtremeValue{-7.0}, ctx, -7.0, rng));
  }

  TEST_CASE("silent strategy never speaks") {
    Rng rng(1);
    const BaContext ctx{BaContext::Phase::Leader, 1, 5.0, 0.0};
    CHECK_FALSE(ba_emit(ba::Silent{}, ctx, rng).has_value());
    CHECK_FALSE(ba_vote(ba::Silent{}, ctx, 0.0, rng).has_value());
  }

  TEST_CASE("honest strategy sends what the protocol says") {
    Rng rng(1);
    const BaContext ctx{BaContext::Phase::Proposal, 1, 5.0, 0.25};
    CHECK(*ba_emit(ba::Honest{}, ctx, rng) == 0.25);
  }

  TEST_CASE("random strategy replays its stream") {
    const ba::RandomVote strat{-3.0, 4.0};
    const BaContext ctx{BaContext::Phase::Setup, 0, 100.0, 0.0};
    Rng rng(55), replay(55);
    for (int i = 0; i < 200; ++i) {
      const double v = *ba_emit(strat, ctx, rng);
      CHECK(v == uniform(replay, -3.0, 4.0));
      CHECK(v >= -3.0);
      CHECK(v <= 4.0);
      CHECK(*ba_vote(strat, ctx, 0.0, rng) == ((replay() & 1U) != 0));
    }
  }

  TEST_CASE("disabled faulty nodes change nothing") {
    ScenarioConfig good;
    good.n_nodes = 60;
    good.n_candidates = 25;
    good.n_faulty = 0;
    ScenarioConfig disabled = good;
    disabled.n_faulty = 15;
    disabled.faulty_values = disabled.good_values;
    REQUIRE(disabled.attack.disabled());
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto a = run_episode(good, seed);
      const auto b = run_episode(disabled, seed);
      CHECK(a.seat_owners == b.seat_owners);
      CHECK(a.removed == b.removed);
      CHECK(a.senators == b.senators);
      CHECK(a.decision == b.decision);
      CHECK(b.sybil_seats == 0);
      CHECK(b.asymmetric_pairs == 0);
    }
  }
}
