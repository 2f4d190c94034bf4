#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "senate/config.hpp"
#include "senate/random.hpp"
#include "senate/world.hpp"

using namespace senate;

namespace {

NodeTruth at(double x, double y) {
  NodeTruth n;
  n.position = Point(x, y);
  return n;
}

ScenarioConfig small_world(int n, int f) {
  ScenarioConfig c;
  c.n_nodes = n;
  c.n_faulty = f;
  c.n_candidates = 1;
  c.n_senators = 1;
  c.agreement_fault_budget = 0;
  return c;
}

// Box-Muller written out from raw 64-bit draws.
double replay_normal(std::uint64_t a, std::uint64_t b) {
  const double u1 = 1.0 - static_cast<double>(a >> 11) / 9007199254740992.0;
  const double u2 = static_cast<double>(b >> 11) / 9007199254740992.0;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

TEST_SUITE("core_model") {
  TEST_CASE("true distance of simple pairs") {
    CHECK(true_distance(at(0, 0), at(3, 4)) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(true_distance(at(7, 7), at(7, 7)) == 0.0);
    CHECK(true_distance(at(0, 0), at(1, 1)) == doctest::Approx(1.41421356237).epsilon(1e-10));
    CHECK(true_distance(at(2, -1), at(-4, 5)) == true_distance(at(-4, 5), at(2, -1)));
  }

  TEST_CASE("perfect ranging returns the distance") {
    Rng rng(1);
    CHECK(estimate_distance(10.0, ranging::Perfect{}, rng) == 10.0);
  }

  TEST_CASE("ToA estimate replays the seeded Gaussian draw") {
    Rng rng = make_stream(9, Stream::Ranging);
    Rng raw = make_stream(9, Stream::Ranging);
    const std::uint64_t a = raw();
    const std::uint64_t b = raw();
    const double z = replay_normal(a, b);
    CHECK(estimate_distance(10.0, ranging::ToA{1.0}, rng) == doctest::Approx(10.0 + z).epsilon(1e-14));
  }

  TEST_CASE("RSS noise keeps zero at zero") {
    Rng rng(3);
    for (int i = 0; i < 20; ++i) CHECK(estimate_distance(0.0, ranging::Rss{0.7}, rng) == 0.0);
  }

  TEST_CASE("estimates are never negative") {
    Rng rng(11);
    const RangingModel models[] = {ranging::Perfect{}, ranging::ToA{5.0}, ranging::Rss{1.0}};
    for (const auto& m : models)
      for (int i = 0; i < 2000; ++i) {
        const double d = uniform(rng, 0.0, 3.0);
        CHECK(estimate_distance(d, m, rng) >= 0.0);
      }
  }

  TEST_CASE("perfect ranging reproduces the true distance matrix") {
    const ScenarioConfig c = small_world(30, 0);
    const World w = spawn_world(c, 5);
    Rng rng(2);
    for (const auto& a : w)
      for (const auto& b : w) CHECK(estimate_distance(true_distance(a, b), ranging::Perfect{}, rng) == true_distance(a, b));
  }

  TEST_CASE("single good node world") {
    const World w = spawn_world(small_world(1, 0), 4);
    REQUIRE(w.size() == 1);
    CHECK_FALSE(w[0].is_faulty);
    CHECK(w[0].initial_value >= -1.0);
    CHECK(w[0].initial_value <= 1.0);
    CHECK(w[0].pseudonym_budget == 0);
  }

  TEST_CASE("faulty nodes hold values in the faulty range") {
    ScenarioConfig c = small_world(100, 30);
    c.attack.sybil_seats = 3;
    const World w = spawn_world(c, 17);
    int faulty = 0;
    for (const auto& n : w) {
      CHECK(n.position.x() >= 0.0);
      CHECK(n.position.x() <= c.area_side);
      CHECK(n.position.y() >= 0.0);
      CHECK(n.position.y() <= c.area_side);
      if (n.is_faulty) {
        ++faulty;
        CHECK(n.initial_value >= 99.0);
        CHECK(n.initial_value <= 101.0);
        CHECK(n.pseudonym_budget == 3);
      } else {
        CHECK(n.initial_value >= -1.0);
        CHECK(n.initial_value <= 1.0);
        CHECK(n.pseudonym_budget == 0);
      }
    }
    CHECK(faulty == 30);
  }

  TEST_CASE("spawn_world is a pure function of config and seed") {
    const ScenarioConfig c = small_world(60, 12);
    const World a = spawn_world(c, 99);
    const World b = spawn_world(c, 99);
    const World other = spawn_world(c, 100);
    REQUIRE(a.size() == b.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].id == static_cast<int>(i));
      CHECK(a[i].position == b[i].position);
      CHECK(a[i].is_faulty == b[i].is_faulty);
      CHECK(a[i].initial_value == b[i].initial_value);
      differs = differs || a[i].position != other[i].position;
    }
    CHECK(differs);
  }

  TEST_CASE("faulty selection covers every node over many seeds") {
    const ScenarioConfig c = small_world(20, 1);
    std::set<int> seen;
    for (std::uint64_t s = 0; s < 400; ++s)
      for (const auto& n : spawn_world(c, s))
        if (n.is_faulty) seen.insert(n.id);
    CHECK(seen.size() == 20);
  }

  TEST_CASE("streams differ by purpose and index") {
    Rng a = make_stream(1, Stream::Chorus);
    Rng b = make_stream(1, Stream::Aloha);
    Rng c = make_stream(1, Stream::MonteCarlo, 0);
    Rng d = make_stream(1, Stream::MonteCarlo, 1);
    CHECK(a() != b());
    CHECK(c() != d());
    Rng e = make_stream(1, Stream::Chorus);
    Rng f = make_stream(1, Stream::Chorus);
    for (int i = 0; i < 10; ++i) CHECK(e() == f());
  }

  TEST_CASE("uniform draws stay in range and have the right mean") {
    Rng rng(8);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = uniform(rng, -2.0, 6.0);
      REQUIRE(u >= -2.0);
      REQUIRE(u < 6.0);
      sum += u;
    }
    // Standard error of the mean is 8 / sqrt(12 n).
    CHECK(std::abs(sum / n - 2.0) < 4.0 * 8.0 / std::sqrt(12.0 * n));
  }

  TEST_CASE("standard normal has unit variance") {
    Rng rng(21);
    double sum = 0.0, sum_sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double z = standard_normal(rng);
      sum += z;
      sum_sq += z * z;
    }
    CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(sum_sq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  }
}
