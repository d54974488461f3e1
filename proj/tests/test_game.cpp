#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nashbnb/game.hpp"
#include "nashbnb/game_io.hpp"
#include "nashbnb/prng.hpp"
#include "test_oracles.hpp"

using namespace nashbnb;
using namespace testutil;

TEST_CASE("expected utility: matching pennies under uniform play is zero") {
  Game g = matching_pennies();
  MixedProfile u = MixedProfile::uniform(g.actions());
  CHECK(expected_utility(g, 0, u) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(expected_utility(g, 1, u) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("expected utility of a one-hot profile is the pure payoff") {
  Game g = generate_random(3, {2, 3, 2}, 11);
  PureProfile a{{1, 2, 0}};
  MixedProfile p = MixedProfile::pure(g.actions(), a);
  for (int i = 0; i < 3; ++i)
    CHECK(expected_utility(g, i, p) == doctest::Approx(g.utility(i, a)).epsilon(1e-15));
}

TEST_CASE("expected utility under uniform play equals the tensor mean") {
  Game g = generate_random(3, {3, 3, 3}, 1);
  MixedProfile u = MixedProfile::uniform(g.actions());
  for (int i = 0; i < 3; ++i) {
    double mean = 0.0;
    for (long idx = 0; idx < g.num_profiles(); ++idx) mean += g.utility(i, idx);
    mean /= g.num_profiles();
    CHECK(expected_utility(g, i, u) == doctest::Approx(mean).epsilon(1e-12));
    CHECK(expected_utility(g, i, u) ==
          doctest::Approx(brute_expected_utility(g, i, u)).epsilon(1e-12));
  }
}

TEST_CASE("deviation payoffs") {
  SUBCASE("rps against a uniform opponent is always zero") {
    Game g = rps();
    MixedProfile u = MixedProfile::uniform(g.actions());
    for (int a = 0; a < 3; ++a)
      CHECK(deviation_payoff(g, 0, a, u) == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("coordination against a one-hot opponent") {
    Game g = coordination2();
    MixedProfile p = MixedProfile::pure(g.actions(), PureProfile{{0, 1}});
    CHECK(deviation_payoff(g, 0, 1, p) == doctest::Approx(1.0));
    CHECK(deviation_payoff(g, 0, 0, p) == doctest::Approx(0.0));
  }
  SUBCASE("battle of the sexes mixing makes the row player indifferent") {
    Game g = battle_of_sexes();
    MixedProfile p = MixedProfile::uniform(g.actions());
    p.probs[1] = {1.0 / 3.0, 2.0 / 3.0};
    CHECK(deviation_payoff(g, 0, 0, p) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(deviation_payoff(g, 0, 1, p) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(brute_deviation_payoff(g, 0, 0, p) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("out of range action is rejected") {
    Game g = rps();
    MixedProfile u = MixedProfile::uniform(g.actions());
    CHECK_THROWS(deviation_payoff(g, 0, 3, u));
  }
}

TEST_CASE("exploitability") {
  SUBCASE("rps uniform is an equilibrium") {
    Game g = rps();
    CHECK(exploitability(g, MixedProfile::uniform(g.actions())).epsilon == 0.0);
  }
  SUBCASE("uniform is the mixed equilibrium of 2x2 coordination") {
    Game g = coordination2();
    CHECK(exploitability(g, MixedProfile::uniform(g.actions())).epsilon ==
          doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("matching pennies pure-pure gives the loser a +2 deviation") {
    Game g = matching_pennies();
    MixedProfile p = MixedProfile::pure(g.actions(), PureProfile{{0, 0}});
    Exploitability e = exploitability(g, p);
    CHECK(e.epsilon == doctest::Approx(2.0));
    CHECK(e.per_player[0] == doctest::Approx(0.0));
    CHECK(e.per_player[1] == doctest::Approx(2.0));
  }
  SUBCASE("mixture is bracketed by deviations on random games") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      Game g = generate_random(3, {2, 3, 2}, 100 + trial);
      MixedProfile p = random_profile(g, rng);
      for (int i = 0; i < 3; ++i) {
        double lo = 1e300, hi = -1e300;
        for (int a = 0; a < g.num_actions(i); ++a) {
          double d = deviation_payoff(g, i, a, p);
          lo = std::min(lo, d);
          hi = std::max(hi, d);
        }
        double mid = expected_utility(g, i, p);
        CHECK(mid >= lo - 1e-12);
        CHECK(mid <= hi + 1e-12);
      }
    }
  }
  SUBCASE("matches the brute-force reference") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      Game g = generate_random(2, {4, 3}, 50 + trial);
      MixedProfile p = random_profile(g, rng);
      CHECK(exploitability(g, p).epsilon ==
            doctest::Approx(brute_exploitability(g, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("normalize") {
  SUBCASE("a [0,1] game with attained bounds gets the identity transform") {
    Game g({2, 2}, {{0.0, 1.0, 0.5, 0.25}, {1.0, 0.0, 0.5, 0.75}});
    NormalizedGame n = normalize(g);
    for (int i = 0; i < 2; ++i) {
      CHECK(n.transforms[i].scale == doctest::Approx(1.0));
      CHECK(n.transforms[i].shift == doctest::Approx(0.0));
    }
    for (long idx = 0; idx < g.num_profiles(); ++idx)
      CHECK(n.game.utility(0, idx) == g.utility(0, idx));
  }
  SUBCASE("a constant player maps to zeros with scale 0") {
    Game g = constant_game(5.0);
    NormalizedGame n = normalize(g);
    CHECK(n.transforms[0].scale == 0.0);
    for (long idx = 0; idx < g.num_profiles(); ++idx)
      CHECK(n.game.utility(0, idx) == 0.0);
  }
  SUBCASE("matching pennies maps onto {0,1}") {
    Game g = matching_pennies();
    NormalizedGame n = normalize(g);
    CHECK(n.transforms[0].scale == doctest::Approx(0.5));
    CHECK(n.transforms[0].shift == doctest::Approx(0.5));
    CHECK(n.game.min_utility(0) == doctest::Approx(0.0));
    CHECK(n.game.max_utility(0) == doctest::Approx(1.0));
  }
  SUBCASE("positive affine transforms scale exploitability per player") {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
      Game g = generate_random(2, {3, 3}, 200 + trial);
      // Stretch payoffs so the transform is nontrivial.
      std::vector<std::vector<double>> tables(2);
      for (int i = 0; i < 2; ++i)
        for (long idx = 0; idx < g.num_profiles(); ++idx)
          tables[i].push_back(g.utility(i, idx) * (3.0 + i) - 1.5);
      Game wide(g.actions(), tables);
      NormalizedGame n = normalize(wide);
      MixedProfile p = random_profile(wide, rng);
      Exploitability orig = exploitability(wide, p);
      Exploitability norm = exploitability(n.game, p);
      for (int i = 0; i < 2; ++i)
        CHECK(norm.per_player[i] ==
              doctest::Approx(n.transforms[i].scale * orig.per_player[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("generate_random") {
  SUBCASE("identical seeds give bit-identical tensors") {
    Game a = generate_random(2, {2, 2}, 0);
    Game b = generate_random(2, {2, 2}, 0);
    for (int i = 0; i < 2; ++i)
      for (long idx = 0; idx < a.num_profiles(); ++idx)
        CHECK(a.utility(i, idx) == b.utility(i, idx));
  }
  SUBCASE("3x3x3 has 81 entries, all in [0,1)") {
    Game g = generate_random(3, {3, 3, 3}, 7);
    long entries = 0;
    for (int i = 0; i < 3; ++i) {
      entries += g.num_profiles();
      for (long idx = 0; idx < g.num_profiles(); ++idx) {
        CHECK(g.utility(i, idx) >= 0.0);
        CHECK(g.utility(i, idx) < 1.0);
      }
    }
    CHECK(entries == 81);
  }
  SUBCASE("entry mean obeys the law of large numbers") {
    Game g = generate_random(2, {100, 50}, 99);  // 10^4 entries
    double mean = 0.0;
    for (long idx = 0; idx < g.num_profiles(); ++idx) mean += g.utility(0, idx);
    mean /= g.num_profiles();
    CHECK(std::abs(mean - 0.5) < 0.02);
  }
  SUBCASE("entry cap is enforced") {
    CHECK_THROWS(generate_random(2, {20000, 20000}, 0, 1000000));
  }
}

TEST_CASE("generate_graphical") {
  SUBCASE("complete graph reproduces generate_random bit for bit") {
    Game a = generate_random(3, {2, 3, 2}, 42);
    Game b = generate_graphical(3, {2, 3, 2}, complete_graph(3), 42);
    for (int i = 0; i < 3; ++i)
      for (long idx = 0; idx < a.num_profiles(); ++idx)
        CHECK(a.utility(i, idx) == b.utility(i, idx));
  }
  SUBCASE("empty graph decouples players; greedy pure profile is an equilibrium") {
    Adjacency empty(3, std::vector<bool>(3, false));
    Game g = generate_graphical(3, {3, 3, 3}, empty, 4);
    PureProfile best{{0, 0, 0}};
    for (int i = 0; i < 3; ++i) {
      // Utility depends only on own action: scan own axis at origin.
      double top = -1.0;
      for (int a = 0; a < 3; ++a) {
        PureProfile probe{{0, 0, 0}};
        probe.actions[i] = a;
        if (g.utility(i, probe) > top) {
          top = g.utility(i, probe);
          best.actions[i] = a;
        }
      }
    }
    MixedProfile p = MixedProfile::pure(g.actions(), best);
    CHECK(exploitability(g, p).epsilon == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("path graph: end player's utility ignores the far end") {
    Game g = generate_graphical(3, {3, 3, 3}, path_graph(3), 3);
    for (int a0 = 0; a0 < 3; ++a0)
      for (int a1 = 0; a1 < 3; ++a1) {
        double ref = g.utility(0, PureProfile{{a0, a1, 0}});
        for (int a2 = 1; a2 < 3; ++a2)
          CHECK(g.utility(0, PureProfile{{a0, a1, a2}}) == ref);
      }
  }
  SUBCASE("graph size mismatch is rejected") {
    CHECK_THROWS(generate_graphical(3, {2, 2, 2}, complete_graph(2), 0));
  }
}

TEST_CASE("profile validation renormalizes within tolerance and rejects beyond") {
  Game g = coordination2();
  MixedProfile p = MixedProfile::uniform(g.actions());
  p.probs[0] = {0.5 + 4e-10, 0.5 + 4e-10};
  MixedProfile q = checked_profile(g, p);
  CHECK(q.probs[0][0] + q.probs[0][1] == doctest::Approx(1.0).epsilon(1e-15));
  p.probs[0] = {0.6, 0.6};
  CHECK_THROWS(checked_profile(g, p));
  p.probs[0] = {1.5, -0.5};
  CHECK_THROWS(checked_profile(g, p));
}

TEST_CASE("single-action players are allowed") {
  Game g({1, 3}, {{0.5, 0.2, 0.9}, {0.1, 0.3, 0.2}});
  MixedProfile u = MixedProfile::uniform(g.actions());
  CHECK(u.probs[0][0] == 1.0);
  CHECK(expected_utility(g, 0, u) ==
        doctest::Approx((0.5 + 0.2 + 0.9) / 3.0).epsilon(1e-12));
}

TEST_CASE("nfg round trip is byte identical") {
  Game g = generate_random(3, {2, 3, 2}, 77);
  std::ostringstream first;
  write_nfg(first, g, "roundtrip");
  std::istringstream back(first.str());
  Game g2 = read_nfg(back);
  REQUIRE(g2.actions() == g.actions());
  for (int i = 0; i < 3; ++i)
    for (long idx = 0; idx < g.num_profiles(); ++idx)
      CHECK(g2.utility(i, idx) == g.utility(i, idx));
  std::ostringstream second;
  write_nfg(second, g2, "roundtrip");
  CHECK(first.str() == second.str());
}

TEST_CASE("nfg reader accepts flexible whitespace") {
  std::istringstream in(
      "NFG 1 R \"mp\" { \"a\" \"b\" }\n{ 2\n 2 }\n\n1 -1 -1 1\n-1 1 1 -1\n");
  Game g = read_nfg(in);
  CHECK(g.num_players() == 2);
  CHECK(g.utility(0, PureProfile{{0, 0}}) == 1.0);
  CHECK(g.utility(1, PureProfile{{0, 0}}) == -1.0);
  CHECK(g.utility(0, PureProfile{{1, 1}}) == 1.0);
}

TEST_CASE("game json round trip preserves the tensor and metadata") {
  Game g = generate_random(3, {2, 2, 3}, 13);
  GameMetadata meta;
  meta.seed = 13;
  meta.generator = "random";
  std::ostringstream out;
  write_game_json(out, g, meta);
  std::istringstream in(out.str());
  GameMetadata got;
  Game g2 = read_game_json(in, &got);
  REQUIRE(g2.actions() == g.actions());
  for (int i = 0; i < 3; ++i)
    for (long idx = 0; idx < g.num_profiles(); ++idx)
      CHECK(g2.utility(i, idx) == g.utility(i, idx));
  CHECK(got.seed.value() == 13);
  CHECK(got.generator == "random");
}

TEST_CASE("utility extrema are recomputed from the tensor") {
  Game g({2, 2}, {{4.0, -2.0, 0.0, 1.0}, {0.0, 0.0, 3.0, 3.0}});
  CHECK(g.min_utility(0) == -2.0);
  CHECK(g.max_utility(0) == 4.0);
  CHECK(g.min_utility(1) == 0.0);
  CHECK(g.max_utility(1) == 3.0);
}
