#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "helpers.hpp"
#include "reid/aggregate.hpp"
#include "reid/serial.hpp"

using namespace reid;

namespace {

std::vector<BaseRanking> make_rankings(
    std::initializer_list<std::vector<std::size_t>> orders) {
  std::vector<BaseRanking> out;
  for (const auto& o : orders) out.push_back(BaseRanking{o});
  return out;
}

}  // namespace

TEST_CASE("pairwise_counts on the hand-enumerated instance") {
  const auto rankings = make_rankings({{0, 1, 2}, {1, 0, 2}});
  const auto pref = pairwise_counts(rankings);
  CHECK(pref.total() == 2);
  CHECK(pref.at(0, 1) == 1);
  CHECK(pref.at(1, 0) == 1);
  CHECK(pref.at(0, 2) == 2);
  CHECK(pref.at(1, 2) == 2);
  CHECK(pref.at(2, 0) == 0);
  CHECK(pref.at(2, 1) == 0);
  CHECK(pref.at(0, 0) == 0);
}

TEST_CASE("pairwise_counts: unanimity and the single-item edge") {
  std::vector<BaseRanking> same(7, BaseRanking{{0, 1}});
  const auto pref = pairwise_counts(same);
  CHECK(pref.at(0, 1) == 7);
  CHECK(pref.at(1, 0) == 0);

  const auto single = pairwise_counts(make_rankings({{0}, {0}, {0}}));
  CHECK(single.size() == 1);
  CHECK(single.at(0, 0) == 0);
}

TEST_CASE("pairwise_counts input validation") {
  CHECK_THROWS_AS(pairwise_counts({}), std::invalid_argument);
  CHECK_THROWS_AS(pairwise_counts(make_rankings({{0, 1, 2}, {0, 1}})),
                  std::invalid_argument);
  CHECK_THROWS_AS(pairwise_counts(make_rankings({{0, 0, 1}})),
                  std::invalid_argument);
  CHECK_THROWS_AS(pairwise_counts(make_rankings({{0, 1, 3}})),
                  std::invalid_argument);
}

TEST_CASE("count conservation identities on random instances") {
  SplitMix64 rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng.next_below(12);
    const std::size_t t = 1 + rng.next_below(20);
    const auto rankings = testutil::random_rankings(n, t, rng);
    const auto pref = pairwise_counts(rankings);

    std::uint64_t total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(pref.at(j, j) == 0);
      for (std::size_t k = 0; k < n; ++k) {
        total += pref.at(j, k);
        if (j != k) CHECK(pref.at(j, k) + pref.at(k, j) == t);
      }
    }
    CHECK(total == static_cast<std::uint64_t>(t) * n * (n - 1) / 2);

    // parallel merge must agree exactly with the serial reference
    const auto ser = serial::pairwise_counts(rankings);
    CHECK(pref.raw() == ser.raw());
  }
}

TEST_CASE("majority requires a strict more-than-half count") {
  {
    PairwisePreference pref(2, 3);
    pref.add(0, 1, 2);
    pref.add(1, 0, 1);
    CHECK(majority(pref, 0, 1));
    CHECK_FALSE(majority(pref, 1, 0));
  }
  {
    PairwisePreference pref(2, 2);  // exact tie: false in both directions
    pref.add(0, 1, 1);
    pref.add(1, 0, 1);
    CHECK_FALSE(majority(pref, 0, 1));
    CHECK_FALSE(majority(pref, 1, 0));
  }
  {
    PairwisePreference pref(2, 5);
    pref.add(1, 0, 5);
    CHECK_FALSE(majority(pref, 0, 1));
    CHECK(majority(pref, 1, 0));
    CHECK_THROWS_AS(majority(pref, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(majority(pref, 0, 2), std::invalid_argument);
  }
}

TEST_CASE("majority is never true in both directions") {
  SplitMix64 rng(32);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng.next_below(8);
    const auto pref =
        pairwise_counts(testutil::random_rankings(n, 1 + rng.next_below(9), rng));
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const bool both = majority(pref, j, k) && majority(pref, k, j);
        CHECK_FALSE(both);
      }
    }
  }
}

TEST_CASE("kendall_distance basics") {
  CHECK(kendall_distance(BaseRanking{{0, 1, 2}}, BaseRanking{{0, 1, 2}}) == 0);
  CHECK(kendall_distance(BaseRanking{{0, 1, 2}}, BaseRanking{{2, 1, 0}}) == 3);
  CHECK(kendall_distance(BaseRanking{{0, 1, 2}}, BaseRanking{{1, 0, 2}}) == 1);
  CHECK_THROWS_AS(kendall_distance(BaseRanking{{0, 1}}, BaseRanking{{0, 1, 2}}),
                  std::invalid_argument);
}

TEST_CASE("kendall_distance matches the oracle on random pairs") {
  SplitMix64 rng(33);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.next_below(12);
    const auto a = testutil::random_ranking(n, rng);
    const auto b = testutil::random_ranking(n, rng);
    CHECK(kendall_distance(a, b) == testutil::kendall_oracle(a.order, b.order));
  }
}

TEST_CASE("total_kendall_distance equals the per-ballot sum") {
  SplitMix64 rng(34);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.next_below(8);
    const auto rankings = testutil::random_rankings(n, 1 + rng.next_below(12), rng);
    const auto pref = pairwise_counts(rankings);
    const auto order = testutil::random_ranking(n, rng);
    CHECK(total_kendall_distance(pref, order.order) ==
          testutil::total_distance_oracle(order.order, rankings));
  }
}

TEST_CASE("aggregate_count on the hand-enumerated instances") {
  {
    const auto agg = aggregate_count(make_rankings({{0, 1, 2}, {1, 0, 2}}));
    CHECK(agg.scores == std::vector<double>{3, 3, 0});
    CHECK(agg.order == std::vector<std::size_t>{0, 1, 2});
  }
  {
    const auto agg = aggregate_count(
        std::vector<BaseRanking>(9, BaseRanking{{2, 0, 1}}));
    CHECK(agg.order == std::vector<std::size_t>{2, 0, 1});
  }
  {
    const auto agg = aggregate_count(make_rankings({{0, 1}, {0, 1}, {1, 0}}));
    CHECK(agg.scores == std::vector<double>{2, 1});
    CHECK(agg.order == std::vector<std::size_t>{0, 1});
  }
}

TEST_CASE("aggregate_count is invariant to the order of the ballots") {
  SplitMix64 rng(35);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rng.next_below(7);
    auto rankings = testutil::random_rankings(n, 2 + rng.next_below(10), rng);
    const auto before = aggregate_count(rankings);
    for (std::size_t i = rankings.size(); i > 1; --i) {
      std::swap(rankings[i - 1], rankings[rng.next_below(i)]);
    }
    CHECK(aggregate_count(rankings) == before);
  }
}

TEST_CASE("aggregate_kemeny_exact on the hand-checked instances") {
  {
    const auto rankings = make_rankings({{0, 1, 2}, {0, 1, 2}, {1, 0, 2}});
    const auto agg = aggregate_kemeny_exact(rankings);
    CHECK(agg.order == std::vector<std::size_t>{0, 1, 2});
    CHECK(testutil::total_distance_oracle(agg.order, rankings) == 1);
    CHECK(agg.scores == std::vector<double>{3, 2, 1});
  }
  {
    const auto rankings = make_rankings({{2, 0, 1, 3}});
    const auto agg = aggregate_kemeny_exact(rankings);
    CHECK(agg.order == std::vector<std::size_t>{2, 0, 1, 3});
    CHECK(testutil::total_distance_oracle(agg.order, rankings) == 0);
  }
  {
    // both permutations cost 1; the lexicographically smaller one wins
    const auto agg = aggregate_kemeny_exact(make_rankings({{0, 1}, {1, 0}}));
    CHECK(agg.order == std::vector<std::size_t>{0, 1});
  }
}

TEST_CASE("aggregate_kemeny_exact enforces its capacity cap") {
  BaseRanking big;
  big.order.resize(11);
  std::iota(big.order.begin(), big.order.end(), std::size_t{0});
  CHECK_THROWS_AS(aggregate_kemeny_exact(std::vector<BaseRanking>{big}),
                  CapacityError);
  CHECK_NOTHROW(aggregate_kemeny_exact(std::vector<BaseRanking>{big}, 11));

  BaseRanking huge;  // beyond the hard subset-table limit, whatever the cap
  huge.order.resize(26);
  std::iota(huge.order.begin(), huge.order.end(), std::size_t{0});
  CHECK_THROWS_AS(aggregate_kemeny_exact(std::vector<BaseRanking>{huge}, 64),
                  CapacityError);
}

TEST_CASE("aggregate_kemeny_exact equals exhaustive enumeration") {
  SplitMix64 rng(36);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng.next_below(6);  // up to 7
    const std::size_t t = 1 + rng.next_below(15);
    const auto rankings = testutil::random_rankings(n, t, rng);
    const auto expected = testutil::enumerate_kemeny(rankings);
    const auto agg = aggregate_kemeny_exact(rankings);
    CHECK(testutil::total_distance_oracle(agg.order, rankings) == expected.cost);
    CHECK(agg.order == expected.order);  // lexicographic tie-break matches
  }
}

TEST_CASE("counting and exact Kemeny can disagree") {
  // Positional counting is Borda-like and can prefer a different winner than
  // the Kendall-distance minimizer. Five ballots over three items:
  const auto rankings = make_rankings(
      {{0, 1, 2}, {0, 1, 2}, {1, 2, 0}, {1, 2, 0}, {2, 0, 1}});
  const auto count = aggregate_count(rankings);
  const auto kemeny = aggregate_kemeny_exact(rankings);
  CHECK(count.order == std::vector<std::size_t>{1, 0, 2});
  CHECK(kemeny.order == std::vector<std::size_t>{0, 1, 2});
  // the exact consensus is strictly closer to the ballots
  CHECK(testutil::total_distance_oracle(kemeny.order, rankings) <
        testutil::total_distance_oracle(count.order, rankings));
}

TEST_CASE("aggregate_cemc config validation") {
  const auto rankings = make_rankings({{0, 1, 2}});
  CEMCConfig bad;
  bad.samples = 0;
  CHECK_THROWS_AS(aggregate_cemc(rankings, bad, 0), std::invalid_argument);
  bad = CEMCConfig{};
  bad.elite_fraction = 0.0;
  CHECK_THROWS_AS(aggregate_cemc(rankings, bad, 0), std::invalid_argument);
  bad.elite_fraction = 1.5;
  CHECK_THROWS_AS(aggregate_cemc(rankings, bad, 0), std::invalid_argument);
  bad = CEMCConfig{};
  bad.alpha = 0.0;
  CHECK_THROWS_AS(aggregate_cemc(rankings, bad, 0), std::invalid_argument);
}

TEST_CASE("aggregate_cemc returns a single ballot exactly") {
  const auto rankings = make_rankings({{3, 0, 2, 1}});
  const auto agg = aggregate_cemc(rankings, CEMCConfig{}, 7);
  CHECK(agg.order == std::vector<std::size_t>{3, 0, 2, 1});
}

TEST_CASE("aggregate_cemc agrees with the exact solver on the small instance") {
  const auto rankings = make_rankings({{0, 1, 2}, {0, 1, 2}, {1, 0, 2}});
  const auto agg = aggregate_cemc(rankings, CEMCConfig{}, 0);
  CHECK(agg.order == aggregate_kemeny_exact(rankings).order);
}

TEST_CASE("aggregate_cemc never does worse than the counting heuristic") {
  SplitMix64 rng(37);
  for (int rep = 0; rep < 15; ++rep) {
    const std::size_t n = 2 + rng.next_below(6);
    const auto rankings = testutil::random_rankings(n, 1 + rng.next_below(12), rng);
    const auto count_cost = testutil::total_distance_oracle(
        aggregate_count(rankings).order, rankings);
    const auto cemc_cost = testutil::total_distance_oracle(
        aggregate_cemc(rankings, CEMCConfig{}, 1000 + rep).order, rankings);
    CHECK(cemc_cost <= count_cost);
  }
}

TEST_CASE("aggregate_cemc is deterministic and matches the serial reference") {
  SplitMix64 rng(38);
  const auto rankings = testutil::random_rankings(9, 11, rng);
  const CEMCConfig config;
  const auto a = aggregate_cemc(rankings, config, 42);
  const auto b = aggregate_cemc(rankings, config, 42);
  CHECK(a == b);
  const auto ser = serial::aggregate_cemc(rankings, config, 42);
  CHECK(a.order == ser.order);
  CHECK(a.scores == ser.scores);  // bitwise equality expected
  CHECK(aggregate_cemc(rankings, config, 43).order ==
        serial::aggregate_cemc(rankings, config, 43).order);
}

TEST_CASE("unanimity: all aggregators return the common ballot") {
  SplitMix64 rng(39);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + rng.next_below(7);
    const auto ballot = testutil::random_ranking(n, rng);
    const std::vector<BaseRanking> rankings(3 + rng.next_below(8), ballot);
    CHECK(aggregate_count(rankings).order == ballot.order);
    CHECK(aggregate_kemeny_exact(rankings).order == ballot.order);
    CHECK(aggregate_cemc(rankings, CEMCConfig{}, rep).order == ballot.order);
  }
}

TEST_CASE("frame-order invariance end to end for all aggregators") {
  SplitMix64 rng(40);
  for (int rep = 0; rep < 5; ++rep) {
    const auto ds = testutil::random_dataset(5, 6, 3, rng);
    const auto& probe = ds.probe()[rep % ds.probe().size()];

    const auto plain =
        all_base_rankings(probe, ds.gallery(), DistanceMode::kMin);
    std::vector<VideoSequence> mixed_gallery;
    for (std::size_t j = 0; j < ds.gallery().size(); ++j) {
      mixed_gallery.push_back(shuffle(ds.gallery()[j], derive_seed(rep, j)));
    }
    const auto mixed = all_base_rankings(shuffle(probe, 17 + rep), mixed_gallery,
                                         DistanceMode::kMin);

    CHECK(aggregate_count(plain).order == aggregate_count(mixed).order);
    CHECK(aggregate_kemeny_exact(plain).order ==
          aggregate_kemeny_exact(mixed).order);
    CHECK(aggregate_cemc(plain, CEMCConfig{}, 5).order ==
          aggregate_cemc(mixed, CEMCConfig{}, 5).order);
  }
}
