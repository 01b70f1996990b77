#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "reid/ranking.hpp"
#include "reid/serial.hpp"

using namespace reid;

namespace {

VideoSequence one_frame_video(const std::string& id, std::vector<double> v) {
  return VideoSequence(id, "g", {FrameEmbedding(std::move(v))});
}

}  // namespace

TEST_CASE("euclidean distance basics") {
  CHECK(euclidean(FrameEmbedding({1, 2, 3}), FrameEmbedding({1, 2, 3})) == 0.0);
  CHECK(euclidean(FrameEmbedding({0, 0}), FrameEmbedding({3, 4})) == doctest::Approx(5.0));
  CHECK(euclidean(FrameEmbedding({1}), FrameEmbedding({-2})) == doctest::Approx(3.0));
  CHECK_THROWS_AS(euclidean(FrameEmbedding({1}), FrameEmbedding({1, 2})),
                  std::invalid_argument);

  SplitMix64 rng(20);
  for (int rep = 0; rep < 10; ++rep) {
    const auto a = testutil::random_sequence("a", "c", 1, 6, rng).frames()[0];
    const auto b = testutil::random_sequence("b", "c", 1, 6, rng).frames()[0];
    CHECK(euclidean(a, b) == euclidean(b, a));
    CHECK(euclidean(a, b) > 0.0);
  }
}

TEST_CASE("frame_to_video_distance reduces over gallery frames") {
  const FrameEmbedding probe({0, 0});
  const VideoSequence gallery("a", "g",
                              {FrameEmbedding({3, 4}), FrameEmbedding({1, 0})});
  CHECK(frame_to_video_distance(probe, gallery, DistanceMode::kMin) ==
        doctest::Approx(1.0));
  CHECK(frame_to_video_distance(probe, gallery, DistanceMode::kMean) ==
        doctest::Approx(3.0));

  const VideoSequence with_match(
      "a", "g", {FrameEmbedding({3, 4}), FrameEmbedding({0, 0})});
  CHECK(frame_to_video_distance(probe, with_match, DistanceMode::kMin) == 0.0);
}

TEST_CASE("base_ranking sorts by ascending distance") {
  const FrameEmbedding probe({0.0});
  const std::vector<VideoSequence> gallery = {
      one_frame_video("a", {0.5}), one_frame_video("b", {0.1}),
      one_frame_video("c", {0.3})};
  const auto r = base_ranking(probe, gallery, DistanceMode::kMin);
  CHECK(r.order == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("base_ranking breaks ties by ascending index") {
  const FrameEmbedding probe({0.0});
  const std::vector<VideoSequence> gallery = {
      one_frame_video("a", {2.0}), one_frame_video("b", {-2.0}),
      one_frame_video("c", {2.0})};
  const auto r = base_ranking(probe, gallery, DistanceMode::kMin);
  CHECK(r.order == std::vector<std::size_t>{0, 1, 2});

  const std::vector<VideoSequence> single = {one_frame_video("a", {7.0})};
  CHECK(base_ranking(probe, single, DistanceMode::kMin).order ==
        std::vector<std::size_t>{0});
}

TEST_CASE("base_ranking propagates errors") {
  const FrameEmbedding probe({0.0, 1.0});
  CHECK_THROWS_AS(base_ranking(probe, {}, DistanceMode::kMin),
                  std::invalid_argument);
  const std::vector<VideoSequence> gallery = {one_frame_video("a", {1.0})};
  CHECK_THROWS_AS(base_ranking(probe, gallery, DistanceMode::kMin),
                  std::invalid_argument);
}

TEST_CASE("all_base_rankings on a hand-built instance") {
  // 2-frame probe, 3 one-frame gallery videos in 1-D; enumerate distances by
  // hand as the oracle.
  const VideoSequence probe("q", "p",
                            {FrameEmbedding({0.0}), FrameEmbedding({1.0})});
  const std::vector<VideoSequence> gallery = {one_frame_video("a", {0.9}),
                                              one_frame_video("b", {0.2}),
                                              one_frame_video("c", {-0.4})};
  // frame 0 at 0.0: |0.9|=0.9, |0.2|=0.2, |-0.4|=0.4 -> order b, c, a
  // frame 1 at 1.0: 0.1, 0.8, 1.4 -> order a, b, c
  const auto rankings = all_base_rankings(probe, gallery, DistanceMode::kMin);
  REQUIRE(rankings.size() == 2);
  CHECK(rankings[0].order == std::vector<std::size_t>{1, 2, 0});
  CHECK(rankings[1].order == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("all_base_rankings of T=1 equals base_ranking") {
  SplitMix64 rng(21);
  const auto probe = testutil::random_sequence("q", "p", 1, 5, rng);
  std::vector<VideoSequence> gallery;
  for (int j = 0; j < 4; ++j) {
    gallery.push_back(
        testutil::random_sequence("g" + std::to_string(j), "g", 3, 5, rng));
  }
  const auto rankings = all_base_rankings(probe, gallery, DistanceMode::kMin);
  REQUIRE(rankings.size() == 1);
  CHECK(rankings[0] == base_ranking(probe.frames()[0], gallery, DistanceMode::kMin));
}

TEST_CASE("every base ranking is a permutation (random datasets)") {
  SplitMix64 rng(22);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t persons = 2 + rng.next_below(6);
    const std::size_t frames = 1 + rng.next_below(5);
    const std::size_t dim = 1 + rng.next_below(6);
    const auto ds = testutil::random_dataset(persons, frames, dim, rng);
    for (const auto& q : ds.probe()) {
      for (const auto& r : all_base_rankings(q, ds.gallery(), DistanceMode::kMin)) {
        CHECK(testutil::is_permutation_of_n(r.order));
      }
    }
  }
}

TEST_CASE("shuffling the probe permutes the base rankings as a multiset") {
  SplitMix64 rng(23);
  const auto ds = testutil::random_dataset(5, 8, 4, rng);
  const auto& probe = ds.probe()[0];
  const auto plain = all_base_rankings(probe, ds.gallery(), DistanceMode::kMin);
  const auto mixed =
      all_base_rankings(shuffle(probe, 99), ds.gallery(), DistanceMode::kMin);

  auto key = [](std::vector<BaseRanking> rs) {
    std::vector<std::vector<std::size_t>> orders;
    for (auto& r : rs) orders.push_back(std::move(r.order));
    std::sort(orders.begin(), orders.end());
    return orders;
  };
  CHECK(key(plain) == key(mixed));
}

TEST_CASE("argsort is invariant under strictly increasing transforms") {
  SplitMix64 rng(24);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.next_below(10);
    std::vector<double> distances(n);
    for (auto& d : distances) d = rng.next_double() + 0.1;
    const auto plain = ranking_from_distances(distances);
    std::vector<double> squared(n);
    for (std::size_t j = 0; j < n; ++j) squared[j] = distances[j] * distances[j];
    CHECK(ranking_from_distances(squared) == plain);
  }
}

TEST_CASE("min-mode ranking ignores gallery frame order") {
  SplitMix64 rng(25);
  const auto ds = testutil::random_dataset(6, 7, 3, rng);
  const auto& probe_frame = ds.probe()[0].frames()[0];
  const auto plain = base_ranking(probe_frame, ds.gallery(), DistanceMode::kMin);

  std::vector<VideoSequence> mixed;
  for (std::size_t j = 0; j < ds.gallery().size(); ++j) {
    mixed.push_back(shuffle(ds.gallery()[j], derive_seed(1234, j)));
  }
  CHECK(base_ranking(probe_frame, mixed, DistanceMode::kMin) == plain);
}

TEST_CASE("parallel distance kernels match the serial reference bit for bit") {
  SplitMix64 rng(26);
  const auto ds = testutil::random_dataset(8, 12, 6, rng);
  for (const auto mode : {DistanceMode::kMin, DistanceMode::kMean}) {
    const auto par = distance_matrix(ds.probe()[0], ds.gallery(), mode, 3);
    const auto ser = serial::distance_matrix(ds.probe()[0], ds.gallery(), mode, 3);
    REQUIRE(par.size() == ser.size());
    for (std::size_t t = 0; t < par.size(); ++t) {
      CHECK(par[t].probe_index == ser[t].probe_index);
      CHECK(par[t].frame_index == ser[t].frame_index);
      CHECK(par[t].distances == ser[t].distances);  // exact, not approximate
    }
    CHECK(all_base_rankings(ds.probe()[0], ds.gallery(), mode) ==
          serial::all_base_rankings(ds.probe()[0], ds.gallery(), mode));
  }
}

TEST_CASE("distance mode parsing") {
  CHECK(parse_distance_mode("min") == DistanceMode::kMin);
  CHECK(parse_distance_mode("mean") == DistanceMode::kMean);
  CHECK_THROWS_AS(parse_distance_mode("max"), std::invalid_argument);
  CHECK(to_string(DistanceMode::kMin) == "min");
  CHECK(to_string(DistanceMode::kMean) == "mean");
}
