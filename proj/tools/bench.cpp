// Kernel benchmark: OpenMP implementations against their serial references.
// Each kernel is checked for exact agreement before timing is reported.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>

#include "reid/aggregate.hpp"
#include "reid/bound.hpp"
#include "reid/io.hpp"
#include "reid/ranking.hpp"
#include "reid/serial.hpp"

using namespace reid;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto start = clock_type::now();
    fn();
    const std::chrono::duration<double, std::milli> elapsed =
        clock_type::now() - start;
    best = std::min(best, elapsed.count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool same) {
  std::printf("%-24s %10.2f ms %10.2f ms   %5.2fx   %s\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms, same ? "match" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int repeats = 3;
  if (argc > 1) repeats = std::max(1, std::atoi(argv[1]));

  std::printf("threads: %d, repeats: %d (best of)\n", omp_get_max_threads(),
              repeats);
  std::printf("%-24s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");

  // distance matrix: 1 probe video x 200 gallery videos, T=64, D=64
  {
    SyntheticSpec spec;
    spec.persons = 200;
    spec.frames_per_video = 64;
    spec.dim = 64;
    spec.identity_separation = 1.0;
    spec.frame_noise = 0.5;
    spec.seed = 1;
    const Dataset ds = generate_synthetic(spec);
    std::vector<FrameGalleryDistances> serial_out, parallel_out;
    const double s = time_ms(
        [&] {
          serial_out = serial::distance_matrix(ds.probe()[0], ds.gallery(),
                                               DistanceMode::kMin);
        },
        repeats);
    const double p = time_ms(
        [&] {
          parallel_out =
              distance_matrix(ds.probe()[0], ds.gallery(), DistanceMode::kMin);
        },
        repeats);
    bool same = serial_out.size() == parallel_out.size();
    for (std::size_t t = 0; same && t < serial_out.size(); ++t) {
      same = serial_out[t].distances == parallel_out[t].distances;
    }
    report("distance_matrix", s, p, same);
  }

  // pairwise counts: 512 rankings over 300 items
  {
    SplitMix64 rng(2);
    std::vector<BaseRanking> rankings;
    for (int t = 0; t < 512; ++t) {
      BaseRanking r;
      r.order.resize(300);
      std::iota(r.order.begin(), r.order.end(), std::size_t{0});
      for (std::size_t i = r.order.size(); i > 1; --i) {
        std::swap(r.order[i - 1], r.order[rng.next_below(i)]);
      }
      rankings.push_back(std::move(r));
    }
    PairwisePreference serial_pref(1, 1), parallel_pref(1, 1);
    const double s = time_ms(
        [&] { serial_pref = serial::pairwise_counts(rankings); }, repeats);
    const double p =
        time_ms([&] { parallel_pref = pairwise_counts(rankings); }, repeats);
    report("pairwise_counts", s, p, serial_pref.raw() == parallel_pref.raw());
  }

  // majority-vote error simulation: 2e5 trials, T=100
  {
    const auto config = SyntheticRankerConfig::from_epsilon(0.1, 100, 200000, 3);
    BoundReport serial_report, parallel_report;
    const double s = time_ms(
        [&] { serial_report = serial::simulate_pairwise_error(config); },
        repeats);
    const double p = time_ms(
        [&] { parallel_report = simulate_pairwise_error(config); }, repeats);
    report("simulate_pairwise_error", s, p,
           serial_report.empirical_error == parallel_report.empirical_error);
  }

  // CE-MC consensus: 40 items, 64 ballots
  {
    SplitMix64 rng(4);
    std::vector<BaseRanking> rankings;
    for (int t = 0; t < 64; ++t) {
      BaseRanking r;
      r.order.resize(40);
      std::iota(r.order.begin(), r.order.end(), std::size_t{0});
      for (std::size_t i = r.order.size(); i > 1; --i) {
        std::swap(r.order[i - 1], r.order[rng.next_below(i)]);
      }
      rankings.push_back(std::move(r));
    }
    const CEMCConfig config;
    AggregatedRanking serial_agg, parallel_agg;
    const double s = time_ms(
        [&] { serial_agg = serial::aggregate_cemc(rankings, config, 9); },
        repeats);
    const double p = time_ms(
        [&] { parallel_agg = aggregate_cemc(rankings, config, 9); }, repeats);
    report("aggregate_cemc", s, p, serial_agg == parallel_agg);
  }

  return 0;
}
