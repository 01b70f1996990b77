// reid: video re-identification by orderless aggregation of per-frame
// rankings. Subcommands: synth, rank, eval, bound, diagnose-order.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reid/aggregate.hpp"
#include "reid/bound.hpp"
#include "reid/core.hpp"
#include "reid/io.hpp"
#include "reid/metrics.hpp"
#include "reid/ranking.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertionFailed = 1;  // bound violation, invariance failure
constexpr int kExitInputError = 2;
constexpr int kExitCapacityError = 3;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file: " + out_path);
  out << text;
  if (!out.good()) throw IoError("write failure: " + out_path);
}

// ---------------------------------------------------------------------------
// shared pipeline pieces
// ---------------------------------------------------------------------------

struct AggregatorChoice {
  std::string name = "count";  // count | kemeny | cemc
  CEMCConfig cemc;
  std::size_t kemeny_cap = kDefaultKemenyCap;
};

AggregatedRanking aggregate_with(const AggregatorChoice& choice,
                                 const std::vector<BaseRanking>& rankings,
                                 std::uint64_t query_seed) {
  if (choice.name == "count") return aggregate_count(rankings);
  if (choice.name == "kemeny") {
    return aggregate_kemeny_exact(rankings, choice.kemeny_cap);
  }
  return aggregate_cemc(rankings, choice.cemc, query_seed);
}

std::vector<AggregatedRanking> consensus_rankings(
    const std::vector<VideoSequence>& probe,
    const std::vector<VideoSequence>& gallery, DistanceMode mode,
    const AggregatorChoice& choice, std::uint64_t seed) {
  std::vector<AggregatedRanking> out;
  out.reserve(probe.size());
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const auto rankings = all_base_rankings(probe[i], gallery, mode);
    out.push_back(aggregate_with(choice, rankings, derive_seed(seed, i)));
  }
  return out;
}

std::vector<VideoSequence> subsample_all(const std::vector<VideoSequence>& videos,
                                         SampleRate rate) {
  std::vector<VideoSequence> out;
  out.reserve(videos.size());
  for (const auto& v : videos) out.push_back(subsample(v, rate));
  return out;
}

GroundTruth truth_by_identity(const std::vector<std::string>& query_ids,
                              const std::vector<std::string>& gallery_ids) {
  GroundTruth truth;
  truth.reserve(query_ids.size());
  for (const auto& id : query_ids) {
    std::set<std::size_t> t;
    for (std::size_t j = 0; j < gallery_ids.size(); ++j) {
      if (gallery_ids[j] == id) t.insert(j);
    }
    if (t.empty()) {
      throw std::invalid_argument("query identity '" + id +
                                  "' has no gallery entry");
    }
    truth.push_back(std::move(t));
  }
  return truth;
}

double rank1_accuracy(const std::vector<VideoSequence>& probe,
                      const std::vector<VideoSequence>& gallery,
                      DistanceMode mode, const AggregatorChoice& choice,
                      std::uint64_t seed) {
  const auto consensus = consensus_rankings(probe, gallery, mode, choice, seed);
  std::vector<std::string> query_ids, gallery_ids;
  for (const auto& q : probe) query_ids.push_back(q.identity());
  for (const auto& g : gallery) gallery_ids.push_back(g.identity());
  const std::vector<std::size_t> cutoffs = {1};
  return cmc(consensus, truth_by_identity(query_ids, gallery_ids), cutoffs).at(1);
}

std::map<std::string, double> aggregator_params(const AggregatorChoice& choice) {
  if (choice.name == "kemeny") {
    return {{"max_exact_n", static_cast<double>(choice.kemeny_cap)}};
  }
  if (choice.name == "cemc") {
    return {{"samples", static_cast<double>(choice.cemc.samples)},
            {"elite_fraction", choice.cemc.elite_fraction},
            {"alpha", choice.cemc.alpha},
            {"max_iters", static_cast<double>(choice.cemc.max_iters)},
            {"patience", static_cast<double>(choice.cemc.patience)}};
  }
  return {};
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

struct SynthArgs {
  SyntheticSpec spec;
  std::string out;
};

int cmd_synth(const SynthArgs& args) {
  const Dataset ds = generate_synthetic(args.spec);
  const auto paths = write_dataset(ds, args.out);
  std::cout << "probe manifest:   " << paths.probe_manifest.string() << "\n"
            << "gallery manifest: " << paths.gallery_manifest.string() << "\n";
  return kExitOk;
}

struct RankArgs {
  std::string probe;
  std::string gallery;
  std::string out;
  std::string k = "1";
  std::string dist = "min";
  AggregatorChoice choice;
  std::uint64_t seed = 0;
};

int cmd_rank(const RankArgs& args) {
  const SampleRate rate = SampleRate::parse(args.k);
  const DistanceMode mode = parse_distance_mode(args.dist);

  const Dataset ds = read_dataset(args.probe, args.gallery);
  const auto probe = subsample_all(ds.probe(), rate);
  const auto gallery = subsample_all(ds.gallery(), rate);

  const auto consensus =
      consensus_rankings(probe, gallery, mode, args.choice, args.seed);

  RankingsDocument doc;
  doc.method = args.choice.name;
  doc.distance_mode = args.dist;
  doc.sample_rate = rate.str();
  doc.seed = args.seed;
  doc.params = aggregator_params(args.choice);
  for (const auto& g : ds.gallery()) {
    doc.gallery.push_back({g.identity(), g.camera()});
  }
  for (std::size_t i = 0; i < probe.size(); ++i) {
    QueryRanking q;
    q.identity = probe[i].identity();
    q.camera = probe[i].camera();
    q.order = consensus[i].order;
    q.scores.reserve(q.order.size());
    for (std::size_t j : q.order) q.scores.push_back(consensus[i].scores[j]);
    doc.queries.push_back(std::move(q));
  }
  write_rankings(args.out, doc);
  std::cout << "wrote " << doc.queries.size() << " query rankings to "
            << args.out << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string rankings;
  std::string gallery;  // manifest; optional, identities fall back to the doc
  std::string ranks = "1,5,10,20";
  std::string out;
  bool as_json = false;
};

int cmd_eval(const EvalArgs& args) {
  const RankingsDocument doc = read_rankings(args.rankings);
  if (doc.queries.empty()) {
    throw std::invalid_argument("rankings file has no queries");
  }

  std::vector<std::string> gallery_ids;
  if (!args.gallery.empty()) {
    const Manifest manifest = read_manifest(args.gallery);
    if (manifest.videos.size() != doc.gallery.size()) {
      throw std::invalid_argument(
          "gallery manifest size does not match the rankings file");
    }
    for (const auto& v : manifest.videos) gallery_ids.push_back(v.identity);
  } else {
    for (const auto& g : doc.gallery) gallery_ids.push_back(g.identity);
  }

  std::vector<std::string> query_ids;
  std::vector<AggregatedRanking> consensus;
  for (const auto& q : doc.queries) {
    query_ids.push_back(q.identity);
    AggregatedRanking r;
    r.order = q.order;
    r.scores.assign(gallery_ids.size(), 0.0);
    for (std::size_t p = 0; p < q.order.size(); ++p) {
      if (q.order[p] >= r.scores.size()) {
        throw std::invalid_argument("rankings file: gallery index out of range");
      }
      if (p < q.scores.size()) r.scores[q.order[p]] = q.scores[p];
    }
    consensus.push_back(std::move(r));
  }

  const std::vector<std::size_t> cutoffs = parse_size_list(args.ranks);
  const auto truth = truth_by_identity(query_ids, gallery_ids);
  const auto result = evaluate(consensus, truth, cutoffs);

  if (args.as_json) {
    json cmc_json = json::object();
    for (const auto& [k, v] : result.cmc) cmc_json[std::to_string(k)] = v;
    const json out{{"cmc", cmc_json},
                   {"map", result.map_score},
                   {"num_queries", result.num_queries},
                   {"per_query_ap", result.per_query_ap}};
    emit(out.dump(2) + "\n", args.out);
  } else {
    std::ostringstream table;
    table << "CMC\n";
    for (const auto& [k, v] : result.cmc) {
      table << "  rank " << k << ": " << fmt(v) << "\n";
    }
    table << "mAP: " << fmt(result.map_score) << "\n";
    table << "queries: " << result.num_queries << "\n";
    emit(table.str(), args.out);
  }
  return kExitOk;
}

struct BoundArgs {
  std::string eps = "0.05,0.1,0.2";
  std::string t_values = "10,50,100,500";
  std::size_t trials = 100000;
  std::uint64_t seed = 0;
  std::string out;
  bool as_json = false;
};

int cmd_bound(const BoundArgs& args) {
  const auto eps_grid = parse_double_list(args.eps);
  const auto t_grid = parse_size_list(args.t_values);

  bool violated = false;
  json points = json::array();
  std::ostringstream table;
  table << "   eps      T  empirical      bound     stderr  ok\n";
  for (std::size_t ei = 0; ei < eps_grid.size(); ++ei) {
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      const auto config = SyntheticRankerConfig::from_epsilon(
          eps_grid[ei], t_grid[ti], args.trials, derive_seed(args.seed, ei, ti));
      const BoundReport report = simulate_pairwise_error(config);
      const bool ok = report.empirical_error <=
                      report.theoretical_bound + 3.0 * report.standard_error;
      violated = violated || !ok;

      char row[160];
      std::snprintf(row, sizeof(row), "%6.3f %6zu   %s   %s   %s  %s\n",
                    eps_grid[ei], t_grid[ti], fmt(report.empirical_error).c_str(),
                    fmt(report.theoretical_bound).c_str(),
                    fmt(report.standard_error).c_str(), ok ? "yes" : "NO");
      table << row;
      points.push_back({{"epsilon", eps_grid[ei]},
                        {"num_rankers", t_grid[ti]},
                        {"empirical_error", report.empirical_error},
                        {"theoretical_bound", report.theoretical_bound},
                        {"stderr", report.standard_error},
                        {"trials", report.trials},
                        {"ok", ok}});
    }
  }

  if (args.as_json) {
    const json out{{"points", points}, {"violated", violated}};
    emit(out.dump(2) + "\n", args.out);
  } else {
    emit(table.str(), args.out);
  }
  return violated ? kExitAssertionFailed : kExitOk;
}

struct DiagnoseArgs {
  std::string probe;
  std::string gallery;
  std::string seeds = "0,1,2";
  std::string k_sweep = "1,10,30,inf";
  std::string dist = "min";
  AggregatorChoice choice;
  std::uint64_t seed = 0;
  std::string out;
  bool as_json = false;
};

int cmd_diagnose_order(const DiagnoseArgs& args) {
  const DistanceMode mode = parse_distance_mode(args.dist);
  const Dataset ds = read_dataset(args.probe, args.gallery);
  const auto shuffle_seeds = parse_size_list(args.seeds);

  // The invariance check runs on full sequences: subsampling a shuffled video
  // keeps different frames, which is a different (and legitimate) input.
  const auto baseline =
      consensus_rankings(ds.probe(), ds.gallery(), mode, args.choice, args.seed);

  bool all_pass = true;
  json seeds_json = json::array();
  std::ostringstream report;
  report << "order invariance (aggregator: " << args.choice.name << ")\n";
  for (const std::size_t shuffle_seed : shuffle_seeds) {
    std::vector<VideoSequence> probe_mixed, gallery_mixed;
    for (std::size_t i = 0; i < ds.probe().size(); ++i) {
      probe_mixed.push_back(shuffle(ds.probe()[i], derive_seed(shuffle_seed, 0, i)));
    }
    for (std::size_t j = 0; j < ds.gallery().size(); ++j) {
      gallery_mixed.push_back(
          shuffle(ds.gallery()[j], derive_seed(shuffle_seed, 1, j)));
    }
    const auto shuffled = consensus_rankings(probe_mixed, gallery_mixed, mode,
                                             args.choice, args.seed);
    bool pass = true;
    for (std::size_t i = 0; i < baseline.size(); ++i) {
      pass = pass && (baseline[i].order == shuffled[i].order);
    }
    all_pass = all_pass && pass;
    report << "  seed " << shuffle_seed << ": " << (pass ? "PASS" : "FAIL") << "\n";
    seeds_json.push_back({{"seed", shuffle_seed}, {"pass", pass}});
  }

  report << "accuracy vs sample rate\n";
  json sweep_json = json::array();
  std::stringstream ss(args.k_sweep);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const SampleRate rate = SampleRate::parse(item);
    const double acc =
        rank1_accuracy(subsample_all(ds.probe(), rate),
                       subsample_all(ds.gallery(), rate), mode, args.choice,
                       args.seed);
    report << "  K=" << rate.str() << ": rank-1 " << fmt(acc) << "\n";
    sweep_json.push_back({{"k", rate.str()}, {"rank1", acc}});
  }

  if (args.as_json) {
    const json out{{"aggregator", args.choice.name},
                   {"order_invariance", seeds_json},
                   {"k_sweep", sweep_json},
                   {"all_pass", all_pass}};
    emit(out.dump(2) + "\n", args.out);
  } else {
    emit(report.str(), args.out);
  }
  return all_pass ? kExitOk : kExitAssertionFailed;
}

void add_aggregator_flags(CLI::App* cmd, AggregatorChoice& choice) {
  cmd->add_option("--agg", choice.name, "Aggregation method")
      ->check(CLI::IsMember({"count", "kemeny", "cemc"}))
      ->capture_default_str();
  cmd->add_option("--kemeny-cap", choice.kemeny_cap,
                  "Exact Kemeny solver size cap")
      ->capture_default_str();
  cmd->add_option("--cemc-samples", choice.cemc.samples,
                  "CE-MC samples per iteration")
      ->capture_default_str();
  cmd->add_option("--cemc-elite", choice.cemc.elite_fraction,
                  "CE-MC elite fraction")
      ->capture_default_str();
  cmd->add_option("--cemc-alpha", choice.cemc.alpha, "CE-MC update weight")
      ->capture_default_str();
  cmd->add_option("--cemc-iters", choice.cemc.max_iters, "CE-MC max iterations")
      ->capture_default_str();
  cmd->add_option("--cemc-patience", choice.cemc.patience,
                  "CE-MC non-improving iterations before stopping")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video re-identification as an orderless ensemble of per-frame "
               "rankings"};
  app.require_subcommand(1);

  int workers = 0;  // 0: leave the OpenMP default
  app.add_option("--workers", workers, "Worker thread count (>= 1)")
      ->check(CLI::PositiveNumber);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("--persons", synth.spec.persons, "Identities")
      ->required();
  synth_cmd->add_option("--frames", synth.spec.frames_per_video,
                        "Frames per video")
      ->required();
  synth_cmd->add_option("--dim", synth.spec.dim, "Embedding dimension")
      ->required();
  synth_cmd->add_option("--sep", synth.spec.identity_separation,
                        "Identity centroid separation")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.spec.frame_noise, "Frame noise sigma")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed, "Generator seed")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output dataset directory")
      ->required();

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Rank probe videos against a gallery");
  rank_cmd->add_option("--probe", rank.probe, "Probe manifest path")->required();
  rank_cmd->add_option("--gallery", rank.gallery, "Gallery manifest path")
      ->required();
  rank_cmd->add_option("--k", rank.k, "Sample rate: positive integer or 'inf'")
      ->capture_default_str();
  rank_cmd->add_option("--dist", rank.dist, "Frame-to-video distance")
      ->check(CLI::IsMember({"min", "mean"}))
      ->capture_default_str();
  rank_cmd->add_option("--seed", rank.seed, "Aggregation seed")
      ->capture_default_str();
  rank_cmd->add_option("--out", rank.out, "Rankings JSON output path")
      ->required();
  add_aggregator_flags(rank_cmd, rank.choice);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a rankings file");
  eval_cmd->add_option("--rankings", eval_args.rankings, "Rankings JSON path")
      ->required();
  eval_cmd->add_option("--gallery", eval_args.gallery,
                       "Gallery manifest for ground-truth identities");
  eval_cmd->add_option("--ranks", eval_args.ranks, "CMC cutoffs")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval_args.out, "Write the report here");
  eval_cmd->add_flag("--json", eval_args.as_json, "Machine-readable output");

  BoundArgs bound;
  auto* bound_cmd =
      app.add_subcommand("bound", "Check the majority-vote error bound");
  bound_cmd->add_option("--eps", bound.eps, "Epsilon grid")->capture_default_str();
  bound_cmd->add_option("--t-values", bound.t_values, "Ensemble size grid")
      ->capture_default_str();
  bound_cmd->add_option("--trials", bound.trials, "Monte Carlo trials per point")
      ->capture_default_str();
  bound_cmd->add_option("--seed", bound.seed, "Simulation seed")
      ->capture_default_str();
  bound_cmd->add_option("--out", bound.out, "Write the report here");
  bound_cmd->add_flag("--json", bound.as_json, "Machine-readable output");

  DiagnoseArgs diag;
  auto* diag_cmd = app.add_subcommand(
      "diagnose-order", "Verify frame-order invariance and sweep sample rates");
  diag_cmd->add_option("--probe", diag.probe, "Probe manifest path")->required();
  diag_cmd->add_option("--gallery", diag.gallery, "Gallery manifest path")
      ->required();
  diag_cmd->add_option("--seeds", diag.seeds, "Shuffle seeds")
      ->capture_default_str();
  diag_cmd->add_option("--k-sweep,--k", diag.k_sweep, "Sample rates for the table")
      ->capture_default_str();
  diag_cmd->add_option("--dist", diag.dist, "Frame-to-video distance")
      ->check(CLI::IsMember({"min", "mean"}))
      ->capture_default_str();
  diag_cmd->add_option("--seed", diag.seed, "Aggregation seed")
      ->capture_default_str();
  diag_cmd->add_option("--out", diag.out, "Write the report here");
  diag_cmd->add_flag("--json", diag.as_json, "Machine-readable output");
  add_aggregator_flags(diag_cmd, diag.choice);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  if (workers > 0) omp_set_num_threads(workers);

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (rank_cmd->parsed()) return cmd_rank(rank);
    if (eval_cmd->parsed()) return cmd_eval(eval_args);
    if (bound_cmd->parsed()) return cmd_bound(bound);
    if (diag_cmd->parsed()) return cmd_diagnose_order(diag);
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCapacityError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
