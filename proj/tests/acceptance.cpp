// Acceptance runner: one PASS/FAIL line per criterion.
//
//   simtrack_acceptance [--strict] [--only N]
//
// Exit status is 0 when every criterion ran (FAIL lines included), 1 with
// --strict when any criterion failed, 2 when a criterion threw.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "simtrack/bench.hpp"
#include "simtrack/metrics.hpp"
#include "simtrack/synthetic.hpp"
#include "simtrack/tracker.hpp"
#include "support.hpp"

using namespace simtrack;
namespace st = simtrack::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 ------------------------------------------------------------------------
Outcome score_functions() {
  const ScoreParams p;
  ScoreParams esnn;
  esnn.net = NetKind::EnhancedNet;
  const BoundingBox box(0, 0, 10, 10);
  struct Case {
    const char* name;
    double got;
    double want;
  };
  const std::vector<Case> cases = {
      {"s_dist(1)", s_dist(1.0, p), 0.0},
      {"s_dist(0.1)", s_dist(0.1, p), 0.8},
      {"s_dist(0)", s_dist(0.0, p), 4.0},
      {"s_iou(disjoint)", s_iou(box, {20, 20, 5, 5}), 1.0},
      {"s_iou(identical)", s_iou(box, box), 2.0},
      {"s_iou(half shift)", s_iou(box, {5, 0, 10, 10}), 1.333333},
      {"s_arat(equal)", s_arat(box, {40, 0, 10, 10}, p), 2.225541},
      {"s_arat(ratio 0.2)", s_arat(box, {40, 0, 2, 10}, p), 1.0},
      {"s_arat(ratio 0.5)", s_arat(box, {0, 0, 5, 10}, p), 1.349859},
      {"s_new(identical,1)", s_new(box, box, 1.0, p), 4.451082},
      {"s_new(disjoint,0.1)", s_new(box, {30, 0, 10, 10}, 0.1, p), 3.025541},
      {"s_new(disjoint ratio 0.2,1)", s_new(box, {30, 0, 2, 10}, 1.0, p), 1.0},
      {"score_pair(base)", score_pair(box, box, 1.0, p), 4.451082},
      {"score_pair(esnn,1)", score_pair(box, box, 1.0, esnn), 0.0},
      {"score_pair(esnn,0.1)", score_pair(box, {300, 300, 7, 3}, 0.1, esnn), 0.8},
  };
  double worst = 0.0;
  std::string worst_name;
  for (const auto& c : cases) {
    const double err = std::abs(c.got - c.want);
    if (err >= worst) {
      worst = err;
      worst_name = c.name;
    }
  }
  return {worst < 1e-6, fmt("%zu examples, max abs error %.2e (%s), s_dist(0)=%.12f", cases.size(), worst,
                            worst_name.c_str(), s_dist(0.0, p))};
}

// 2 ------------------------------------------------------------------------
Outcome gradient_check() {
  double worst = 0.0;
  int checks = 0;
  for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Rng rng = make_rng(seed, "acceptance-gradient");
    for (const HeadKind head : {HeadKind::Base, HeadKind::Enhanced}) {
      for (int b = 0; b < 20; ++b) {
        const auto model = head == HeadKind::Base ? EmbeddingModel::base(seed * 100 + b)
                                                  : EmbeddingModel::enhanced(seed * 100 + b);
        const auto batch = st::random_batch(rng, 8);
        const double margin = model.margin();
        const auto analytic = contrastive_loss_and_gradient(model, batch, margin).gradient.flatten(head);
        const auto numeric = st::numeric_gradient(model, batch, margin, 1e-5);
        worst = std::max(worst, st::max_relative_error(analytic, numeric));
        ++checks;
      }
    }
  }
  return {worst < 1e-4, fmt("%d batches (3 seeds x 20 x 2 heads), max relative error %.2e", checks, worst)};
}

// 3 ------------------------------------------------------------------------
Outcome margin_behavior() {
  bool zero = true;
  for (const double e : {3.0, 3.5, 10.0}) {
    const DistanceLabel b[] = {{e, 0}};
    zero = zero && contrastive_loss(b, 3.0) == 0.0;
  }
  SyntheticSpec spec;
  spec.identities = 2;
  spec.frames = 60;
  spec.descriptor_noise = 0.01;
  Rng rng = make_rng(kDefaultSeed, "pairs");
  const auto samples = make_pair_samples(generate_synthetic(spec), DescriptorSource::Oracle, 1.0, rng);
  TrainConfig cfg;
  cfg.epochs = 200;
  const auto model = EmbeddingModel::base(kDefaultSeed, 3.0);
  const auto result = train(model, samples, cfg);
  const auto rep = evaluate_pairs(result.model, samples);
  int below_margin_negatives = 0;
  for (const auto& s : samples) {
    if (s.label == 0 && result.model.pair_distance(s) < 3.0) ++below_margin_negatives;
  }
  return {zero && rep.f1 > 0.99,
          fmt("E>=3 non-match loss zero: %s; pair F1 %.4f (P %.4f R %.4f) on %zu pairs, loss %.2e -> %.2e, "
              "%d negatives just inside the margin",
              zero ? "yes" : "no", rep.f1, rep.precision, rep.recall, samples.size(),
              result.loss_history.front(), result.loss_history.back(), below_margin_negatives)};
}

// 4 ------------------------------------------------------------------------
Outcome geometric_fusion() {
  Rng train_rng = make_rng(kDefaultSeed, "confusers-train");
  Rng test_rng = make_rng(kDefaultSeed, "confusers-test");
  const auto train_set = make_confuser_set(600, 0.01, train_rng);
  const auto test_set = make_confuser_set(600, 0.01, test_rng);
  TrainConfig base_cfg;
  base_cfg.epochs = 100;
  const auto base = train(EmbeddingModel::base(kDefaultSeed), train_set, base_cfg).model;
  TrainConfig enh_cfg;
  enh_cfg.epochs = 100;
  enh_cfg.freeze_epochs = 50;
  const auto enhanced = train(EmbeddingModel::enhanced_from(base, kDefaultSeed), train_set, enh_cfg).model;
  const auto b = evaluate_pairs(base, test_set);
  const auto e = evaluate_pairs(enhanced, test_set);
  return {e.f1 > b.f1, fmt("held-out confuser F1: enhanced %.4f vs base %.4f (base P %.3f R %.3f)", e.f1, b.f1,
                           b.precision, b.recall)};
}

// 5 ------------------------------------------------------------------------
Outcome matcher_oracle() {
  Rng rng = make_rng(kDefaultSeed, "acceptance-matcher");
  int mismatches = 0, partition_failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto r = st::random_matrix(rng, 6, trial % 4 == 0 ? 0.6 : 1.0, trial % 5 == 0);
    // Multiples of 1/64 keep every sum exact.
    for (auto& p : r.matrix.pairs) p.score = std::round(p.score * 64.0) / 64.0;
    TrackId next = 1000;
    const auto h = match_hungarian(r.matrix, r.tracks, next);
    const auto best = st::brute_force_best(r.matrix, r.tracks);
    if (static_cast<int>(h.pairs.size()) != best.first || total_score(r.matrix, h) != best.second) ++mismatches;
    if (!check_assignment(h, r.matrix.num_detections).empty()) ++partition_failures;
    const auto g = match_greedy(r.matrix, r.tracks, next);
    if (!check_assignment(g, r.matrix.num_detections).empty()) ++partition_failures;
  }
  return {mismatches == 0 && partition_failures == 0,
          fmt("1000 matrices: %d optimum mismatches, %d partition violations", mismatches, partition_failures)};
}

// 6 ------------------------------------------------------------------------
Outcome algorithm_trace() {
  using Pairs = std::vector<std::pair<TrackId, int>>;
  const TrackId A = 1, B = 2;
  auto run = [](int n_det, std::vector<ScoredPair> pairs, std::vector<TrackId> active) {
    ScoreMatrix m;
    m.num_detections = n_det;
    m.pairs = std::move(pairs);
    TrackId next = 100;
    return match_greedy(m, active, next);
  };
  const auto one = run(1, {{A, 0, 0.4, 1}}, {A});
  const auto two = run(1, {{A, 0, 3, 1}, {B, 0, 2, 1}}, {A, B});
  const auto sw = run(2, {{A, 0, 5, 1}, {B, 0, 4, 1}, {B, 1, 1, 1}, {A, 1, 0.5, 1}}, {A, B});
  const bool ok1 = one.pairs == Pairs{{A, 0}} && one.new_tracks.empty();
  const bool ok2 = two.pairs == Pairs{{A, 0}} && two.new_tracks.empty();
  const bool ok3 = sw.pairs == Pairs{{A, 0}, {B, 1}} && sw.new_tracks.empty();
  return {ok1 && ok2 && ok3, fmt("single candidate %s, higher score wins %s, conflict/switch trace {A-d1, B-d2} %s",
                                 ok1 ? "ok" : "WRONG", ok2 ? "ok" : "WRONG", ok3 ? "ok" : "WRONG")};
}

// 7 ------------------------------------------------------------------------
Outcome scaling() {
  const int sizes[] = {50, 200, 800};
  const auto records = bench_matchers(sizes, 3, kDefaultSeed);
  const auto summary = summarize(records);
  const double gs = loglog_slope(summary, MatchAlgorithm::Greedy);
  const double hs = loglog_slope(summary, MatchAlgorithm::Hungarian);
  bool increasing = true;
  for (std::size_t i = 1; i < summary.size(); ++i) increasing = increasing && summary[i].ratio > summary[i - 1].ratio;
  std::string ratios;
  for (const auto& s : summary) ratios += fmt("%s%d:%.1f", ratios.empty() ? "" : " ", s.n, s.ratio);
  return {increasing && hs - gs >= 1.0,
          fmt("hungarian/greedy ratio [%s], slopes greedy %.2f hungarian %.2f (gap %.2f)", ratios.c_str(), gs, hs,
              hs - gs)};
}

// 8 ------------------------------------------------------------------------
Outcome end_to_end() {
  SyntheticSpec spec;
  const auto seq = generate_synthetic(spec);
  std::stringstream gt_file;
  write_mot_ground_truth(gt_file, seq.ground_truth);
  const auto gt = to_ground_truth(parse_mot(gt_file).entries);
  std::string detail;
  bool all = true;
  for (const auto net : {NetKind::BaseNet, NetKind::EnhancedNet}) {
    for (const auto alg : {MatchAlgorithm::Greedy, MatchAlgorithm::Hungarian}) {
      TrackerConfig cfg;
      cfg.score.net = net;
      cfg.matcher.algorithm = alg;
      const auto model = net == NetKind::BaseNet ? EmbeddingModel::base(kDefaultSeed)
                                                 : EmbeddingModel::enhanced(kDefaultSeed);
      const auto run = run_sequence(cfg, model, oracle_provider(), seq.detections);
      std::stringstream res_file;
      write_mot(res_file, run.rows);
      const auto rep = evaluate(parse_mot(res_file).entries, gt);
      all = all && rep.mota == 1.0 && rep.id_switches == 0;
      detail += fmt("%s%s/%s MOTA %.3f IDs %lld", detail.empty() ? "" : ", ", std::string(to_string(net)).c_str(),
                    std::string(to_string(alg)).c_str(), rep.mota, static_cast<long long>(rep.id_switches));
    }
  }
  return {all, detail};
}

// 9 ------------------------------------------------------------------------
Outcome clear_mot_trace() {
  const auto f = st::clear_mot_fixture();
  const auto r = evaluate(f.results, f.ground_truth);
  const bool counts = r.fp == 1 && r.fn == 1 && r.id_switches == 1 && r.fragmentations == 1 && r.mota == 0.5;
  Rng rng = make_rng(kDefaultSeed, "acceptance-relabel");
  int broken = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TrackId> ids{10, 20, 30};
    std::vector<TrackId> image;
    std::set<TrackId> used;
    while (image.size() < ids.size()) {
      const TrackId candidate = static_cast<TrackId>(rng() % 50) + 1;
      if (used.insert(candidate).second) image.push_back(candidate);
    }
    std::map<TrackId, TrackId> bijection;
    for (std::size_t i = 0; i < ids.size(); ++i) bijection[ids[i]] = image[i];
    auto relabeled = f.results;
    for (auto& row : relabeled) row.id = bijection.at(row.id);
    if (evaluate(relabeled, f.ground_truth).mota != r.mota) ++broken;
  }
  return {counts && broken == 0,
          fmt("FP %lld FN %lld IDs %lld Frag %lld MOTA %.3f (want 1 1 1 1 0.500); %d/100 relabelings changed MOTA",
              static_cast<long long>(r.fp), static_cast<long long>(r.fn), static_cast<long long>(r.id_switches),
              static_cast<long long>(r.fragmentations), r.mota, broken)};
}

// 10 -----------------------------------------------------------------------
Outcome causality() {
  Rng rng = make_rng(kDefaultSeed, "acceptance-causality");
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    SyntheticSpec spec;
    spec.identities = 2 + static_cast<int>(rng() % 6);
    spec.frames = 20 + static_cast<int>(rng() % 40);
    spec.dropout = uniform(rng, 0.0, 0.3);
    spec.spurious_rate = uniform(rng, 0.0, 0.2);
    spec.box_noise = uniform(rng, 0.0, 4.0);
    spec.descriptor_noise = uniform(rng, 0.0, 0.5);
    spec.seed = rng();
    const auto seq = generate_synthetic(spec);
    TrackerConfig cfg;
    cfg.matcher.look_back = 1 + static_cast<int>(rng() % 3);
    cfg.matcher.algorithm = trial % 2 == 0 ? MatchAlgorithm::Greedy : MatchAlgorithm::Hungarian;
    const auto model = EmbeddingModel::base(kDefaultSeed);
    const auto provider = table_provider(seq.descriptors);
    const auto full = run_sequence(cfg, model, provider, seq.detections);
    const int cut = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(spec.frames));
    std::vector<Detection> prefix;
    for (const auto& d : seq.detections) {
      if (d.frame <= cut) prefix.push_back(d);
    }
    const auto part = run_sequence(cfg, model, provider, prefix);
    std::vector<MotRow> expected;
    for (const auto& row : full.rows) {
      if (row.frame <= cut) expected.push_back(row);
    }
    if (part.rows != expected) ++failures;
  }
  return {failures == 0, fmt("50 sequences replayed from truncated streams, %d mismatches", failures)};
}

// 11 -----------------------------------------------------------------------
Outcome format_roundtrips() {
  Rng rng = make_rng(kDefaultSeed, "acceptance-fuzz");
  int broken = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto rows = st::random_mot_rows(rng, rng() % 50);
    if (st::roundtrip_mot(rows) != rows) ++broken;
  }
  std::istringstream kitti(
      "0 1 Car 0 0 -1 100 50 150 120 1 1 1 1 1 1 0\n"
      "0 2 Van 0 0 -1 1 1 20 20 1 1 1 1 1 1 0\n"
      "0 3 Cyclist 0 0 -1 1 1 20 20 1 1 1 1 1 1 0\n"
      "1 4 Pedestrian 0 0 -1 1 1 20 40 1 1 1 1 1 1 0\n"
      "1 5 Truck 0 0 -1 1 1 20 20 1 1 1 1 1 1 0\n"
      "2 -1 DontCare -1 -1 -10 1 1 20 20 -1 -1 -1 -1000 -1000 -1000 -10\n"
      "2 6 Person_sitting 0 0 -1 1 1 20 20 1 1 1 1 1 1 0\n"
      "2 7 Tram 0 0 -1 1 1 20 20 1 1 1 1 1 1 0\n"
      "2 8 Misc 0 0 -1 1 1 20 20 1 1 1 1 1 1 0\n");
  const auto parsed = parse_kitti(kitti);
  std::set<std::string> classes;
  for (const auto& e : parsed.entries) classes.insert(e.class_label);
  const bool kitti_ok = parsed.entries.size() == 2 && classes == std::set<std::string>{"Car", "Pedestrian"} &&
                        parsed.entries[0].box == BoundingBox(100, 50, 50, 70);
  return {broken == 0 && kitti_ok, fmt("1000 fuzzed MOT files, %d round-trip failures; KITTI kept %zu rows of 9 "
                                       "(classes: %s)",
                                       broken, parsed.entries.size(), kitti_ok ? "Car, Pedestrian" : "unexpected")};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--strict] [--only N]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"score-function conformance", score_functions},
      {"contrastive-loss gradient check", gradient_check},
      {"margin behavior and separable pair F1", margin_behavior},
      {"geometric-fusion benefit on confusers", geometric_fusion},
      {"matcher oracle equivalence", matcher_oracle},
      {"greedy trace conformance", algorithm_trace},
      {"matcher scaling", scaling},
      {"end-to-end perfect-oracle tracking", end_to_end},
      {"CLEAR-MOT hand trace and relabeling", clear_mot_trace},
      {"online causality", causality},
      {"format round-trips", format_roundtrips},
  };
  int failed = 0, errors = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (only != 0 && only != number) continue;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = criteria[i].second();
      const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
      std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", number, criteria[i].first,
                  o.detail.c_str(), took.count());
      if (!o.pass) ++failed;
    } catch (const std::exception& e) {
      std::printf("FAIL %2d %s: error: %s\n", number, criteria[i].first, e.what());
      ++errors;
    }
    std::fflush(stdout);
  }
  std::printf("%d failed, %d errors\n", failed, errors);
  if (errors > 0) return 2;
  return strict && failed > 0 ? 1 : 0;
}
