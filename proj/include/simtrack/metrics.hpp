#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "simtrack/assignment.hpp"
#include "simtrack/embedding.hpp"
#include "simtrack/error.hpp"
#include "simtrack/geometry.hpp"
#include "simtrack/io.hpp"

namespace simtrack {

/// CLEAR-MOT summary of one sequence.
struct MotReport {
  double mota = 0.0;
  double motp = 0.0;  // mean IoU of matched pairs, in [0, 1]
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t id_switches = 0;
  std::int64_t fragmentations = 0;
  double mostly_tracked = 0.0;  // fractions of ground-truth trajectories
  double partially_tracked = 0.0;
  double mostly_lost = 0.0;
  double faf = 0.0;
  double recall = 0.0;
  double precision = 0.0;

  std::int64_t gt_total = 0;
  std::int64_t matches = 0;
  std::int64_t gt_trajectories = 0;
  int frames = 0;
};

inline constexpr double kMostlyTracked = 0.8;
inline constexpr double kMostlyLost = 0.2;

namespace detail {

template <typename Entry>
std::map<int, std::vector<const Entry*>> group_by_frame(std::span<const Entry> entries,
                                                       std::string_view what) {
  std::map<int, std::vector<const Entry*>> frames;
  std::set<std::pair<int, std::int64_t>> seen;
  for (const Entry& e : entries) {
    if (!seen.emplace(e.frame, e.id).second) {
      throw ValidationError("duplicate (frame " + std::to_string(e.frame) + ", id " +
                            std::to_string(e.id) + ") in " + std::string(what));
    }
    frames[e.frame].push_back(&e);
  }
  for (auto& [f, list] : frames) {
    std::sort(list.begin(), list.end(), [](const Entry* a, const Entry* b) { return a->id < b->id; });
  }
  return frames;
}

}  // namespace detail

/// CLEAR-MOT evaluation. Per frame, correspondences from the previous frame
/// are kept while their IoU stays >= `iou_threshold`; the rest are matched by
/// maximum total IoU among pairs above the threshold. A ground-truth object
/// matched to a different hypothesis than at its last match counts an
/// identity switch.
inline MotReport evaluate(std::span<const GroundTruthEntry> results,
                          std::span<const GroundTruthEntry> ground_truth,
                          double iou_threshold = 0.5) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ValidationError("IoU threshold must lie in (0, 1)");
  }
  const auto hyp_frames = detail::group_by_frame(results, "results");
  const auto gt_frames = detail::group_by_frame(ground_truth, "ground truth");
  std::set<int> frames;
  for (const auto& [f, _] : hyp_frames) frames.insert(f);
  for (const auto& [f, _] : gt_frames) frames.insert(f);

  MotReport r;
  r.frames = static_cast<int>(frames.size());
  std::unordered_map<std::int64_t, std::int64_t> previous;  // gt -> hyp, last frame only
  std::unordered_map<std::int64_t, std::int64_t> last_hyp;  // gt -> hyp, most recent match
  std::map<std::int64_t, std::vector<char>> tracked;        // gt -> per present frame
  double iou_sum = 0.0;
  const std::vector<const GroundTruthEntry*> none;

  for (const int f : frames) {
    const auto git = gt_frames.find(f);
    const auto hit = hyp_frames.find(f);
    const auto& gts = git != gt_frames.end() ? git->second : none;
    const auto& hyps = hit != hyp_frames.end() ? hit->second : none;

    std::vector<int> hyp_of_gt(gts.size(), -1);
    std::vector<char> hyp_used(hyps.size(), 0);
    std::unordered_map<std::int64_t, std::size_t> hyp_index;
    for (std::size_t j = 0; j < hyps.size(); ++j) hyp_index.emplace(hyps[j]->id, j);

    for (std::size_t i = 0; i < gts.size(); ++i) {
      const auto p = previous.find(gts[i]->id);
      if (p == previous.end()) continue;
      const auto h = hyp_index.find(p->second);
      if (h == hyp_index.end() || hyp_used[h->second]) continue;
      if (iou(gts[i]->box, hyps[h->second]->box) >= iou_threshold) {
        hyp_of_gt[i] = static_cast<int>(h->second);
        hyp_used[h->second] = 1;
      }
    }

    std::vector<std::size_t> free_gt, free_hyp;
    for (std::size_t i = 0; i < gts.size(); ++i) {
      if (hyp_of_gt[i] < 0) free_gt.push_back(i);
    }
    for (std::size_t j = 0; j < hyps.size(); ++j) {
      if (!hyp_used[j]) free_hyp.push_back(j);
    }
    if (!free_gt.empty() && !free_hyp.empty()) {
      std::vector<double> weight(free_gt.size() * free_hyp.size());
      std::vector<char> allowed(weight.size());
      for (std::size_t a = 0; a < free_gt.size(); ++a) {
        for (std::size_t b = 0; b < free_hyp.size(); ++b) {
          const double v = iou(gts[free_gt[a]]->box, hyps[free_hyp[b]]->box);
          weight[a * free_hyp.size() + b] = v;
          allowed[a * free_hyp.size() + b] = v >= iou_threshold ? 1 : 0;
        }
      }
      const auto col = max_weight_assignment(free_gt.size(), free_hyp.size(), weight, allowed);
      for (std::size_t a = 0; a < free_gt.size(); ++a) {
        if (col[a] < 0) continue;
        const std::size_t j = free_hyp[static_cast<std::size_t>(col[a])];
        hyp_of_gt[free_gt[a]] = static_cast<int>(j);
        hyp_used[j] = 1;
      }
    }

    previous.clear();
    std::int64_t frame_matches = 0;
    for (std::size_t i = 0; i < gts.size(); ++i) {
      const std::int64_t gid = gts[i]->id;
      auto& flags = tracked[gid];
      if (hyp_of_gt[i] < 0) {
        flags.push_back(0);
        continue;
      }
      flags.push_back(1);
      const GroundTruthEntry& h = *hyps[static_cast<std::size_t>(hyp_of_gt[i])];
      ++frame_matches;
      iou_sum += iou(gts[i]->box, h.box);
      const auto last = last_hyp.find(gid);
      if (last != last_hyp.end() && last->second != h.id) ++r.id_switches;
      last_hyp[gid] = h.id;
      previous[gid] = h.id;
    }
    r.matches += frame_matches;
    r.gt_total += static_cast<std::int64_t>(gts.size());
    r.fn += static_cast<std::int64_t>(gts.size()) - frame_matches;
    r.fp += static_cast<std::int64_t>(hyps.size()) - frame_matches;
  }

  std::int64_t mt = 0, pt = 0, ml = 0;
  for (const auto& [gid, flags] : tracked) {
    const auto hits = std::count(flags.begin(), flags.end(), 1);
    const double ratio = static_cast<double>(hits) / static_cast<double>(flags.size());
    if (ratio >= kMostlyTracked) {
      ++mt;
    } else if (ratio < kMostlyLost) {
      ++ml;
    } else {
      ++pt;
    }
    // Interruptions between the first and the last tracked frame.
    for (std::size_t k = 1; k < flags.size(); ++k) {
      if (flags[k - 1] == 1 && flags[k] == 0 &&
          std::find(flags.begin() + static_cast<std::ptrdiff_t>(k), flags.end(), 1) != flags.end()) {
        ++r.fragmentations;
      }
    }
  }
  r.gt_trajectories = static_cast<std::int64_t>(tracked.size());
  if (r.gt_trajectories > 0) {
    const auto n = static_cast<double>(r.gt_trajectories);
    r.mostly_tracked = static_cast<double>(mt) / n;
    r.partially_tracked = static_cast<double>(pt) / n;
    r.mostly_lost = static_cast<double>(ml) / n;
  }
  const std::int64_t errors = r.fn + r.fp + r.id_switches;
  if (r.gt_total > 0) {
    r.mota = 1.0 - static_cast<double>(errors) / static_cast<double>(r.gt_total);
    r.recall = static_cast<double>(r.matches) / static_cast<double>(r.gt_total);
  } else {
    r.mota = errors == 0 ? 1.0 : -static_cast<double>(errors);
  }
  r.motp = r.matches > 0 ? iou_sum / static_cast<double>(r.matches) : 0.0;
  r.precision = r.matches + r.fp > 0 ? static_cast<double>(r.matches) / static_cast<double>(r.matches + r.fp) : 0.0;
  r.faf = r.frames > 0 ? static_cast<double>(r.fp) / r.frames : 0.0;
  return r;
}

inline MotReport evaluate(const std::vector<MotRow>& results, std::span<const GroundTruthEntry> ground_truth,
                          double iou_threshold = 0.5) {
  const auto hyps = mot_rows_as_entries(results);
  return evaluate(std::span<const GroundTruthEntry>(hyps), ground_truth, iou_threshold);
}

struct PairReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t true_positives = 0;
  std::int64_t false_positives = 0;
  std::int64_t false_negatives = 0;
  std::int64_t true_negatives = 0;
};

/// A pair is predicted to match iff its distance is below `threshold` (the
/// margin). Precision is 0 when nothing is predicted positive; recall is 0
/// when no positives exist.
inline PairReport pair_classification(std::span<const DistanceLabel> pairs, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("classification threshold must be > 0");
  PairReport r;
  for (const auto& [e, y] : pairs) {
    const bool predicted = e < threshold;
    if (predicted && y == 1) ++r.true_positives;
    else if (predicted) ++r.false_positives;
    else if (y == 1) ++r.false_negatives;
    else ++r.true_negatives;
  }
  const auto tp = static_cast<double>(r.true_positives);
  if (r.true_positives + r.false_positives > 0) r.precision = tp / static_cast<double>(r.true_positives + r.false_positives);
  if (r.true_positives + r.false_negatives > 0) r.recall = tp / static_cast<double>(r.true_positives + r.false_negatives);
  if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

/// Distances of a model over labelled pairs, classified at the model margin.
inline PairReport evaluate_pairs(const EmbeddingModel& model, std::span<const PairSample> samples) {
  std::vector<DistanceLabel> dl;
  dl.reserve(samples.size());
  for (const auto& s : samples) dl.push_back({model.pair_distance(s), s.label});
  return pair_classification(dl, model.margin());
}

// ---------------------------------------------------------------------------
// Printing. Column order follows the usual MOT16 leaderboard table:
// MOTA MOTP Hz FAF MT ML FP FN IDs Frag, then Rcll Prcn PT. MOTA, MOTP,
// MT, PT, ML, Rcll and Prcn are percentages.
// ---------------------------------------------------------------------------

inline std::string mot_report_csv_header() {
  return "sequence,mota,motp,hz,faf,mt,ml,fp,fn,ids,frag,rcll,prcn,pt";
}

inline std::string to_csv_row(std::string_view sequence, const MotReport& r, double hz = 0.0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*s,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%lld,%lld,%lld,%lld,%.2f,%.2f,%.2f",
                static_cast<int>(sequence.size()), sequence.data(), 100.0 * r.mota, 100.0 * r.motp, hz,
                r.faf, 100.0 * r.mostly_tracked, 100.0 * r.mostly_lost, static_cast<long long>(r.fp),
                static_cast<long long>(r.fn), static_cast<long long>(r.id_switches),
                static_cast<long long>(r.fragmentations), 100.0 * r.recall, 100.0 * r.precision,
                100.0 * r.partially_tracked);
  return buf;
}

inline std::string format_report_table(std::string_view sequence, const MotReport& r, double hz = 0.0) {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "%-14s %7s %7s %7s %6s %7s %7s %7s %8s %6s %6s %7s %7s %7s\n"
                "%-14.*s %7.2f %7.2f %7.2f %6.2f %6.2f%% %6.2f%% %7lld %8lld %6lld %6lld %7.2f %7.2f %6.2f%%\n",
                "Sequence", "MOTA", "MOTP", "Hz", "FAF", "MT", "ML", "FP", "FN", "IDs", "Frag", "Rcll", "Prcn",
                "PT", static_cast<int>(sequence.size()), sequence.data(), 100.0 * r.mota, 100.0 * r.motp, hz,
                r.faf, 100.0 * r.mostly_tracked, 100.0 * r.mostly_lost, static_cast<long long>(r.fp),
                static_cast<long long>(r.fn), static_cast<long long>(r.id_switches),
                static_cast<long long>(r.fragmentations), 100.0 * r.recall, 100.0 * r.precision,
                100.0 * r.partially_tracked);
  return buf;
}

}  // namespace simtrack
