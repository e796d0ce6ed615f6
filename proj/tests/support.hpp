#pragma once

// Hand-rolled generators and independent oracles shared by the unit tests
// and the acceptance runner.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "simtrack/embedding.hpp"
#include "simtrack/geometry.hpp"
#include "simtrack/io.hpp"
#include "simtrack/matcher.hpp"
#include "simtrack/rng.hpp"
#include "simtrack/scoring.hpp"

namespace simtrack::testing {

inline BoundingBox random_box(Rng& rng, double extent = 100.0) {
  return BoundingBox(uniform(rng, -extent, extent), uniform(rng, -extent, extent),
                     uniform(rng, 0.5, extent), uniform(rng, 0.5, extent));
}

/// Box strictly inside `outer`.
inline BoundingBox random_inner_box(Rng& rng, const BoundingBox& outer) {
  const double w = outer.width() * uniform(rng, 0.05, 1.0);
  const double h = outer.height() * uniform(rng, 0.05, 1.0);
  return BoundingBox(outer.left() + uniform(rng, 0.0, outer.width() - w),
                     outer.top() + uniform(rng, 0.0, outer.height() - h), w, h);
}

/// Rectangle overlap computed from scratch by clipping corner intervals.
inline double oracle_iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(0.0, std::min(a.left() + a.width(), b.left() + b.width()) -
                                      std::max(a.left(), b.left()));
  const double iy = std::max(0.0, std::min(a.top() + a.height(), b.top() + b.height()) -
                                      std::max(a.top(), b.top()));
  const double inter = ix * iy;
  return inter / (a.width() * a.height() + b.width() * b.height() - inter);
}

/// Scores drawn from a small set so ties appear.
inline double random_score(Rng& rng, bool with_ties) {
  if (with_ties) return static_cast<double>(static_cast<int>(uniform(rng, 0.0, 6.0)));
  return uniform(rng, -2.0, 8.0);
}

struct RandomMatrix {
  ScoreMatrix matrix;
  std::vector<TrackId> tracks;
};

/// Up to `max_side` tracks and detections; each pair present with
/// probability `density`.
inline RandomMatrix random_matrix(Rng& rng, int max_side, double density = 1.0, bool ties = false) {
  RandomMatrix r;
  const int n_tracks = static_cast<int>(rng() % static_cast<std::uint64_t>(max_side + 1));
  const int n_dets = static_cast<int>(rng() % static_cast<std::uint64_t>(max_side + 1));
  r.matrix.num_detections = n_dets;
  TrackId id = 1;
  for (int t = 0; t < n_tracks; ++t) {
    id += 1 + static_cast<TrackId>(rng() % 3);
    r.tracks.push_back(id);
    for (int d = 0; d < n_dets; ++d) {
      if (uniform01(rng) < density) r.matrix.pairs.push_back({id, d, random_score(rng, ties), 1});
    }
  }
  return r;
}

/// Brute force over every matching: best total among matchings of maximum
/// cardinality. Returns {cardinality, total}.
inline std::pair<int, double> brute_force_best(const ScoreMatrix& m, std::span<const TrackId> tracks) {
  const int n_det = m.num_detections;
  std::vector<std::vector<double>> w(tracks.size(),
                                     std::vector<double>(static_cast<std::size_t>(n_det),
                                                         std::numeric_limits<double>::quiet_NaN()));
  for (const auto& p : m.pairs) {
    const auto row = std::find(tracks.begin(), tracks.end(), p.track_id) - tracks.begin();
    w[static_cast<std::size_t>(row)][static_cast<std::size_t>(p.detection_index)] = p.score;
  }
  std::pair<int, double> best{0, 0.0};
  std::vector<char> used(static_cast<std::size_t>(n_det), 0);
  std::function<void(std::size_t, int, double)> go = [&](std::size_t row, int count, double total) {
    if (row == tracks.size()) {
      if (count > best.first || (count == best.first && total > best.second)) best = {count, total};
      return;
    }
    go(row + 1, count, total);
    for (int d = 0; d < n_det; ++d) {
      const double v = w[row][static_cast<std::size_t>(d)];
      if (used[static_cast<std::size_t>(d)] || std::isnan(v)) continue;
      used[static_cast<std::size_t>(d)] = 1;
      go(row + 1, count + 1, total + v);
      used[static_cast<std::size_t>(d)] = 0;
    }
  };
  go(0, 0, 0.0);
  return best;
}

/// Minimum-cost perfect assignment by dynamic programming over column
/// subsets; independent of the Munkres code.
inline double subset_dp_min_cost(std::span<const double> cost, std::size_t n) {
  const std::size_t full = std::size_t{1} << n;
  std::vector<double> dp(full, std::numeric_limits<double>::infinity());
  dp[0] = 0.0;
  for (std::size_t mask = 0; mask < full; ++mask) {
    if (!std::isfinite(dp[mask])) continue;
    const auto row = static_cast<std::size_t>(std::popcount(mask));
    if (row == n) continue;
    for (std::size_t c = 0; c < n; ++c) {
      if (mask & (std::size_t{1} << c)) continue;
      const std::size_t next = mask | (std::size_t{1} << c);
      dp[next] = std::min(dp[next], dp[mask] + cost[row * n + c]);
    }
  }
  return dp[full - 1];
}

/// Central finite-difference gradient of the batch loss in parameter order.
inline std::vector<double> numeric_gradient(const EmbeddingModel& model, std::span<const PairSample> batch,
                                            double margin, double h = 1e-5) {
  EmbeddingModel probe = model;
  std::vector<double> theta = model.parameters();
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    probe.set_parameters(theta);
    const double up = contrastive_loss_and_gradient(probe, batch, margin).loss;
    theta[i] = saved - h;
    probe.set_parameters(theta);
    const double down = contrastive_loss_and_gradient(probe, batch, margin).loss;
    theta[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

/// Largest |a - b| / max(|a|, |b|, floor) over all entries.
inline double max_relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

inline Descriptor random_descriptor(Rng& rng, std::size_t dim = kDescriptorDim) {
  Descriptor d;
  d.values.resize(dim);
  for (auto& v : d.values) v = uniform(rng, 0.0, 1.0);
  return d;
}

/// Random labelled pairs with random geometry.
inline std::vector<PairSample> random_batch(Rng& rng, std::size_t size) {
  std::vector<PairSample> batch;
  for (std::size_t i = 0; i < size; ++i) {
    PairSample s;
    s.a = random_descriptor(rng);
    s.b = random_descriptor(rng);
    s.geometry = {uniform(rng, 0.0, 1.0), uniform(rng, 0.05, 1.0)};
    s.label = bernoulli(rng, 0.5) ? 1 : 0;
    batch.push_back(std::move(s));
  }
  return batch;
}

/// Valid MOT result rows with values exactly representable at 2 decimals.
inline std::vector<MotRow> random_mot_rows(Rng& rng, std::size_t count) {
  auto cents = [&](int lo, int hi) {
    return static_cast<double>(lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1))) / 100.0;
  };
  std::vector<MotRow> rows;
  int frame = 1;
  for (std::size_t i = 0; i < count; ++i) {
    if (bernoulli(rng, 0.3)) frame += 1 + static_cast<int>(rng() % 3);
    MotRow r;
    r.frame = frame;
    r.id = static_cast<std::int64_t>(rng() % 1000) + 1;
    r.box = BoundingBox(cents(-50000, 200000), cents(-50000, 100000), cents(1, 50000), cents(1, 80000));
    r.confidence = cents(0, 100);
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<MotRow> roundtrip_mot(const std::vector<MotRow>& rows) {
  std::stringstream ss;
  write_mot(ss, rows);
  return parse_mot(ss).entries;
}

/// Three-frame CLEAR-MOT fixture with one identity swap.
///
///   frame  gt1        gt2          hypotheses           outcome
///   1      h10 (1.0)  h20 (1.0)    h10 h20              TP TP
///   2      h10 (1.0)  none         h10, h30 far away    TP FN FP
///   3      h10 (1.0)  h30 (0.82)   h10 h30              TP TP, gt2 switch h20 -> h30
///
///   GT 6, TP 5, FN 1, FP 1, IDs 1, Frag 1 (gt2 tracked, lost, tracked)
///   MOTA 1 - 3/6 = 0.5, MT 1 (gt1 3/3), PT 1 (gt2 2/3), ML 0, FAF 1/3
///   MOTP (4 * 1.0 + iou3) / 5 with iou3 = 90/110 from a 1-pixel shift on a
///   10x10 box.
struct ClearMotFixture {
  std::vector<GroundTruthEntry> ground_truth;
  std::vector<MotRow> results;
};

inline ClearMotFixture clear_mot_fixture() {
  const BoundingBox g1(0, 0, 10, 10);
  const BoundingBox g2(100, 0, 10, 10);
  ClearMotFixture f;
  for (int frame = 1; frame <= 3; ++frame) {
    f.ground_truth.push_back({frame, 1, g1});
    f.ground_truth.push_back({frame, 2, g2});
  }
  f.results = {
      {1, 10, g1, 1.0}, {1, 20, g2, 1.0},
      {2, 10, g1, 1.0}, {2, 30, BoundingBox(500, 500, 10, 10), 1.0},
      {3, 10, g1, 1.0}, {3, 30, g2.translated(1, 0), 1.0},
  };
  return f;
}

}  // namespace simtrack::testing
