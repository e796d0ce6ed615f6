#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "simtrack/embedding.hpp"
#include "simtrack/error.hpp"
#include "simtrack/geometry.hpp"
#include "simtrack/parallel.hpp"
#include "simtrack/types.hpp"

namespace simtrack {

enum class NetKind { BaseNet, EnhancedNet };

inline std::string_view to_string(NetKind kind) {
  return kind == NetKind::BaseNet ? "base" : "esnn";
}

struct ScoreParams {
  double alpha = 0.8;
  double gamma = 1e-5;
  double delta = 0.2;
  NetKind net = NetKind::BaseNet;

  void validate() const {
    if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0, 1)");
    if (!(delta >= 0.0 && delta < 1.0)) throw ValidationError("delta must lie in [0, 1)");
  }
};

/// alpha * log_0.1(max(gamma, d)), evaluated as -alpha * log10(...).
/// Distances above 1 give negative scores; only the lower clamp exists.
inline double s_dist(double d_siam, const ScoreParams& p) {
  return -p.alpha * std::log10(std::max(p.gamma, d_siam));
}

/// 1 + IoU, in [1, 2].
inline double s_iou(const BoundingBox& a, const BoundingBox& b) { return 1.0 + iou(a, b); }

/// exp(area_ratio - delta).
inline double s_arat(const BoundingBox& a, const BoundingBox& b, const ScoreParams& p) {
  return std::exp(area_ratio(a, b) - p.delta);
}

/// Appearance score plus the product of the two geometric scores.
inline double s_new(const BoundingBox& a, const BoundingBox& b, double d_siam,
                    const ScoreParams& p) {
  return s_dist(d_siam, p) + s_iou(a, b) * s_arat(a, b, p);
}

/// The base network needs explicit geometry in its score; the enhanced
/// network already folds geometry into its embedding, so distance alone is
/// used there.
inline double score_pair(const BoundingBox& track_box, const BoundingBox& det_box, double d_siam,
                         const ScoreParams& p) {
  return p.net == NetKind::BaseNet ? s_new(track_box, det_box, d_siam, p) : s_dist(d_siam, p);
}

struct ScoredPair {
  TrackId track_id = 0;
  int detection_index = 0;
  double score = 0.0;
  int frame_gap = 1;

  friend bool operator==(const ScoredPair&, const ScoredPair&) = default;
};

/// Candidate pairs between live tracks and the current frame's detections,
/// ordered by (track_id, detection_index).
struct ScoreMatrix {
  std::vector<ScoredPair> pairs;
  int num_detections = 0;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

/// Descending score, then lower frame gap, lower track id, lower detection.
inline bool score_order(const ScoredPair& a, const ScoredPair& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.frame_gap != b.frame_gap) return a.frame_gap < b.frame_gap;
  if (a.track_id != b.track_id) return a.track_id < b.track_id;
  return a.detection_index < b.detection_index;
}

inline bool is_active(const TrackState& track, int frame, int look_back) {
  const int gap = frame - track.last_frame;
  return gap >= 1 && gap <= look_back;
}

struct ScoreContext {
  const EmbeddingModel* model = nullptr;
  ScoreParams params;
  int frame = 1;
  int look_back = 1;
  unsigned threads = 1;
};

/// Scores every (active track, detection) pair against the track's most
/// recent observation. `descriptors[j]` belongs to `detections[j]`.
inline ScoreMatrix build_score_matrix(std::span<const TrackState> tracks,
                                      std::span<const Detection> detections,
                                      std::span<const Descriptor> descriptors,
                                      const ScoreContext& ctx) {
  if (ctx.look_back < 1) throw ValidationError("look-back window f_n must be >= 1");
  if (descriptors.size() != detections.size()) {
    throw ValidationError("one descriptor per detection required");
  }
  ScoreMatrix matrix;
  matrix.num_detections = static_cast<int>(detections.size());
  std::vector<const TrackState*> active;
  for (const auto& t : tracks) {
    if (is_active(t, ctx.frame, ctx.look_back)) active.push_back(&t);
  }
  std::sort(active.begin(), active.end(),
            [](const TrackState* a, const TrackState* b) { return a->id < b->id; });
  if (active.empty() || detections.empty()) return matrix;
  if (ctx.model == nullptr) throw ConfigError("score matrix needs an embedding model");
  const EmbeddingModel& model = *ctx.model;
  const bool enhanced = model.head() == HeadKind::Enhanced;
  if (enhanced != (ctx.params.net == NetKind::EnhancedNet)) {
    throw ConfigError("net kind does not match the embedding model's head");
  }

  // One trunk pass per detection; the enhanced head adds pair geometry later.
  std::vector<EmbeddingModel::Vector> hidden(detections.size());
  std::vector<EmbeddingVector> det_embedding(detections.size());
  parallel_for(detections.size(), ctx.threads, [&](std::size_t j) {
    hidden[j] = model.hidden_features(descriptors[j]);
    if (!enhanced) det_embedding[j] = model.embed_hidden(hidden[j], std::nullopt);
  });

  const std::size_t n_det = detections.size();
  matrix.pairs.resize(active.size() * n_det);
  parallel_for(active.size(), ctx.threads, [&](std::size_t i) {
    const TrackState& t = *active[i];
    for (std::size_t j = 0; j < n_det; ++j) {
      const BoundingBox& box = detections[j].box;
      double d;
      if (enhanced) {
        d = euclidean_distance(t.last_embedding,
                               model.embed_hidden(hidden[j], geometry_features(t.last_box, box)));
      } else {
        d = euclidean_distance(t.last_embedding, det_embedding[j]);
      }
      matrix.pairs[i * n_det + j] = ScoredPair{t.id, static_cast<int>(j),
                                               score_pair(t.last_box, box, d, ctx.params),
                                               ctx.frame - t.last_frame};
    }
  });
  return matrix;
}

}  // namespace simtrack
