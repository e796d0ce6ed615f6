#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "simtrack/embedding.hpp"
#include "simtrack/error.hpp"
#include "simtrack/io.hpp"
#include "simtrack/matcher.hpp"
#include "simtrack/parallel.hpp"
#include "simtrack/scoring.hpp"
#include "simtrack/types.hpp"

namespace simtrack {

/// Maps a detection to its appearance descriptor.
using DescriptorProvider = std::function<Descriptor(const Detection&)>;

enum class ProviderKind { Handcrafted, Oracle, File };

/// Oracle provider: prototype of the detection's ground-truth identity.
/// Unlabelled detections get a per-(frame, ordinal) throwaway appearance.
inline DescriptorProvider oracle_provider() {
  return [](const Detection& d) {
    if (d.label >= 0) return oracle_descriptor(d.label);
    return oracle_descriptor(2'000'000'000LL + static_cast<std::int64_t>(d.frame) * 10'000 + d.ordinal);
  };
}

/// Looks descriptors up by (frame, ordinal).
inline DescriptorProvider table_provider(KeyedRows<Descriptor> table) {
  return [table = std::move(table)](const Detection& d) {
    const auto it = table.find({d.frame, d.ordinal});
    if (it == table.end()) {
      throw ValidationError("no descriptor for frame " + std::to_string(d.frame) + ", detection " +
                            std::to_string(d.ordinal));
    }
    return it->second;
  };
}

/// Describes patches looked up by (frame, ordinal).
inline DescriptorProvider patch_provider(KeyedRows<Patch> patches) {
  return [patches = std::move(patches)](const Detection& d) {
    const auto it = patches.find({d.frame, d.ordinal});
    if (it == patches.end()) {
      throw ValidationError("no patch for frame " + std::to_string(d.frame) + ", detection " +
                            std::to_string(d.ordinal));
    }
    return describe(it->second);
  };
}

struct TrackerConfig {
  ScoreParams score;
  MatcherConfig matcher;  // matcher.look_back is f_n
  double min_confidence = 0.0;
  unsigned threads = 1;

  void validate() const {
    score.validate();
    matcher.validate();
  }
};

struct FrameOutput {
  int frame = 0;
  Assignment assignment;       // detection indices refer to the kept detections
  std::vector<MotRow> rows;    // one per kept detection, ordered by detection
  std::vector<std::string> warnings;
};

/// Online tracker: each step sees only the current frame and the state built
/// from earlier frames.
class Tracker {
 public:
  Tracker(TrackerConfig config, EmbeddingModel model, DescriptorProvider provider)
      : config_(std::move(config)), model_(std::move(model)), provider_(std::move(provider)) {
    config_.validate();
    const bool enhanced = model_.head() == HeadKind::Enhanced;
    if (enhanced != (config_.score.net == NetKind::EnhancedNet)) {
      throw ConfigError(std::string("net kind '") + std::string(to_string(config_.score.net)) +
                        "' does not match the model head '" + std::string(to_string(model_.head())) + "'");
    }
    if (!provider_) throw ConfigError("tracker needs a descriptor provider");
  }

  FrameOutput step(int frame, std::span<const Detection> detections) {
    if (frame <= last_frame_) {
      throw SequencingError("frame " + std::to_string(frame) + " does not follow frame " +
                            std::to_string(last_frame_));
    }
    last_frame_ = frame;
    const int look_back = config_.matcher.look_back;
    std::erase_if(tracks_, [&](const TrackState& t) { return frame - t.last_frame > look_back; });

    FrameOutput out;
    out.frame = frame;
    std::vector<Detection> kept;
    kept.reserve(detections.size());
    for (const Detection& d : detections) {
      if (d.frame != frame) {
        throw SequencingError("detection of frame " + std::to_string(d.frame) +
                              " passed to step for frame " + std::to_string(frame));
      }
      if (d.confidence < config_.min_confidence) continue;
      kept.push_back(d);
    }

    std::vector<Descriptor> descriptors(kept.size());
    std::vector<EmbeddingVector> anchors(kept.size());
    parallel_for(kept.size(), config_.threads, [&](std::size_t j) {
      descriptors[j] = provider_(kept[j]);
      anchors[j] = model_.embed_anchor(descriptors[j]);
    });

    ScoreContext ctx{&model_, config_.score, frame, look_back, config_.threads};
    const ScoreMatrix matrix = build_score_matrix(tracks_, kept, descriptors, ctx);
    std::vector<TrackId> active;
    active.reserve(tracks_.size());
    for (const auto& t : tracks_) active.push_back(t.id);
    out.assignment = match(matrix, active, next_id_, config_.matcher);

    std::unordered_map<TrackId, std::size_t> slot;
    for (std::size_t i = 0; i < tracks_.size(); ++i) slot.emplace(tracks_[i].id, i);
    std::vector<TrackId> owner(kept.size(), -1);
    for (const auto& [id, det] : out.assignment.pairs) {
      TrackState& t = tracks_[slot.at(id)];
      const auto j = static_cast<std::size_t>(det);
      t.last_box = kept[j].box;
      t.last_frame = frame;
      t.last_descriptor = descriptors[j];
      t.last_embedding = anchors[j];
      t.history.emplace_back(frame, det);
      owner[j] = id;
    }
    for (const auto& [det, id] : out.assignment.new_tracks) {
      const auto j = static_cast<std::size_t>(det);
      TrackState t;
      t.id = id;
      t.last_box = kept[j].box;
      t.last_frame = frame;
      t.last_descriptor = descriptors[j];
      t.last_embedding = anchors[j];
      t.history.emplace_back(frame, det);
      tracks_.push_back(std::move(t));
      owner[j] = id;
    }
    out.rows.reserve(kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) {
      out.rows.push_back(MotRow{frame, owner[j], kept[j].box, kept[j].confidence});
    }
    return out;
  }

  const std::vector<TrackState>& tracks() const { return tracks_; }
  TrackId tracks_created() const { return next_id_ - 1; }
  const TrackerConfig& config() const { return config_; }
  const EmbeddingModel& model() const { return model_; }

 private:
  TrackerConfig config_;
  EmbeddingModel model_;
  DescriptorProvider provider_;
  std::vector<TrackState> tracks_;
  TrackId next_id_ = 1;
  int last_frame_ = 0;
};

struct SequenceResult {
  std::vector<MotRow> rows;
  int frames = 0;
  TrackId tracks_created = 0;
  double seconds = 0.0;
  double hz = 0.0;  // frames per wall-clock second
};

/// Runs the tracker over a frame-sorted detection stream, stepping every frame
/// from 1 to the last detection frame (frames without detections still age
/// tracks).
inline SequenceResult run_sequence(const TrackerConfig& config, const EmbeddingModel& model,
                                   DescriptorProvider provider, std::span<const Detection> stream,
                                   const std::function<void(int)>& on_frame = {}) {
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (stream[i].frame < stream[i - 1].frame) {
      throw SequencingError("detection stream not sorted: frame " + std::to_string(stream[i].frame) +
                            " follows frame " + std::to_string(stream[i - 1].frame));
    }
  }
  SequenceResult result;
  Tracker tracker(config, model, std::move(provider));
  const auto start = std::chrono::steady_clock::now();
  const int last = stream.empty() ? 0 : stream.back().frame;
  std::size_t pos = 0;
  for (int frame = 1; frame <= last; ++frame) {
    std::size_t end = pos;
    while (end < stream.size() && stream[end].frame == frame) ++end;
    FrameOutput out = tracker.step(frame, stream.subspan(pos, end - pos));
    result.rows.insert(result.rows.end(), out.rows.begin(), out.rows.end());
    pos = end;
    if (on_frame) on_frame(frame);
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  result.frames = last;
  result.tracks_created = tracker.tracks_created();
  result.seconds = elapsed.count();
  result.hz = result.seconds > 0.0 ? result.frames / result.seconds : 0.0;
  return result;
}

}  // namespace simtrack
