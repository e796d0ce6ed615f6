#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "simtrack/descriptor.hpp"
#include "simtrack/embedding.hpp"
#include "simtrack/error.hpp"
#include "simtrack/geometry.hpp"
#include "simtrack/io.hpp"
#include "simtrack/rng.hpp"
#include "simtrack/types.hpp"

namespace simtrack {

/// Parameters of a synthetic pedestrian-like scene: boxes drifting at
/// constant velocity and bouncing off the image border.
struct SyntheticSpec {
  int identities = 5;
  int frames = 100;
  double image_width = 1920.0;
  double image_height = 1080.0;
  double min_width = 40.0;
  double max_width = 90.0;
  double min_speed = 1.0;  // pixels per frame
  double max_speed = 6.0;
  double box_noise = 0.0;         // std-dev of detection jitter, pixels
  double descriptor_noise = 0.0;  // std-dev added to oracle descriptors
  double dropout = 0.0;           // probability a true detection is missed
  double spurious_rate = 0.0;     // per identity and frame, chance of a false positive
  int patch_size = 0;             // > 0 renders RGB patches of this side length
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    if (identities < 0 || frames < 0) throw ValidationError("identities and frames must be >= 0");
    if (!(min_width > 0.0) || max_width < min_width) throw ValidationError("bad width range");
    if (max_speed < min_speed || min_speed < 0.0) throw ValidationError("bad speed range");
    if (box_noise < 0.0 || descriptor_noise < 0.0) throw ValidationError("noise must be >= 0");
    if (dropout < 0.0 || dropout > 1.0 || spurious_rate < 0.0 || spurious_rate > 1.0) {
      throw ValidationError("dropout and spurious_rate must lie in [0, 1]");
    }
    if (image_width <= 2.0 * max_width || image_height <= 6.0 * max_width) {
      throw ValidationError("image too small for the box size range");
    }
  }
};

struct SyntheticSequence {
  std::vector<Detection> detections;  // frame-sorted; label = identity or -1
  std::vector<GroundTruthEntry> ground_truth;
  KeyedRows<Descriptor> descriptors;  // oracle descriptors per detection
  KeyedRows<std::int64_t> labels;     // identity per detection (-1 = spurious)
  KeyedRows<Patch> patches;           // only when patch_size > 0
};

/// Flat-colored RGB patch for an identity: shirt color on the upper half,
/// trouser color below, with identity-specific stripes. `noise` perturbs each
/// pixel.
inline Patch render_identity_patch(std::int64_t identity, int size, double noise, Rng& rng) {
  Rng look(substream_seed(static_cast<std::uint64_t>(identity), "identity-look"));
  double upper[3], lower[3];
  for (double& c : upper) c = uniform(look, 0.05, 0.95);
  for (double& c : lower) c = uniform(look, 0.05, 0.95);
  const int period = 2 + static_cast<int>(look() % 5);
  Patch p;
  p.width = size;
  p.height = size;
  p.pixels.resize(static_cast<std::size_t>(size) * size * kChannels);
  for (int y = 0; y < size; ++y) {
    const double* base = y < size / 2 ? upper : lower;
    const double stripe = (y / period) % 2 == 0 ? 0.0 : 0.15;
    for (int x = 0; x < size; ++x) {
      for (std::size_t c = 0; c < kChannels; ++c) {
        double v = base[c] + stripe;
        if (noise > 0.0) v += noise * normal(rng);
        p.pixels[(static_cast<std::size_t>(y) * size + x) * kChannels + c] = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return p;
}

/// Deterministic under `spec.seed` (stream "synth").
inline SyntheticSequence generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng = make_rng(spec.seed, "synth");
  struct Mover {
    double x, y, w, h, vx, vy;
  };
  std::vector<Mover> movers;
  for (int i = 0; i < spec.identities; ++i) {
    Mover m{};
    m.w = uniform(rng, spec.min_width, spec.max_width);
    m.h = m.w * uniform(rng, 2.0, 3.0);
    m.x = uniform(rng, 0.0, spec.image_width - m.w);
    m.y = uniform(rng, 0.0, spec.image_height - m.h);
    const double speed = uniform(rng, spec.min_speed, spec.max_speed);
    const double heading = uniform(rng, 0.0, 6.283185307179586);
    m.vx = speed * std::cos(heading);
    m.vy = speed * std::sin(heading);
    movers.push_back(m);
  }

  SyntheticSequence seq;
  std::int64_t spurious_counter = 0;
  for (int frame = 1; frame <= spec.frames; ++frame) {
    struct Pending {
      BoundingBox box;
      double confidence;
      std::int64_t label;
    };
    std::vector<Pending> pending;
    for (int i = 0; i < spec.identities; ++i) {
      Mover& m = movers[static_cast<std::size_t>(i)];
      if (frame > 1) {
        m.x += m.vx;
        m.y += m.vy;
        if (m.x < 0.0 || m.x + m.w > spec.image_width) {
          m.vx = -m.vx;
          m.x = std::clamp(m.x, 0.0, spec.image_width - m.w);
        }
        if (m.y < 0.0 || m.y + m.h > spec.image_height) {
          m.vy = -m.vy;
          m.y = std::clamp(m.y, 0.0, spec.image_height - m.h);
        }
      }
      const std::int64_t identity = i + 1;
      GroundTruthEntry g;
      g.frame = frame;
      g.id = identity;
      g.box = BoundingBox(m.x, m.y, m.w, m.h);
      g.class_label = "1";
      seq.ground_truth.push_back(g);

      if (spec.dropout > 0.0 && bernoulli(rng, spec.dropout)) continue;
      double x = m.x, y = m.y, w = m.w, h = m.h;
      if (spec.box_noise > 0.0) {
        x += spec.box_noise * normal(rng);
        y += spec.box_noise * normal(rng);
        w = std::max(1.0, w + spec.box_noise * normal(rng));
        h = std::max(1.0, h + spec.box_noise * normal(rng));
      }
      pending.push_back({BoundingBox(x, y, w, h), uniform(rng, 0.5, 1.0), identity});
    }
    for (int i = 0; i < spec.identities; ++i) {
      if (spec.spurious_rate <= 0.0 || !bernoulli(rng, spec.spurious_rate)) continue;
      const double w = uniform(rng, spec.min_width, spec.max_width);
      const double h = w * uniform(rng, 2.0, 3.0);
      pending.push_back({BoundingBox(uniform(rng, 0.0, spec.image_width - w),
                                     uniform(rng, 0.0, spec.image_height - h), w, h),
                         uniform(rng, 0.1, 0.6), -1});
    }
    // Detector output order carries no identity information.
    for (std::size_t i = pending.size(); i > 1; --i) {
      std::swap(pending[i - 1], pending[static_cast<std::size_t>(rng() % i)]);
    }
    int ordinal = 0;
    for (const Pending& p : pending) {
      const DetectionKey key{frame, ordinal};
      seq.detections.push_back(Detection{frame, p.box, p.confidence, ordinal, p.label});
      seq.labels.emplace(key, p.label);
      // Each false positive gets its own throwaway appearance.
      const std::int64_t look_id = p.label >= 0 ? p.label : 1'000'000 + spurious_counter++;
      seq.descriptors.emplace(key, oracle_descriptor(look_id, spec.descriptor_noise, rng));
      if (spec.patch_size > 0) {
        seq.patches.emplace(key, render_identity_patch(look_id, spec.patch_size,
                                                       spec.descriptor_noise, rng));
      }
      ++ordinal;
    }
  }
  return seq;
}

inline std::vector<MotRow> detections_as_rows(const std::vector<Detection>& dets, bool with_labels) {
  std::vector<MotRow> rows;
  rows.reserve(dets.size());
  for (const Detection& d : dets) {
    rows.push_back(MotRow{d.frame, with_labels ? d.label : -1, d.box, d.confidence});
  }
  return rows;
}

enum class DescriptorSource { Oracle, Patches };

/// Training pairs from a labelled sequence: every true detection in frame t
/// paired with every detection in frame t + 1. Same identity is a match;
/// spurious detections never match. The earlier detection is the anchor.
/// Non-matching pairs are subsampled to at most `negatives_per_positive` per
/// matching pair.
inline std::vector<PairSample> make_pair_samples(const SyntheticSequence& seq, DescriptorSource source,
                                                 double negatives_per_positive, Rng& rng) {
  std::vector<std::vector<const Detection*>> by_frame;
  for (const Detection& d : seq.detections) {
    if (static_cast<std::size_t>(d.frame) >= by_frame.size()) by_frame.resize(d.frame + 1);
    by_frame[static_cast<std::size_t>(d.frame)].push_back(&d);
  }
  auto descriptor_of = [&](const Detection& d) -> Descriptor {
    const DetectionKey key{d.frame, d.ordinal};
    if (source == DescriptorSource::Oracle) return seq.descriptors.at(key);
    return describe(seq.patches.at(key));
  };
  std::vector<PairSample> positives, negatives;
  for (std::size_t f = 1; f + 1 < by_frame.size(); ++f) {
    for (const Detection* a : by_frame[f]) {
      if (a->label < 0) continue;
      for (const Detection* b : by_frame[f + 1]) {
        PairSample s{descriptor_of(*a), descriptor_of(*b), geometry_features(a->box, b->box),
                     a->label == b->label ? 1 : 0};
        (s.label == 1 ? positives : negatives).push_back(std::move(s));
      }
    }
  }
  const auto keep = static_cast<std::size_t>(negatives_per_positive * static_cast<double>(positives.size()));
  for (std::size_t i = negatives.size(); i > 1; --i) {
    std::swap(negatives[i - 1], negatives[static_cast<std::size_t>(rng() % i)]);
  }
  if (negatives.size() > keep) negatives.resize(keep);
  std::vector<PairSample> out = std::move(positives);
  out.insert(out.end(), std::make_move_iterator(negatives.begin()),
             std::make_move_iterator(negatives.end()));
  return out;
}

/// Look-alike pairs: two identities with an identical prototype descriptor
/// but far-apart boxes (IoU 0), labelled non-matching, mixed with genuine
/// matches (high IoU, same identity) and ordinary non-matches between
/// different-looking identities. Descriptors get `noise` per sample.
inline std::vector<PairSample> make_confuser_set(std::size_t count, double noise, Rng& rng) {
  std::vector<PairSample> out;
  out.reserve(count);
  auto box_near = [&](const BoundingBox& b, double shift) {
    return BoundingBox(b.left() + shift * uniform(rng, -1.0, 1.0),
                       b.top() + shift * uniform(rng, -1.0, 1.0), b.width() * uniform(rng, 0.95, 1.05),
                       b.height() * uniform(rng, 0.95, 1.05));
  };
  for (std::size_t i = 0; i < count; ++i) {
    const auto identity = static_cast<std::int64_t>(rng() % 40) + 1;
    const double w = uniform(rng, 40.0, 90.0);
    const BoundingBox a(uniform(rng, 0.0, 800.0), uniform(rng, 0.0, 400.0), w, w * uniform(rng, 2.0, 3.0));
    PairSample s;
    s.a = oracle_descriptor(identity, noise, rng);
    switch (i % 3) {
      case 0: {  // genuine match, next-frame box
        const BoundingBox b = box_near(a, 4.0);
        s.b = oracle_descriptor(identity, noise, rng);
        s.geometry = geometry_features(a, b);
        s.label = 1;
        break;
      }
      case 1: {  // look-alike far away
        const BoundingBox b = a.translated(1000.0 + uniform(rng, 0.0, 300.0), uniform(rng, 0.0, 200.0));
        s.b = oracle_descriptor(identity, noise, rng);
        s.geometry = geometry_features(a, b);
        s.label = 0;
        break;
      }
      default: {  // different identity, arbitrary placement
        const std::int64_t other = identity + 1 + static_cast<std::int64_t>(rng() % 39);
        const BoundingBox b = bernoulli(rng, 0.5) ? box_near(a, 30.0)
                                                  : a.translated(uniform(rng, 200.0, 900.0), 0.0);
        s.b = oracle_descriptor(other, noise, rng);
        s.geometry = geometry_features(a, b);
        s.label = 0;
        break;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace simtrack
