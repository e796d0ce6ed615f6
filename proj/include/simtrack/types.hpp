#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "simtrack/descriptor.hpp"
#include "simtrack/embedding.hpp"
#include "simtrack/geometry.hpp"

namespace simtrack {

using TrackId = std::int64_t;

/// One detector output.
struct Detection {
  int frame = 1;
  BoundingBox box{0, 0, 1, 1};
  double confidence = 1.0;
  /// Position of the row among its frame's rows in the source file; keys
  /// precomputed descriptor and patch rows.
  int ordinal = 0;
  /// Ground-truth identity when known (synthetic data), -1 otherwise. Only the
  /// oracle descriptor provider reads it.
  std::int64_t label = -1;
};

/// A live identity as seen by the matcher.
struct TrackState {
  TrackId id = 0;
  BoundingBox last_box{0, 0, 1, 1};
  int last_frame = 0;
  Descriptor last_descriptor;
  /// Anchor-side embedding of `last_descriptor`.
  EmbeddingVector last_embedding;
  std::vector<std::pair<int, int>> history;  // (frame, detection index)
};

}  // namespace simtrack
