#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "simtrack/assignment.hpp"
#include "simtrack/error.hpp"
#include "simtrack/scoring.hpp"
#include "simtrack/types.hpp"

namespace simtrack {

enum class MatchAlgorithm { Greedy, Hungarian };

inline std::string_view to_string(MatchAlgorithm a) {
  return a == MatchAlgorithm::Greedy ? "greedy" : "hungarian";
}

struct MatcherConfig {
  int look_back = 1;  // f_n
  MatchAlgorithm algorithm = MatchAlgorithm::Greedy;
  /// Pairs scoring below this never match. Disabled by default.
  double min_score = -std::numeric_limits<double>::infinity();

  void validate() const {
    if (look_back < 1) throw ValidationError("look-back window f_n must be >= 1");
  }
};

/// Result of one frame's association.
struct Assignment {
  std::vector<std::pair<TrackId, int>> pairs;      // (track, detection index)
  std::vector<std::pair<int, TrackId>> new_tracks;  // (detection index, fresh id)

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Every detection in exactly one of pairs / new_tracks, every track at most
/// once. Returns an empty string when the invariants hold, else a reason.
inline std::string check_assignment(const Assignment& a, int num_detections) {
  std::vector<int> seen(static_cast<std::size_t>(num_detections), 0);
  std::unordered_map<TrackId, int> track_uses;
  auto mark = [&](int det) -> bool {
    if (det < 0 || det >= num_detections) return false;
    return ++seen[static_cast<std::size_t>(det)] == 1;
  };
  for (const auto& [track, det] : a.pairs) {
    if (!mark(det)) return "detection " + std::to_string(det) + " used twice or out of range";
    if (++track_uses[track] > 1) return "track " + std::to_string(track) + " matched twice";
  }
  for (const auto& [det, id] : a.new_tracks) {
    if (!mark(det)) return "detection " + std::to_string(det) + " used twice or out of range";
    if (track_uses.count(id)) return "fresh id " + std::to_string(id) + " collides with a match";
  }
  for (int d = 0; d < num_detections; ++d) {
    if (seen[static_cast<std::size_t>(d)] != 1) return "detection " + std::to_string(d) + " unassigned";
  }
  return {};
}

namespace detail {

/// Maps active track ids to dense row indices and validates the matrix.
struct MatrixIndex {
  std::vector<TrackId> tracks;  // sorted ascending
  std::unordered_map<TrackId, std::size_t> row_of;
  std::vector<std::size_t> row;  // per pair

  MatrixIndex(const ScoreMatrix& m, std::span<const TrackId> active) {
    tracks.assign(active.begin(), active.end());
    std::sort(tracks.begin(), tracks.end());
    tracks.erase(std::unique(tracks.begin(), tracks.end()), tracks.end());
    for (std::size_t i = 0; i < tracks.size(); ++i) row_of.emplace(tracks[i], i);
    row.reserve(m.pairs.size());
    TrackId last_id = 0;
    std::size_t last_row = 0;
    std::vector<char> seen(tracks.size() * static_cast<std::size_t>(std::max(m.num_detections, 0)), 0);
    for (const ScoredPair& p : m.pairs) {
      if (p.track_id != last_id || row.empty()) {
        const auto it = row_of.find(p.track_id);
        if (it == row_of.end()) {
          throw ValidationError("score matrix references unknown track " + std::to_string(p.track_id));
        }
        last_id = p.track_id;
        last_row = it->second;
      }
      if (p.detection_index < 0 || p.detection_index >= m.num_detections) {
        throw ValidationError("score matrix references detection " +
                              std::to_string(p.detection_index) + " outside [0, " +
                              std::to_string(m.num_detections) + ")");
      }
      char& s = seen[last_row * static_cast<std::size_t>(m.num_detections) +
                     static_cast<std::size_t>(p.detection_index)];
      if (s) {
        throw ValidationError("duplicate pair (track " + std::to_string(p.track_id) +
                              ", detection " + std::to_string(p.detection_index) + ")");
      }
      s = 1;
      row.push_back(last_row);
    }
  }
};

inline bool admissible(const ScoredPair& p, const MatcherConfig& cfg) {
  return p.frame_gap >= 1 && p.frame_gap <= cfg.look_back && p.score >= cfg.min_score;
}

/// Unsigned key whose ascending order is the descending order of `score`.
inline std::uint64_t descending_key(double score) {
  if (score == 0.0) score = 0.0;  // -0 ties with +0
  const auto bits = std::bit_cast<std::uint64_t>(score);
  const std::uint64_t ascending = (bits >> 63) ? ~bits : bits | (std::uint64_t{1} << 63);
  return ~ascending;
}

/// Indices of the admissible pairs in score_order. Runs in time linear in the
/// pair count: a counting sort by frame gap over the (track, detection)
/// order, then a stable byte-wise LSD radix sort on the score.
inline std::vector<std::uint32_t> admissible_order(const ScoreMatrix& m, const MatcherConfig& cfg) {
  struct Item {
    std::uint64_t key;
    std::uint32_t pair;
  };
  std::vector<Item> items;
  items.reserve(m.pairs.size());
  for (std::size_t k = 0; k < m.pairs.size(); ++k) {
    if (admissible(m.pairs[k], cfg)) items.push_back({descending_key(m.pairs[k].score), static_cast<std::uint32_t>(k)});
  }
  const auto by_track_det = [&](const Item& a, const Item& b) {
    const ScoredPair& x = m.pairs[a.pair];
    const ScoredPair& y = m.pairs[b.pair];
    return std::pair(x.track_id, x.detection_index) < std::pair(y.track_id, y.detection_index);
  };
  if (!std::is_sorted(items.begin(), items.end(), by_track_det)) {
    std::sort(items.begin(), items.end(), by_track_det);
  }

  std::vector<Item> buffer(items.size());
  if (cfg.look_back > 1) {
    std::vector<std::size_t> start(static_cast<std::size_t>(cfg.look_back) + 1, 0);
    for (const Item& it : items) ++start[static_cast<std::size_t>(m.pairs[it.pair].frame_gap)];
    std::size_t sum = 0;
    for (auto& c : start) sum += std::exchange(c, sum);
    for (const Item& it : items) buffer[start[static_cast<std::size_t>(m.pairs[it.pair].frame_gap)]++] = it;
    items.swap(buffer);
  }

  if (items.size() < 64) {
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.key < b.key; });
  } else {
    for (int shift = 0; shift < 64; shift += 8) {
      std::array<std::size_t, 257> start{};
      for (const Item& it : items) ++start[((it.key >> shift) & 0xff) + 1];
      if (std::any_of(start.begin() + 1, start.end(), [&](std::size_t c) { return c == items.size(); })) continue;
      for (std::size_t b = 1; b < start.size(); ++b) start[b] += start[b - 1];
      for (const Item& it : items) buffer[start[(it.key >> shift) & 0xff]++] = it;
      items.swap(buffer);
    }
  }

  std::vector<std::uint32_t> order(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) order[i] = items[i].pair;
  return order;
}

inline void assign_fresh_ids(Assignment& a, const std::vector<char>& det_taken, TrackId& next_id) {
  for (std::size_t d = 0; d < det_taken.size(); ++d) {
    if (!det_taken[d]) a.new_tracks.emplace_back(static_cast<int>(d), next_id++);
  }
}

}  // namespace detail

/// Greedy score-sorted association.
///
/// Pairs are visited by descending score (ties: lower frame gap, track id,
/// detection index). Pairs outside the look-back window or below the
/// min-score gate are skipped, as are pairs whose detection is taken. A free
/// track takes the detection. A track that is already matched to d' may
/// switch once: if this pair outscores (track, d'), the track moves to the
/// new detection and d' is re-homed to its best-scoring free track (or left
/// over). Leftover detections get fresh ids from `next_id`, ascending by
/// detection index.
inline Assignment match_greedy(const ScoreMatrix& matrix, std::span<const TrackId> active,
                               TrackId& next_id, const MatcherConfig& cfg = {}) {
  const detail::MatrixIndex index(matrix, active);
  const std::size_t n_det = static_cast<std::size_t>(matrix.num_detections);
  const std::size_t n_pairs = matrix.pairs.size();

  const std::vector<std::uint32_t> order = detail::admissible_order(matrix, cfg);

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> pair_of_track(index.tracks.size(), kNone);  // current pair index
  std::vector<std::size_t> pair_of_det(n_det, kNone);
  std::vector<std::vector<std::size_t>> pairs_by_det;  // built on first switch

  auto link = [&](std::size_t k) {
    pair_of_track[index.row[k]] = k;
    pair_of_det[static_cast<std::size_t>(matrix.pairs[k].detection_index)] = k;
  };

  for (const std::size_t k : order) {
    const ScoredPair& p = matrix.pairs[k];
    const auto det = static_cast<std::size_t>(p.detection_index);
    if (pair_of_det[det] != kNone) continue;
    const std::size_t row = index.row[k];
    const std::size_t current = pair_of_track[row];
    if (current == kNone) {
      link(k);
      continue;
    }
    // Conflict: the track already holds another detection. Its current pair
    // came earlier in the descending scan, so on a single sorted pass this
    // comparison does not succeed; it is kept as the algorithm states it.
    if (!(p.score > matrix.pairs[current].score)) continue;
    const auto displaced = static_cast<std::size_t>(matrix.pairs[current].detection_index);
    pair_of_det[displaced] = kNone;
    link(k);
    if (pairs_by_det.empty()) {
      pairs_by_det.resize(n_det);
      for (std::size_t q = 0; q < n_pairs; ++q) {
        pairs_by_det[static_cast<std::size_t>(matrix.pairs[q].detection_index)].push_back(q);
      }
    }
    std::size_t best = kNone;
    for (const std::size_t q : pairs_by_det[displaced]) {
      const ScoredPair& cand = matrix.pairs[q];
      if (!detail::admissible(cand, cfg) || pair_of_track[index.row[q]] != kNone) continue;
      if (best == kNone || score_order(cand, matrix.pairs[best])) best = q;
    }
    if (best != kNone) link(best);
  }

  Assignment out;
  std::vector<char> det_taken(n_det, 0);
  for (std::size_t row = 0; row < index.tracks.size(); ++row) {
    const std::size_t k = pair_of_track[row];
    if (k == kNone) continue;
    out.pairs.emplace_back(index.tracks[row], matrix.pairs[k].detection_index);
    det_taken[static_cast<std::size_t>(matrix.pairs[k].detection_index)] = 1;
  }
  detail::assign_fresh_ids(out, det_taken, next_id);
  return out;
}

/// Maximum-total-score bipartite matching over admissible pairs (missing or
/// inadmissible pairs are forbidden; among matchings of maximum size, the
/// best total wins). Leftover detections get fresh ids as in match_greedy.
inline Assignment match_hungarian(const ScoreMatrix& matrix, std::span<const TrackId> active,
                                  TrackId& next_id, const MatcherConfig& cfg = {}) {
  const detail::MatrixIndex index(matrix, active);
  const std::size_t rows = index.tracks.size();
  const std::size_t cols = static_cast<std::size_t>(matrix.num_detections);
  std::vector<double> weight(rows * cols, 0.0);
  std::vector<char> allowed(rows * cols, 0);
  for (std::size_t k = 0; k < matrix.pairs.size(); ++k) {
    const ScoredPair& p = matrix.pairs[k];
    if (!detail::admissible(p, cfg)) continue;
    const std::size_t cell = index.row[k] * cols + static_cast<std::size_t>(p.detection_index);
    weight[cell] = p.score;
    allowed[cell] = 1;
  }
  const auto col_of_row = max_weight_assignment(rows, cols, weight, allowed);

  Assignment out;
  std::vector<char> det_taken(cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    if (col_of_row[r] < 0) continue;
    out.pairs.emplace_back(index.tracks[r], col_of_row[r]);
    det_taken[static_cast<std::size_t>(col_of_row[r])] = 1;
  }
  detail::assign_fresh_ids(out, det_taken, next_id);
  return out;
}

inline Assignment match(const ScoreMatrix& matrix, std::span<const TrackId> active,
                        TrackId& next_id, const MatcherConfig& cfg) {
  return cfg.algorithm == MatchAlgorithm::Greedy ? match_greedy(matrix, active, next_id, cfg)
                                                      : match_hungarian(matrix, active, next_id, cfg);
}

/// Sum of matrix scores over the assignment's matched pairs.
inline double total_score(const ScoreMatrix& matrix, const Assignment& a) {
  double total = 0.0;
  for (const auto& [track, det] : a.pairs) {
    for (const ScoredPair& p : matrix.pairs) {
      if (p.track_id == track && p.detection_index == det) {
        total += p.score;
        break;
      }
    }
  }
  return total;
}

}  // namespace simtrack
