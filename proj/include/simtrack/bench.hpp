#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "simtrack/error.hpp"
#include "simtrack/io.hpp"
#include "simtrack/matcher.hpp"
#include "simtrack/rng.hpp"
#include "simtrack/scoring.hpp"

namespace simtrack {

struct BenchRecord {
  int n = 0;
  int trial = 0;
  MatchAlgorithm algorithm = MatchAlgorithm::Greedy;
  std::int64_t nanoseconds = 0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct BenchSummary {
  int n = 0;
  double greedy_median_ns = 0.0;
  double hungarian_median_ns = 0.0;
  double ratio = 0.0;  // hungarian / greedy
};

/// Dense n x n score matrix with every track active at frame gap 1 and
/// scores uniform in [0, 10).
inline ScoreMatrix dense_random_matrix(int n, Rng& rng, std::vector<TrackId>& tracks) {
  ScoreMatrix m;
  m.num_detections = n;
  tracks.resize(static_cast<std::size_t>(n));
  m.pairs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    tracks[static_cast<std::size_t>(t)] = t + 1;
    for (int d = 0; d < n; ++d) m.pairs.push_back({t + 1, d, uniform(rng, 0.0, 10.0), 1});
  }
  return m;
}

/// Times both matchers on the same random matrices, trials run sequentially.
inline std::vector<BenchRecord> bench_matchers(std::span<const int> sizes, int trials,
                                               std::uint64_t seed) {
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw ValidationError("bench sizes must be ascending");
  if (trials < 1) throw ValidationError("bench needs at least one trial");
  Rng rng = make_rng(seed, "bench");
  std::vector<BenchRecord> out;
  std::vector<TrackId> tracks;
  for (const int n : sizes) {
    if (n < 1) throw ValidationError("bench sizes must be >= 1");
    for (int trial = 0; trial < trials; ++trial) {
      const ScoreMatrix m = dense_random_matrix(n, rng, tracks);
      for (const auto algorithm : {MatchAlgorithm::Greedy, MatchAlgorithm::Hungarian}) {
        TrackId next_id = n + 1;
        MatcherConfig cfg;
        cfg.algorithm = algorithm;
        const auto start = std::chrono::steady_clock::now();
        const Assignment a = match(m, tracks, next_id, cfg);
        const auto stop = std::chrono::steady_clock::now();
        if (a.pairs.size() != static_cast<std::size_t>(n)) {
          throw std::logic_error("bench: dense matrix left tracks unmatched");
        }
        out.push_back({n, trial, algorithm,
                       std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()});
      }
    }
  }
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

/// Per-n medians and the Hungarian-to-greedy ratio, ascending by n.
inline std::vector<BenchSummary> summarize(std::span<const BenchRecord> records) {
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_n;
  for (const auto& r : records) {
    auto& slot = by_n[r.n];
    (r.algorithm == MatchAlgorithm::Greedy ? slot.first : slot.second)
        .push_back(static_cast<double>(r.nanoseconds));
  }
  std::vector<BenchSummary> out;
  for (auto& [n, times] : by_n) {
    BenchSummary s;
    s.n = n;
    s.greedy_median_ns = median(times.first);
    s.hungarian_median_ns = median(times.second);
    s.ratio = s.greedy_median_ns > 0.0 ? s.hungarian_median_ns / s.greedy_median_ns : 0.0;
    out.push_back(s);
  }
  return out;
}

/// Least-squares slope of log(median time) against log(n).
inline double loglog_slope(std::span<const BenchSummary> summary, MatchAlgorithm algorithm) {
  if (summary.size() < 2) throw ValidationError("slope needs at least two sizes");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& s : summary) {
    const double t = algorithm == MatchAlgorithm::Greedy ? s.greedy_median_ns : s.hungarian_median_ns;
    const double x = std::log(static_cast<double>(s.n));
    const double y = std::log(std::max(t, 1.0));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(summary.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

inline constexpr std::string_view kBenchCsvHeader = "n,trial,algorithm,nanoseconds";

inline void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << r.trial << ',' << to_string(r.algorithm) << ',' << r.nanoseconds << '\n';
  }
  if (!out) throw IoError("failed writing bench CSV");
}

inline std::vector<BenchRecord> read_bench_csv(std::istream& in, std::string_view source = "<bench>") {
  std::string header;
  if (!std::getline(in, header) || detail::trim(header) != kBenchCsvHeader) {
    throw FormatError(std::string(source) + ": expected header '" + std::string(kBenchCsvHeader) + "'");
  }
  auto parsed = detail::parse_lines<BenchRecord>(
      in, source, [](std::string_view line, std::string& err) -> std::optional<BenchRecord> {
        const auto f = detail::split(line, ',');
        if (f.size() != 4) {
          err = "expected 4 fields";
          return std::nullopt;
        }
        const auto n = detail::to_int(f[0]);
        const auto trial = detail::to_int(f[1]);
        const auto ns = detail::to_int(f[3]);
        if (!n || !trial || !ns || (f[2] != "greedy" && f[2] != "hungarian")) {
          err = "bad field";
          return std::nullopt;
        }
        return BenchRecord{static_cast<int>(*n), static_cast<int>(*trial),
                           f[2] == "greedy" ? MatchAlgorithm::Greedy : MatchAlgorithm::Hungarian, *ns};
      });
  return parsed.entries;
}

}  // namespace simtrack
