#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simtrack/descriptor.hpp"
#include "simtrack/error.hpp"
#include "simtrack/geometry.hpp"
#include "simtrack/types.hpp"

namespace simtrack {

/// One row of a MOTChallenge file: frame,id,left,top,width,height,conf,x,y,z.
/// Detection files carry id = -1; ground-truth files reuse conf as the
/// "consider" flag and x, y as class and visibility.
struct MotRow {
  int frame = 1;
  std::int64_t id = -1;
  BoundingBox box{0, 0, 1, 1};
  double confidence = 1.0;
  double x = -1.0;
  double y = -1.0;
  double z = -1.0;

  friend bool operator==(const MotRow&, const MotRow&) = default;
};

struct GroundTruthEntry {
  int frame = 1;
  std::int64_t id = 0;
  BoundingBox box{0, 0, 1, 1};
  std::string class_label;
  double visibility = 1.0;  // MOT visibility ratio; 1 - occluded/3 for KITTI
  int occluded = 0;
  double truncated = 0.0;
};

struct ParseWarning {
  int line = 0;
  std::string message;
};

template <typename T>
struct Parsed {
  std::vector<T> entries;
  std::vector<ParseWarning> warnings;
};

/// Rows flagged malformed beyond this fraction fail the whole file.
inline constexpr double kMaxMalformedFraction = 0.10;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  if (sep == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

/// Integers may be written with a fractional part ("3.000") in the wild.
inline std::optional<std::int64_t> to_int(std::string_view s) {
  const auto v = to_double(s);
  if (!v || std::floor(*v) != *v || std::fabs(*v) > 9.0e15) return std::nullopt;
  return static_cast<std::int64_t>(*v);
}

inline std::string format_fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

template <typename T, typename RowFn>
Parsed<T> parse_lines(std::istream& in, std::string_view source, RowFn&& parse_row) {
  Parsed<T> out;
  std::string line;
  int line_no = 0;
  int rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    ++rows;
    std::string error;
    std::optional<T> entry = parse_row(body, error);
    if (!entry) {
      if (!error.empty()) out.warnings.push_back({line_no, std::move(error)});
      continue;
    }
    out.entries.push_back(std::move(*entry));
  }
  if (in.bad()) throw IoError("read error in " + std::string(source));
  if (rows > 0 &&
      static_cast<double>(out.warnings.size()) > kMaxMalformedFraction * static_cast<double>(rows)) {
    std::ostringstream msg;
    msg << source << ": " << out.warnings.size() << " of " << rows
        << " rows malformed (first at line " << out.warnings.front().line << ": "
        << out.warnings.front().message << ")";
    throw FormatError(msg.str());
  }
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

/// Parses comma-separated MOTChallenge rows. Output is stably sorted by frame;
/// rows with bad fields or an invalid box become warnings.
inline Parsed<MotRow> parse_mot(std::istream& in, std::string_view source = "<mot>") {
  auto parsed = detail::parse_lines<MotRow>(in, source, [](std::string_view line, std::string& err)
                                                            -> std::optional<MotRow> {
    const auto f = detail::split(line, ',');
    if (f.size() < 7) {
      err = "expected at least 7 comma-separated fields, got " + std::to_string(f.size());
      return std::nullopt;
    }
    const auto frame = detail::to_int(f[0]);
    const auto id = detail::to_int(f[1]);
    const auto l = detail::to_double(f[2]);
    const auto t = detail::to_double(f[3]);
    const auto w = detail::to_double(f[4]);
    const auto h = detail::to_double(f[5]);
    const auto c = detail::to_double(f[6]);
    if (!frame || !id || !l || !t || !w || !h || !c) {
      err = "non-numeric field";
      return std::nullopt;
    }
    if (*frame < 1) {
      err = "frame must be >= 1";
      return std::nullopt;
    }
    auto box = BoundingBox::make(*l, *t, *w, *h);
    if (!box) {
      err = "invalid box (width and height must be positive)";
      return std::nullopt;
    }
    MotRow row{static_cast<int>(*frame), *id, *box, *c};
    double* extra[] = {&row.x, &row.y, &row.z};
    for (std::size_t k = 7; k < f.size() && k < 10; ++k) {
      const auto v = detail::to_double(f[k]);
      if (!v) {
        err = "non-numeric field " + std::to_string(k + 1);
        return std::nullopt;
      }
      *extra[k - 7] = *v;
    }
    return row;
  });
  std::stable_sort(parsed.entries.begin(), parsed.entries.end(),
                   [](const MotRow& a, const MotRow& b) { return a.frame < b.frame; });
  return parsed;
}

inline Parsed<MotRow> parse_mot_file(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_mot(in, path);
}

/// Detections in frame order; `ordinal` counts rows within each frame.
inline std::vector<Detection> to_detections(const std::vector<MotRow>& rows) {
  std::vector<Detection> out;
  out.reserve(rows.size());
  int frame = -1;
  int ordinal = 0;
  for (const MotRow& r : rows) {
    if (r.frame != frame) {
      frame = r.frame;
      ordinal = 0;
    }
    out.push_back(Detection{r.frame, r.box, r.confidence, ordinal++, r.id});
  }
  return out;
}

/// Ground truth from MOT rows. Rows carrying a class id (x >= 1) with a zero
/// "consider" flag are benchmark-ignored entries and are dropped.
inline std::vector<GroundTruthEntry> to_ground_truth(const std::vector<MotRow>& rows) {
  std::vector<GroundTruthEntry> out;
  std::set<std::pair<int, std::int64_t>> seen;
  for (const MotRow& r : rows) {
    if (r.x >= 1.0 && r.confidence == 0.0) continue;
    if (!seen.emplace(r.frame, r.id).second) {
      throw ValidationError("duplicate (frame " + std::to_string(r.frame) + ", id " +
                            std::to_string(r.id) + ") in ground truth");
    }
    GroundTruthEntry g;
    g.frame = r.frame;
    g.id = r.id;
    g.box = r.box;
    g.class_label = r.x >= 1.0 ? std::to_string(static_cast<int>(r.x)) : "";
    g.visibility = r.y >= 0.0 ? r.y : 1.0;
    out.push_back(std::move(g));
  }
  return out;
}

/// Result rows "frame,id,left,top,w,h,conf,-1,-1,-1" with 2-decimal floats.
inline void write_mot(std::ostream& out, const std::vector<MotRow>& rows) {
  for (const MotRow& r : rows) {
    out << r.frame << ',' << r.id << ',' << detail::format_fixed2(r.box.left()) << ','
        << detail::format_fixed2(r.box.top()) << ',' << detail::format_fixed2(r.box.width()) << ','
        << detail::format_fixed2(r.box.height()) << ',' << detail::format_fixed2(r.confidence)
        << ",-1,-1,-1\n";
  }
  if (!out) throw IoError("failed writing MOT rows");
}

inline void write_mot_file(const std::string& path, const std::vector<MotRow>& rows) {
  auto out = detail::open_output(path);
  write_mot(out, rows);
}

/// Ground truth written as "frame,id,left,top,w,h,1,1,1".
inline void write_mot_ground_truth(std::ostream& out, const std::vector<GroundTruthEntry>& gt) {
  for (const GroundTruthEntry& g : gt) {
    out << g.frame << ',' << g.id << ',' << detail::format_fixed2(g.box.left()) << ','
        << detail::format_fixed2(g.box.top()) << ',' << detail::format_fixed2(g.box.width()) << ','
        << detail::format_fixed2(g.box.height()) << ",1,1," << detail::format_fixed2(g.visibility)
        << '\n';
  }
  if (!out) throw IoError("failed writing ground truth");
}

/// Classes the KITTI tracking benchmark evaluates.
inline bool kitti_evaluated_class(std::string_view type) {
  return type == "Car" || type == "Pedestrian";
}

/// KITTI tracking labels: frame track_id type truncated occluded alpha
/// left top right bottom h w l x y z rotation_y [score]. Only Car and
/// Pedestrian rows survive; corner boxes become (left, top, w, h); 3D fields
/// are read and dropped. KITTI frames start at 0 and are shifted to 1-based.
inline Parsed<GroundTruthEntry> parse_kitti(std::istream& in, std::string_view source = "<kitti>") {
  auto parsed = detail::parse_lines<GroundTruthEntry>(
      in, source, [](std::string_view line, std::string& err) -> std::optional<GroundTruthEntry> {
        const auto f = detail::split(line, ' ');
        if (f.size() < 10) {
          err = "expected at least 10 space-separated fields, got " + std::to_string(f.size());
          return std::nullopt;
        }
        const auto frame = detail::to_int(f[0]);
        const auto id = detail::to_int(f[1]);
        const auto truncated = detail::to_double(f[3]);
        const auto occluded = detail::to_int(f[4]);
        const auto l = detail::to_double(f[6]);
        const auto t = detail::to_double(f[7]);
        const auto r = detail::to_double(f[8]);
        const auto b = detail::to_double(f[9]);
        if (!frame || !id || !truncated || !occluded || !l || !t || !r || !b || *frame < 0) {
          err = "non-numeric or negative field";
          return std::nullopt;
        }
        for (std::size_t k = 10; k < f.size(); ++k) {
          if (!detail::to_double(f[k])) {
            err = "non-numeric 3D field " + std::to_string(k + 1);
            return std::nullopt;
          }
        }
        const std::string_view type = f[2];
        if (!kitti_evaluated_class(type)) return std::nullopt;  // filtered, not malformed
        auto box = BoundingBox::make(*l, *t, *r - *l, *b - *t);
        if (!box) {
          err = "degenerate 2D box";
          return std::nullopt;
        }
        GroundTruthEntry g;
        g.frame = static_cast<int>(*frame) + 1;
        g.id = *id;
        g.box = *box;
        g.class_label = std::string(type);
        g.truncated = *truncated;
        g.occluded = static_cast<int>(*occluded);
        g.visibility = 1.0 - std::clamp(static_cast<double>(*occluded), 0.0, 3.0) / 3.0;
        return g;
      });
  std::stable_sort(parsed.entries.begin(), parsed.entries.end(),
                   [](const GroundTruthEntry& a, const GroundTruthEntry& b) { return a.frame < b.frame; });
  return parsed;
}

inline Parsed<GroundTruthEntry> parse_kitti_file(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_kitti(in, path);
}

/// Keeps one class of a KITTI file ("Car" or "Pedestrian"); empty keeps all.
inline std::vector<GroundTruthEntry> filter_class(std::vector<GroundTruthEntry> entries,
                                                  std::string_view cls) {
  if (cls.empty()) return entries;
  std::erase_if(entries, [&](const GroundTruthEntry& g) { return g.class_label != cls; });
  return entries;
}

inline std::vector<GroundTruthEntry> mot_rows_as_entries(const std::vector<MotRow>& rows) {
  std::vector<GroundTruthEntry> out;
  out.reserve(rows.size());
  for (const MotRow& r : rows) {
    GroundTruthEntry g;
    g.frame = r.frame;
    g.id = r.id;
    g.box = r.box;
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Auxiliary per-detection CSVs, keyed by (frame, ordinal):
//   descriptors.csv  frame,ordinal,v_0,...,v_{K-1}
//   labels.csv       frame,ordinal,identity
//   patches.csv      frame,ordinal,width,height,p_0,...   (RGB interleaved)
// ---------------------------------------------------------------------------

using DetectionKey = std::pair<int, int>;

template <typename T>
using KeyedRows = std::map<DetectionKey, T>;

namespace detail {

template <typename T, typename Fn>
KeyedRows<T> read_keyed_csv(std::istream& in, std::string_view source, Fn&& parse_tail) {
  auto parsed = parse_lines<std::pair<DetectionKey, T>>(
      in, source, [&](std::string_view line, std::string& err) -> std::optional<std::pair<DetectionKey, T>> {
        const auto f = split(line, ',');
        if (f.size() < 3) {
          err = "expected frame,ordinal,...";
          return std::nullopt;
        }
        const auto frame = to_int(f[0]);
        const auto ordinal = to_int(f[1]);
        if (!frame || !ordinal) {
          err = "non-numeric key";
          return std::nullopt;
        }
        std::vector<double> values;
        values.reserve(f.size() - 2);
        for (std::size_t k = 2; k < f.size(); ++k) {
          const auto v = to_double(f[k]);
          if (!v) {
            err = "non-numeric value in column " + std::to_string(k + 1);
            return std::nullopt;
          }
          values.push_back(*v);
        }
        auto tail = parse_tail(values, err);
        if (!tail) return std::nullopt;
        return std::pair{DetectionKey{static_cast<int>(*frame), static_cast<int>(*ordinal)},
                         std::move(*tail)};
      });
  KeyedRows<T> out;
  for (auto& [key, value] : parsed.entries) {
    if (!out.emplace(key, std::move(value)).second) {
      throw ValidationError(std::string(source) + ": duplicate key (" + std::to_string(key.first) +
                            ", " + std::to_string(key.second) + ")");
    }
  }
  return out;
}

inline void write_value(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace detail

inline KeyedRows<Descriptor> read_descriptors(std::istream& in, std::string_view source = "<descriptors>",
                                              std::size_t dim = kDescriptorDim) {
  return detail::read_keyed_csv<Descriptor>(
      in, source, [dim](std::vector<double>& v, std::string& err) -> std::optional<Descriptor> {
        if (v.size() != dim) {
          err = "expected " + std::to_string(dim) + " descriptor values, got " + std::to_string(v.size());
          return std::nullopt;
        }
        return Descriptor{std::move(v)};
      });
}

inline void write_descriptors(std::ostream& out, const KeyedRows<Descriptor>& rows) {
  for (const auto& [key, d] : rows) {
    out << key.first << ',' << key.second;
    for (double v : d.values) {
      out << ',';
      detail::write_value(out, v);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing descriptors");
}

inline KeyedRows<std::int64_t> read_labels(std::istream& in, std::string_view source = "<labels>") {
  return detail::read_keyed_csv<std::int64_t>(
      in, source, [](std::vector<double>& v, std::string& err) -> std::optional<std::int64_t> {
        if (v.size() != 1 || std::floor(v[0]) != v[0]) {
          err = "expected one integer identity";
          return std::nullopt;
        }
        return static_cast<std::int64_t>(v[0]);
      });
}

inline void write_labels(std::ostream& out, const KeyedRows<std::int64_t>& rows) {
  for (const auto& [key, id] : rows) out << key.first << ',' << key.second << ',' << id << '\n';
  if (!out) throw IoError("failed writing labels");
}

inline KeyedRows<Patch> read_patches(std::istream& in, std::string_view source = "<patches>") {
  return detail::read_keyed_csv<Patch>(
      in, source, [](std::vector<double>& v, std::string& err) -> std::optional<Patch> {
        if (v.size() < 2 || v[0] < 1 || v[1] < 1 || std::floor(v[0]) != v[0] ||
            std::floor(v[1]) != v[1]) {
          err = "expected width,height,pixels...";
          return std::nullopt;
        }
        Patch p;
        p.width = static_cast<int>(v[0]);
        p.height = static_cast<int>(v[1]);
        if (v.size() - 2 != static_cast<std::size_t>(p.width) * p.height * kChannels) {
          err = "pixel count does not match width*height*3";
          return std::nullopt;
        }
        p.pixels.assign(v.begin() + 2, v.end());
        return p;
      });
}

inline void write_patches(std::ostream& out, const KeyedRows<Patch>& rows) {
  char buf[16];
  for (const auto& [key, p] : rows) {
    out << key.first << ',' << key.second << ',' << p.width << ',' << p.height;
    for (double v : p.pixels) {
      std::snprintf(buf, sizeof buf, "%.4f", v);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing patches");
}

}  // namespace simtrack
