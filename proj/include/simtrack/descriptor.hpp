#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "simtrack/error.hpp"
#include "simtrack/rng.hpp"

namespace simtrack {

inline constexpr std::size_t kIntensityBins = 8;
inline constexpr std::size_t kOrientationBins = 8;
inline constexpr std::size_t kChannels = 3;
inline constexpr std::size_t kGradientBlocks = 3;
inline constexpr std::size_t kDescriptorDim =
    kChannels * kIntensityBins + kGradientBlocks * kOrientationBins;  // 48

/// Appearance feature vector of one detection crop.
struct Descriptor {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

/// An RGB crop, row-major, three interleaved channels in [0, 1].
struct Patch {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  double at(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * kChannels + c];
  }
  double gray(int x, int y) const {
    return (at(x, y, 0) + at(x, y, 1) + at(x, y, 2)) / 3.0;
  }
};

namespace detail {

inline void l1_normalize(std::vector<double>& v, std::size_t begin, std::size_t count) {
  double sum = 0.0;
  for (std::size_t i = begin; i < begin + count; ++i) sum += v[i];
  if (sum <= 0.0) return;
  for (std::size_t i = begin; i < begin + count; ++i) v[i] /= sum;
}

}  // namespace detail

/// Handcrafted appearance descriptor: per-channel intensity histograms
/// followed by magnitude-weighted gradient-orientation histograms of three
/// horizontal bands (top, middle, bottom). Each 8-bin block is L1-normalized;
/// a band without any gradient stays all-zero.
inline Descriptor describe(const Patch& patch) {
  if (patch.width <= 0 || patch.height <= 0 ||
      patch.pixels.size() !=
          static_cast<std::size_t>(patch.width) * patch.height * kChannels) {
    throw ValidationError("patch dimensions do not match its pixel buffer");
  }
  std::vector<double> v(kDescriptorDim, 0.0);

  for (int y = 0; y < patch.height; ++y) {
    for (int x = 0; x < patch.width; ++x) {
      for (std::size_t c = 0; c < kChannels; ++c) {
        double value = patch.at(x, y, static_cast<int>(c));
        if (!std::isfinite(value)) value = 0.0;
        value = std::clamp(value, 0.0, 1.0);
        auto bin = static_cast<std::size_t>(value * kIntensityBins);
        if (bin >= kIntensityBins) bin = kIntensityBins - 1;
        v[c * kIntensityBins + bin] += 1.0;
      }
    }
  }
  for (std::size_t c = 0; c < kChannels; ++c) {
    detail::l1_normalize(v, c * kIntensityBins, kIntensityBins);
  }

  constexpr std::size_t offset = kChannels * kIntensityBins;
  constexpr double kTwoPi = 6.283185307179586;
  for (int y = 0; y < patch.height; ++y) {
    const std::size_t block =
        std::min<std::size_t>(static_cast<std::size_t>(y) * kGradientBlocks / patch.height,
                              kGradientBlocks - 1);
    for (int x = 0; x < patch.width; ++x) {
      const int xl = std::max(x - 1, 0);
      const int xr = std::min(x + 1, patch.width - 1);
      const int yu = std::max(y - 1, 0);
      const int yd = std::min(y + 1, patch.height - 1);
      const double gx = patch.gray(xr, y) - patch.gray(xl, y);
      const double gy = patch.gray(x, yd) - patch.gray(x, yu);
      const double mag = std::hypot(gx, gy);
      if (!(mag > 0.0)) continue;
      double angle = std::atan2(gy, gx);
      if (angle < 0.0) angle += kTwoPi;
      auto bin = static_cast<std::size_t>(angle / kTwoPi * kOrientationBins);
      if (bin >= kOrientationBins) bin = kOrientationBins - 1;
      v[offset + block * kOrientationBins + bin] += mag;
    }
  }
  for (std::size_t b = 0; b < kGradientBlocks; ++b) {
    detail::l1_normalize(v, offset + b * kOrientationBins, kOrientationBins);
  }
  return Descriptor{std::move(v)};
}

/// Noise-free prototype of an identity: uniform [0, 1) entries seeded only by
/// the identity number.
inline Descriptor identity_prototype(std::int64_t identity, std::size_t dim = kDescriptorDim) {
  Rng rng(substream_seed(static_cast<std::uint64_t>(identity), "oracle-identity"));
  Descriptor d;
  d.values.resize(dim);
  for (auto& x : d.values) x = uniform01(rng);
  return d;
}

/// Ground-truth descriptor provider: the identity prototype plus isotropic
/// Gaussian noise of standard deviation `noise` drawn from `rng`.
inline Descriptor oracle_descriptor(std::int64_t identity, double noise, Rng& rng,
                                    std::size_t dim = kDescriptorDim) {
  if (noise < 0.0) throw ValidationError("oracle noise must be non-negative");
  Descriptor d = identity_prototype(identity, dim);
  if (noise > 0.0) {
    for (auto& x : d.values) x += noise * normal(rng);
  }
  return d;
}

/// Noise-free overload.
inline Descriptor oracle_descriptor(std::int64_t identity, std::size_t dim = kDescriptorDim) {
  return identity_prototype(identity, dim);
}

}  // namespace simtrack
