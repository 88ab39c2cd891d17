#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tis/error.hpp"

namespace tis {

// Row-major 2D raster. All rasters in this project share this layout:
// pixel (x, y) lives at index y * width + x.
template <typename T>
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<T> values;

  Raster() = default;
  Raster(int w, int h, T fill = T{})
      : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
    if (w <= 0 || h <= 0) throw Error("raster dimensions must be positive");
  }

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }

  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }
  T& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

  template <typename U>
  bool same_shape(const Raster<U>& other) const {
    return width == other.width && height == other.height;
  }

  friend bool operator==(const Raster&, const Raster&) = default;
};

// Real-valued data source: a flow component, a saliency map, foregroundness.
using ScalarField = Raster<double>;

// Per-pixel labels in {0, 1}.
using BinaryMask = Raster<std::uint8_t>;

// Per-pixel supervoxel IDs, consistent across the frames of a video.
using LabelMap = Raster<std::uint32_t>;

// Forward optical flow for one frame pair. Stored as float32 so that .flo
// files round-trip bit-exactly.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> u;
  std::vector<float> v;

  FlowField() = default;
  FlowField(int w, int h);

  std::size_t size() const { return u.size(); }
  friend bool operator==(const FlowField&, const FlowField&) = default;
};

// 8-bit sRGB image, interleaved RGB.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  RgbImage() = default;
  RgbImage(int w, int h);

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

std::size_t count_foreground(const BinaryMask& mask);

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const std::string& what) {
  if (a.width != b.width || a.height != b.height) {
    throw Error("dimension mismatch: " + what + " (" + std::to_string(a.width) + "x" +
                std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                std::to_string(b.height) + ")");
  }
}

}  // namespace tis
