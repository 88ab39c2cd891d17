#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tis/raster.hpp"
#include "tis/raster_io.hpp"
#include "tis/sequence.hpp"

namespace fixtures {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "tis") {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = fs::temp_directory_path() / (tag + "-" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

struct Block {
  int x0 = 20;
  int y0 = 15;
  int size = 10;
  bool contains(int x, int y) const { return x >= x0 && x < x0 + size && y >= y0 && y < y0 + size; }
};

inline constexpr int kBlockWidth = 64;
inline constexpr int kBlockHeight = 48;

// Uniform background flow (1, 0) with a 10x10 block moving (8, 0).
inline tis::FlowField block_flow(const Block& b = {}) {
  tis::FlowField f(kBlockWidth, kBlockHeight);
  for (int y = 0; y < kBlockHeight; ++y) {
    for (int x = 0; x < kBlockWidth; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * kBlockWidth + x;
      f.u[i] = b.contains(x, y) ? 8.0f : 1.0f;
      f.v[i] = 0.0f;
    }
  }
  return f;
}

inline tis::BinaryMask block_mask(const Block& b = {}) {
  tis::BinaryMask m(kBlockWidth, kBlockHeight);
  for (int y = 0; y < kBlockHeight; ++y) {
    for (int x = 0; x < kBlockWidth; ++x) m.at(x, y) = b.contains(x, y);
  }
  return m;
}

// Moving-block video on disk: frames/, flow/ (T - 1 files, or 1 for a single
// frame), saliency/ (uniform 0.5, stored as byte 128), svx/.
inline void write_block_sequence(const fs::path& dir, std::size_t frames, bool with_svx = true) {
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "flow");
  fs::create_directories(dir / "saliency");
  if (with_svx) fs::create_directories(dir / "svx");
  const Block b;
  for (std::size_t t = 0; t < frames; ++t) {
    tis::RgbImage img(kBlockWidth, kBlockHeight);
    tis::LabelMap svx(kBlockWidth, kBlockHeight);
    for (int y = 0; y < kBlockHeight; ++y) {
      for (int x = 0; x < kBlockWidth; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * kBlockWidth + x;
        const bool in = b.contains(x, y);
        img.rgb[3 * i] = in ? 220 : 30;
        img.rgb[3 * i + 1] = in ? 40 : 120;
        img.rgb[3 * i + 2] = in ? 40 : 60;
        // Block is one supervoxel; background is tiled into 8x8 cells.
        svx[i] = in ? 1000u : static_cast<std::uint32_t>((y / 8) * 16 + x / 8);
      }
    }
    tis::write_ppm(dir / "frames" / tis::frame_filename(t, "ppm"), img);
    tis::write_saliency(dir / "saliency" / tis::frame_filename(t, "pgm"), tis::ScalarField(kBlockWidth, kBlockHeight, 0.5));
    if (with_svx) tis::write_labels(dir / "svx" / tis::frame_filename(t, "pgm16"), svx);
    if (t + 1 < frames || frames == 1) tis::write_flo(dir / "flow" / tis::frame_filename(t, "flo"), block_flow(b));
  }
}

inline tis::BinaryMask random_mask(std::mt19937& rng, int w, int h, double p = 0.5) {
  std::bernoulli_distribution on(p);
  tis::BinaryMask m(w, h);
  for (auto& l : m.values) l = on(rng);
  return m;
}

}  // namespace fixtures
