#include "tis/raster.hpp"

#include <algorithm>

namespace tis {

FlowField::FlowField(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw Error("flow dimensions must be positive");
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  u.assign(n, 0.0f);
  v.assign(n, 0.0f);
}

RgbImage::RgbImage(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw Error("image dimensions must be positive");
  rgb.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0);
}

std::size_t count_foreground(const BinaryMask& mask) {
  return static_cast<std::size_t>(std::count_if(mask.values.begin(), mask.values.end(),
                                                [](std::uint8_t l) { return l != 0; }));
}

}  // namespace tis
