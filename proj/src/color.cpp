#include "tis/color.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tis {
namespace {

// D65 reference white, Y normalized to 1.
constexpr double kXn = 0.95047;
constexpr double kYn = 1.00000;
constexpr double kZn = 1.08883;

double srgb_to_linear(std::uint8_t c) {
  const double v = c / 255.0;
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

Lab srgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = srgb_to_linear(r8);
  const double g = srgb_to_linear(g8);
  const double b = srgb_to_linear(b8);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = lab_f(x / kXn);
  const double fy = lab_f(y / kYn);
  const double fz = lab_f(z / kZn);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::vector<Lab> rgb_to_lab(const RgbImage& image) {
  std::vector<Lab> out(image.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = srgb_to_lab(image.rgb[3 * i], image.rgb[3 * i + 1], image.rgb[3 * i + 2]);
  }
  return out;
}

void normalize_lab(std::span<std::vector<Lab>> frames) {
  Lab lo;
  Lab hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& frame : frames) {
    for (const auto& px : frame) {
      for (std::size_t c = 0; c < 3; ++c) {
        lo[c] = std::min(lo[c], px[c]);
        hi[c] = std::max(hi[c], px[c]);
      }
    }
  }
  for (auto& frame : frames) {
    for (auto& px : frame) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double range = hi[c] - lo[c];
        px[c] = range > 0.0 ? (px[c] - lo[c]) / range : 0.0;
      }
    }
  }
}

}  // namespace tis
