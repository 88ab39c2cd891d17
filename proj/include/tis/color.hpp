#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tis/raster.hpp"

namespace tis {

using Lab = std::array<double, 3>;

// CIE L*a*b* of an 8-bit sRGB triple, D65 white point.
Lab srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Per-pixel L*a*b* for one frame, pixel-major.
std::vector<Lab> rgb_to_lab(const RgbImage& image);

// Min-max normalizes each channel to [0, 1] over all frames of a video.
// A channel whose range is zero maps to 0.
void normalize_lab(std::span<std::vector<Lab>> frames);

}  // namespace tis
