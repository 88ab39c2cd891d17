#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tis/raster.hpp"

namespace tis {

using Bytes = std::vector<std::uint8_t>;

// Middlebury .flo: float32 sentinel 202021.25 ("PIEH"), int32 width, int32
// height, then interleaved (u, v) float32 pairs. Little-endian throughout.
inline constexpr float kFloSentinel = 202021.25f;

FlowField decode_flo(std::span<const std::uint8_t> bytes);
Bytes encode_flo(const FlowField& flow);

// 8-bit binary PGM ("P5"). Masks binarize at byte > 127 and are written as
// 0/255; saliency maps are scaled by 1/255 into [0, 1].
BinaryMask decode_pgm_mask(std::span<const std::uint8_t> bytes);
Bytes encode_pgm_mask(const BinaryMask& mask);
ScalarField decode_pgm_scalar(std::span<const std::uint8_t> bytes);
// Values are clamped to [0, 1] and rounded to the nearest 1/255 step.
Bytes encode_pgm_scalar(const ScalarField& field);

// 16-bit P5 (maxval 65535, MSB-first) carrying supervoxel IDs.
LabelMap decode_pgm16(std::span<const std::uint8_t> bytes);
Bytes encode_pgm16(const LabelMap& labels);

// 24-bit binary PPM ("P6").
RgbImage decode_ppm(std::span<const std::uint8_t> bytes);
Bytes encode_ppm(const RgbImage& image);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// File-level conveniences; errors carry the offending path.
FlowField read_flo(const std::filesystem::path& path);
BinaryMask read_mask(const std::filesystem::path& path);
ScalarField read_saliency(const std::filesystem::path& path);
LabelMap read_labels(const std::filesystem::path& path);
RgbImage read_ppm(const std::filesystem::path& path);
void write_flo(const std::filesystem::path& path, const FlowField& flow);
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);
void write_saliency(const std::filesystem::path& path, const ScalarField& field);
void write_labels(const std::filesystem::path& path, const LabelMap& labels);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

}  // namespace tis
