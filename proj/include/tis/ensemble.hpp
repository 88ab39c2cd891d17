#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tis/raster.hpp"
#include "tis/tukey.hpp"

namespace tis {

enum class FusionStrategy { kTukey, kMean, kMedian };

FusionStrategy parse_strategy(const std::string& name);
std::string strategy_name(FusionStrategy s);

// Masks from N_M methods for the same frame.
struct EnsembleFrameInput {
  std::vector<BinaryMask> masks;
  std::vector<std::string> methods;  // optional, used for reporting
};

struct FrameFusionReport {
  std::vector<std::int64_t> counts;  // foreground pixels per mask
  std::vector<double> alphas;        // per-mask weight; empty for mean/median
  bool fell_back_to_median = false;
};

struct FusedFrame {
  BinaryMask mask;
  FrameFusionReport report;
};

// Weighted average of the masks with the mask outlier scales as weights,
// thresholded at > 0.5. Falls back to fuse_median when every weight is 0.
FusedFrame fuse_frame(const EnsembleFrameInput& input, double k = kTukeyK);

// Pixel is foreground iff more than half of the masks mark it.
BinaryMask fuse_mean(const EnsembleFrameInput& input);

// The input mask with the (lower) median foreground count; first index wins ties.
BinaryMask fuse_median(const EnsembleFrameInput& input);

struct FusionReport {
  std::vector<std::string> methods;
  std::vector<FrameFusionReport> frames;
};

struct FusedSequence {
  std::vector<BinaryMask> masks;
  FusionReport report;
};

// Fuses every frame independently. frames[t] holds the masks for frame t.
FusedSequence fuse_sequence(std::span<const EnsembleFrameInput> frames, FusionStrategy strategy,
                            double k = kTukeyK, int jobs = 1);

// CSV with header `frame,method,count,alpha`, one row per frame and method.
void write_fusion_csv(std::ostream& out, const FusionReport& report);

}  // namespace tis
