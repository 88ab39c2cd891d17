#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "tis/raster.hpp"
#include "tis/sequence.hpp"
#include "tis/tukey.hpp"

namespace tis {

enum class FlowComponent : std::size_t { kX = 0, kY = 1, kMagnitude = 2, kAngle = 3 };
inline constexpr std::size_t kFlowComponents = 4;

std::string_view component_name(FlowComponent c);

// The four per-pixel flow measures: x, y, Euclidean magnitude, and angle
// atan2(y, x) in (-pi, pi] with the zero vector mapped to 0.
struct FlowMeasures {
  std::array<ScalarField, kFlowComponents> fields;

  const ScalarField& operator[](FlowComponent c) const { return fields[static_cast<std::size_t>(c)]; }
  int width() const { return fields[0].width; }
  int height() const { return fields[0].height; }
};

struct Tis0Config {
  double k_fences = kTukeyK;
  std::vector<double> vs_exponents{1.0, 1.0 / 2.0, 1.0 / 3.0};
  // Gate for motion saliency and floor for the visual saliency weights.
  double min_flow_scale = 0.5;
  int connectivity = 8;

  void validate() const;
};

FlowMeasures flow_measures(const FlowField& flow);

// alpha * |d - Q2| at outlier pixels, zero elsewhere; all zero when the
// component's outlier scale is below `min_scale`.
ScalarField motion_saliency(const ScalarField& component, const SourceStats& stats, double min_scale);
ScalarField motion_saliency(const ScalarField& component, const Tis0Config& cfg = {});

// saliency^k * sum_i max(alpha_i, min_scale) * |d_i - Q2_i| over the four
// flow components. No outlier gating.
ScalarField visual_saliency(const ScalarField& saliency, const FlowMeasures& measures,
                            std::span<const SourceStats, kFlowComponents> stats, double exponent,
                            double min_scale = 0.5);

// Pointwise sum of the saliency measures.
ScalarField foregroundness(std::span<const ScalarField> measures);

// l = 1 iff f > beta * delta, beta = mean(f) + population std(f), delta = 1/2
// where the previous mask is set and 1 elsewhere.
BinaryMask threshold_mask(const ScalarField& f, const BinaryMask* previous = nullptr);

struct Components {
  std::vector<int> labels;  // -1 for background, otherwise component index
  int count = 0;
};

// Components are numbered in raster order of their first pixel.
Components connected_components(const BinaryMask& mask, int connectivity = 8);

// Keeps the `n_segments` components with the largest score sums. Ties go to
// the larger component, then to the one whose first pixel comes first.
BinaryMask select_top_segments(const BinaryMask& mask, const ScalarField& scores, int n_segments,
                               int connectivity = 8);

// Per-frame output before thresholding.
struct Tis0FrameEvidence {
  std::array<SourceStats, kFlowComponents> stats;
  ScalarField foregroundness;
};

Tis0FrameEvidence frame_evidence(const FlowField& flow, const ScalarField& saliency, const Tis0Config& cfg);

struct ComponentReport {
  Quartiles q;
  OutlierFences fences;
  double alpha = 0.0;
  std::size_t outlier_count = 0;
};

struct Tis0Result {
  std::vector<BinaryMask> masks;
  std::vector<ScalarField> foregroundness;
  std::vector<std::array<ComponentReport, kFlowComponents>> reports;
};

// Evidence is computed per frame in parallel; the thresholding fold runs in
// frame order because each frame's discount reads the previous output mask.
Tis0Result run_tis0(const FrameSequence& seq, const Tis0Config& cfg = {}, int jobs = 1);

}  // namespace tis
