#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tis/raster.hpp"

namespace tis {

// Tukey's constant for "outliers".
inline constexpr double kTukeyK = 1.5;

struct Quartiles {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;

  double iqr() const { return q3 - q1; }
};

struct OutlierFences {
  double o1 = 0.0;
  double o3 = 0.0;
  double k = kTukeyK;
};

// Fraction of a data source's absolute magnitude carried by its outliers.
// Always in [0, 1].
struct OutlierScale {
  double alpha = 0.0;
};

// Quartiles by linear interpolation between order statistics at zero-based
// position (n - 1) * q. Throws on an empty sample or non-finite values.
Quartiles quartiles(std::span<const double> sample);

OutlierFences fences(const Quartiles& q, double k = kTukeyK);

// 1 where d < o1 or d > o3 (strict on both sides).
BinaryMask outlier_set(const ScalarField& data, const OutlierFences& f);

// sum_{outliers} |d| / sum_{all} |d|; zero when the denominator is zero.
OutlierScale outlier_scale(const ScalarField& data, const BinaryMask& outliers);

// Per-mask reliability from foreground-pixel counts. Counts at the median
// get 1, counts outside the fences get 0, linear in between.
std::vector<OutlierScale> mask_outlier_scales(std::span<const std::int64_t> counts, double k = kTukeyK);

// Quartiles, fences, outlier indicator and scale of one data source.
struct SourceStats {
  Quartiles q;
  OutlierFences fences;
  BinaryMask outliers;
  OutlierScale scale;
};

SourceStats analyze_source(const ScalarField& data, double k = kTukeyK);

}  // namespace tis
