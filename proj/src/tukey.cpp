#include "tis/tukey.hpp"

#include <algorithm>
#include <cmath>

namespace tis {
namespace {

double interpolate_sorted(const std::vector<double>& sorted, double q) {
  const double pos = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

Quartiles quartiles(std::span<const double> sample) {
  if (sample.empty()) throw Error("empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  for (double d : sorted) {
    if (!std::isfinite(d)) throw Error("non-finite input");
  }
  std::sort(sorted.begin(), sorted.end());
  return {interpolate_sorted(sorted, 0.25), interpolate_sorted(sorted, 0.5),
          interpolate_sorted(sorted, 0.75)};
}

OutlierFences fences(const Quartiles& q, double k) {
  if (!std::isfinite(k)) throw Error("non-finite fence constant");
  if (k < 0.0) throw Error("fence constant must be non-negative");
  const double iqr = q.q3 - q.q1;
  return {q.q1 - k * iqr, q.q3 + k * iqr, k};
}

BinaryMask outlier_set(const ScalarField& data, const OutlierFences& f) {
  BinaryMask out(data.width, data.height);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double d = data[i];
    out[i] = (d < f.o1 || d > f.o3) ? 1 : 0;
  }
  return out;
}

OutlierScale outlier_scale(const ScalarField& data, const BinaryMask& outliers) {
  require_same_shape(data, outliers, "outlier indicator vs data");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double a = std::abs(data[i]);
    den += a;
    if (outliers[i]) num += a;
  }
  if (den <= 0.0 || num <= 0.0) return {0.0};
  return {std::clamp(num / den, 0.0, 1.0)};
}

std::vector<OutlierScale> mask_outlier_scales(std::span<const std::int64_t> counts, double k) {
  if (counts.empty()) throw Error("empty count list");
  std::vector<double> sample;
  sample.reserve(counts.size());
  for (auto n : counts) {
    if (n < 0) throw Error("negative foreground count");
    sample.push_back(static_cast<double>(n));
  }
  const Quartiles q = quartiles(sample);
  const OutlierFences f = fences(q, k);

  std::vector<OutlierScale> out;
  out.reserve(counts.size());
  for (double n : sample) {
    double a = 0.0;
    if (n == q.q2) {
      a = 1.0;
    } else if (n < q.q2) {
      // Q2 == O1 leaves no room below the median: anything lower is an outlier.
      a = (q.q2 == f.o1) ? 0.0 : std::max((n - f.o1) / (q.q2 - f.o1), 0.0);
    } else {
      a = (q.q2 == f.o3) ? 0.0 : std::max((n - f.o3) / (q.q2 - f.o3), 0.0);
    }
    out.push_back({std::min(a, 1.0)});
  }
  return out;
}

SourceStats analyze_source(const ScalarField& data, double k) {
  SourceStats s;
  s.q = quartiles(data.values);
  s.fences = fences(s.q, k);
  s.outliers = outlier_set(data, s.fences);
  s.scale = outlier_scale(data, s.outliers);
  return s;
}

}  // namespace tis
