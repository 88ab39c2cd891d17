#include "tis/ensemble.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "tis/parallel.hpp"

namespace tis {
namespace {

void validate(const EnsembleFrameInput& input) {
  if (input.masks.empty()) throw Error("no masks to fuse");
  for (std::size_t i = 1; i < input.masks.size(); ++i) {
    require_same_shape(input.masks[0], input.masks[i], "mask " + std::to_string(i) + " vs mask 0");
  }
  if (!input.methods.empty() && input.methods.size() != input.masks.size()) {
    throw Error("method name count does not match mask count");
  }
}

std::vector<std::int64_t> foreground_counts(const EnsembleFrameInput& input) {
  std::vector<std::int64_t> counts;
  counts.reserve(input.masks.size());
  for (const auto& m : input.masks) counts.push_back(static_cast<std::int64_t>(count_foreground(m)));
  return counts;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

FusionStrategy parse_strategy(const std::string& name) {
  if (name == "tism") return FusionStrategy::kTukey;
  if (name == "mean") return FusionStrategy::kMean;
  if (name == "median") return FusionStrategy::kMedian;
  throw Error("unknown fusion strategy '" + name + "' (expected tism, mean or median)");
}

std::string strategy_name(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::kTukey: return "tism";
    case FusionStrategy::kMean: return "mean";
    case FusionStrategy::kMedian: return "median";
  }
  return "?";
}

FusedFrame fuse_frame(const EnsembleFrameInput& input, double k) {
  validate(input);
  FusedFrame out;
  out.report.counts = foreground_counts(input);
  const auto scales = mask_outlier_scales(out.report.counts, k);
  out.report.alphas.reserve(scales.size());
  for (const auto& s : scales) out.report.alphas.push_back(s.alpha);

  const double weight_sum = std::accumulate(out.report.alphas.begin(), out.report.alphas.end(), 0.0);
  if (weight_sum <= 0.0) {
    out.report.fell_back_to_median = true;
    out.mask = fuse_median(input);
    return out;
  }

  const BinaryMask& first = input.masks[0];
  out.mask = BinaryMask(first.width, first.height);
  for (std::size_t p = 0; p < first.size(); ++p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < input.masks.size(); ++i) {
      if (input.masks[i][p]) acc += out.report.alphas[i];
    }
    out.mask[p] = acc / weight_sum > 0.5 ? 1 : 0;
  }
  return out;
}

BinaryMask fuse_mean(const EnsembleFrameInput& input) {
  validate(input);
  const BinaryMask& first = input.masks[0];
  const std::size_t n = input.masks.size();
  BinaryMask out(first.width, first.height);
  for (std::size_t p = 0; p < first.size(); ++p) {
    std::size_t votes = 0;
    for (const auto& m : input.masks) votes += m[p] ? 1 : 0;
    // votes / n > 0.5 without rounding.
    out[p] = 2 * votes > n ? 1 : 0;
  }
  return out;
}

BinaryMask fuse_median(const EnsembleFrameInput& input) {
  validate(input);
  const auto counts = foreground_counts(input);
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] < counts[b]; });
  const std::int64_t median = counts[order[(order.size() - 1) / 2]];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == median) return input.masks[i];
  }
  return input.masks[order[(order.size() - 1) / 2]];
}

FusedSequence fuse_sequence(std::span<const EnsembleFrameInput> frames, FusionStrategy strategy, double k,
                            int jobs) {
  if (frames.empty()) throw Error("no frames to fuse");
  const std::size_t n_methods = frames[0].masks.size();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].masks.size() != n_methods) {
      throw Error("frame " + std::to_string(t) + " has " + std::to_string(frames[t].masks.size()) +
                  " masks, expected " + std::to_string(n_methods));
    }
  }

  FusedSequence out;
  out.masks.resize(frames.size());
  out.report.frames.resize(frames.size());
  out.report.methods = frames[0].methods;
  if (out.report.methods.empty()) {
    for (std::size_t i = 0; i < n_methods; ++i) out.report.methods.push_back("method" + std::to_string(i));
  }

  parallel_for(frames.size(), jobs, [&](std::size_t t) {
    switch (strategy) {
      case FusionStrategy::kTukey: {
        FusedFrame f = fuse_frame(frames[t], k);
        out.masks[t] = std::move(f.mask);
        out.report.frames[t] = std::move(f.report);
        break;
      }
      case FusionStrategy::kMean:
        out.masks[t] = fuse_mean(frames[t]);
        out.report.frames[t].counts = foreground_counts(frames[t]);
        break;
      case FusionStrategy::kMedian:
        out.masks[t] = fuse_median(frames[t]);
        out.report.frames[t].counts = foreground_counts(frames[t]);
        break;
    }
  });
  return out;
}

void write_fusion_csv(std::ostream& out, const FusionReport& report) {
  out << "frame,method,count,alpha\n";
  for (std::size_t t = 0; t < report.frames.size(); ++t) {
    const auto& f = report.frames[t];
    for (std::size_t i = 0; i < f.counts.size(); ++i) {
      out << t << ',' << report.methods.at(i) << ',' << f.counts[i] << ',';
      if (i < f.alphas.size()) out << format_double(f.alphas[i]);
      out << '\n';
    }
  }
}

}  // namespace tis
