#include "tis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tis/parallel.hpp"
#include "tis/sequence.hpp"

namespace fs = std::filesystem;

namespace tis {
namespace {

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Dilates `boundary` by a Euclidean disc of radius `tolerance`.
BinaryMask dilate(const BinaryMask& boundary, double tolerance) {
  const int r = static_cast<int>(std::floor(tolerance));
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (static_cast<double>(dx * dx + dy * dy) <= tolerance * tolerance) offsets.emplace_back(dx, dy);
    }
  }
  BinaryMask out(boundary.width, boundary.height);
  for (int y = 0; y < boundary.height; ++y) {
    for (int x = 0; x < boundary.width; ++x) {
      if (!boundary.at(x, y)) continue;
      for (auto [dx, dy] : offsets) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx >= 0 && ny >= 0 && nx < boundary.width && ny < boundary.height) out.at(nx, ny) = 1;
      }
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double jaccard(const BinaryMask& m, const BinaryMask& g) {
  require_same_shape(m, g, "jaccard prediction vs ground truth");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t p = 0; p < m.size(); ++p) {
    const bool a = m[p] != 0;
    const bool b = g[p] != 0;
    inter += (a && b) ? 1 : 0;
    uni += (a || b) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask mask_boundary(const BinaryMask& mask) {
  BinaryMask b(mask.width, mask.height);
  const int w = mask.width;
  const int h = mask.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      const bool edge = x == 0 || y == 0 || x == w - 1 || y == h - 1 || !mask.at(x - 1, y) ||
                        !mask.at(x + 1, y) || !mask.at(x, y - 1) || !mask.at(x, y + 1);
      b.at(x, y) = edge ? 1 : 0;
    }
  }
  return b;
}

double contour_f(const BinaryMask& m, const BinaryMask& g, double tolerance) {
  require_same_shape(m, g, "contour prediction vs ground truth");
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) throw Error("contour tolerance must be non-negative");
  const BinaryMask bm = mask_boundary(m);
  const BinaryMask bg = mask_boundary(g);
  const std::size_t nm = count_foreground(bm);
  const std::size_t ng = count_foreground(bg);
  if (nm == 0 && ng == 0) return 1.0;
  if (nm == 0 || ng == 0) return 0.0;

  const BinaryMask near_g = dilate(bg, tolerance);
  const BinaryMask near_m = dilate(bm, tolerance);
  std::size_t matched_m = 0;
  std::size_t matched_g = 0;
  for (std::size_t p = 0; p < bm.size(); ++p) {
    if (bm[p] && near_g[p]) ++matched_m;
    if (bg[p] && near_m[p]) ++matched_g;
  }
  const double precision = static_cast<double>(matched_m) / static_cast<double>(nm);
  const double recall = static_cast<double>(matched_g) / static_cast<double>(ng);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double default_contour_tolerance(int width, int height) {
  return std::ceil(0.0075 * std::hypot(static_cast<double>(width), static_cast<double>(height)));
}

double score_decay(std::span<const double> per_frame) {
  if (per_frame.empty()) return 0.0;
  const std::size_t block = (per_frame.size() + 3) / 4;
  return mean_of(per_frame.first(block)) - mean_of(per_frame.last(block));
}

SequenceScore sequence_scores(std::span<const BinaryMask> masks, std::span<const BinaryMask> gts, double tolerance,
                              int jobs) {
  if (masks.size() != gts.size()) {
    throw Error("length mismatch: " + std::to_string(masks.size()) + " predictions vs " +
                std::to_string(gts.size()) + " ground-truth frames");
  }
  if (masks.empty()) throw Error("no frames to score");
  SequenceScore s;
  s.j.resize(masks.size());
  s.f.resize(masks.size());
  parallel_for(masks.size(), jobs, [&](std::size_t t) {
    const double tol = tolerance < 0.0 ? default_contour_tolerance(gts[t].width, gts[t].height) : tolerance;
    s.j[t] = jaccard(masks[t], gts[t]);
    s.f[t] = contour_f(masks[t], gts[t], tol);
  });
  s.j_mean = mean_of(s.j);
  s.f_mean = mean_of(s.f);
  s.j_recall = s.j_mean > 0.5 ? 1.0 : 0.0;
  s.f_recall = s.f_mean > 0.5 ? 1.0 : 0.0;
  s.j_decay = score_decay(s.j);
  s.f_decay = score_decay(s.f);
  return s;
}

DatasetScore aggregate(std::vector<SequenceScore> sequences) {
  if (sequences.empty()) throw Error("no sequences to aggregate");
  DatasetScore d;
  d.all.name = "ALL";
  const auto n = static_cast<double>(sequences.size());
  for (const auto& s : sequences) {
    d.all.j_mean += s.j_mean;
    d.all.j_recall += s.j_recall;
    d.all.j_decay += s.j_decay;
    d.all.f_mean += s.f_mean;
    d.all.f_recall += s.f_recall;
    d.all.f_decay += s.f_decay;
  }
  d.all.j_mean /= n;
  d.all.j_recall /= n;
  d.all.j_decay /= n;
  d.all.f_mean /= n;
  d.all.f_recall /= n;
  d.all.f_decay /= n;
  d.sequences = std::move(sequences);
  return d;
}

DatasetScore evaluate_dataset(const fs::path& prediction_root, const fs::path& gt_root, double tolerance, int jobs) {
  if (!fs::is_directory(gt_root)) throw Error("ground-truth root not found: " + gt_root.string());
  if (!fs::is_directory(prediction_root)) throw Error("prediction root not found: " + prediction_root.string());
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(gt_root)) {
    if (entry.is_directory()) names.push_back(entry.path().filename().string());
  }
  if (names.empty()) throw Error("no ground-truth sequences under " + gt_root.string());
  std::sort(names.begin(), names.end());

  std::vector<SequenceScore> scores;
  scores.reserve(names.size());
  for (const auto& name : names) {
    const fs::path pred_dir = prediction_root / name;
    if (!fs::is_directory(pred_dir)) throw Error("missing predicted sequence: " + name);
    const auto gts = read_mask_directory(gt_root / name);
    const auto preds = read_mask_directory(pred_dir);
    try {
      SequenceScore s = sequence_scores(preds, gts, tolerance, jobs);
      s.name = name;
      scores.push_back(std::move(s));
    } catch (const Error& e) {
      throw Error("sequence " + name + ": " + e.what());
    }
  }
  return aggregate(std::move(scores));
}

void write_scores_csv(std::ostream& out, const DatasetScore& scores) {
  out << "sequence,J_mean,J_recall,J_decay,F_mean,F_recall,F_decay\n";
  auto row = [&](const SequenceScore& s) {
    out << s.name << ',' << fmt(s.j_mean) << ',' << fmt(s.j_recall) << ',' << fmt(s.j_decay) << ','
        << fmt(s.f_mean) << ',' << fmt(s.f_recall) << ',' << fmt(s.f_decay) << '\n';
  };
  for (const auto& s : scores.sequences) row(s);
  row(scores.all);
}

}  // namespace tis
