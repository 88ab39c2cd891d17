#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tis/raster.hpp"

namespace tis {

// Intersection over union. Two empty masks score 1.
double jaccard(const BinaryMask& m, const BinaryMask& g);

// Foreground pixels with a background 4-neighbour or on the image border.
BinaryMask mask_boundary(const BinaryMask& mask);

// Boundary F-measure: precision is the fraction of m's boundary pixels within
// Euclidean distance `tolerance` of g's boundary, recall the converse.
double contour_f(const BinaryMask& m, const BinaryMask& g, double tolerance);

// ceil(0.0075 * image diagonal).
double default_contour_tolerance(int width, int height);

// First-block mean minus last-block mean, blocks of ceil(T / 4) frames.
double score_decay(std::span<const double> per_frame);

struct SequenceScore {
  std::string name;
  std::vector<double> j;
  std::vector<double> f;
  double j_mean = 0.0;
  double j_recall = 0.0;  // 1 when j_mean > 0.5
  double j_decay = 0.0;
  double f_mean = 0.0;
  double f_recall = 0.0;
  double f_decay = 0.0;
};

// tolerance < 0 selects default_contour_tolerance for the frame size.
SequenceScore sequence_scores(std::span<const BinaryMask> masks, std::span<const BinaryMask> gts,
                              double tolerance = -1.0, int jobs = 1);

struct DatasetScore {
  std::vector<SequenceScore> sequences;
  // Means over sequences; recall is the fraction of sequences with mean > 0.5.
  SequenceScore all;
};

DatasetScore aggregate(std::vector<SequenceScore> sequences);

// Scores every sequence directory under gt_root against the directory of the
// same name under prediction_root. Each holds 00000.pgm, 00001.pgm, ...
DatasetScore evaluate_dataset(const std::filesystem::path& prediction_root, const std::filesystem::path& gt_root,
                              double tolerance = -1.0, int jobs = 1);

// `sequence,J_mean,J_recall,J_decay,F_mean,F_recall,F_decay` plus an ALL row.
void write_scores_csv(std::ostream& out, const DatasetScore& scores);

}  // namespace tis
