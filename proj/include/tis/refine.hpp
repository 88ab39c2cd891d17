#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tis/color.hpp"
#include "tis/raster.hpp"
#include "tis/sequence.hpp"

namespace tis {

enum class ConsensusMode {
  kLocalOnly,      // w0 = 1, non-local weights zeroed
  kLocalNonlocal,  // w0 = 1/3, non-local weights rescaled to sum 2/3
};

struct RefineConfig {
  ConsensusMode mode = ConsensusMode::kLocalNonlocal;
  // Floor on the mean-LAB city-block distance before it is squared.
  double epsilon_r = 1e-3;
  // Number of colour neighbours per supervoxel; 0 selects ceil(N_S / 100).
  std::size_t neighbors = 0;
  int n_segments = 2;
  int connectivity = 8;

  double local_weight() const { return mode == ConsensusMode::kLocalOnly ? 1.0 : 1.0 / 3.0; }
  double nonlocal_weight_total() const { return mode == ConsensusMode::kLocalOnly ? 0.0 : 2.0 / 3.0; }
  void validate() const;
};

struct SupervoxelStats {
  std::uint32_t id = 0;
  std::int64_t pixel_count = 0;
  std::int64_t label_sum = 0;
  Lab mean_lab{};  // normalized channels

  // Average label polarity in [-1, 1].
  double local_consensus() const {
    return static_cast<double>(2 * label_sum - pixel_count) / static_cast<double>(pixel_count);
  }
};

// Sorted by id; one entry per distinct supervoxel in the video.
using SupervoxelTable = std::vector<SupervoxelStats>;

struct ConsensusEntry {
  std::uint32_t id = 0;
  double f_local = 0.0;
  double f_nonlocal = 0.0;
};

class ConsensusTable {
 public:
  ConsensusTable() = default;
  explicit ConsensusTable(std::vector<ConsensusEntry> entries);

  const std::vector<ConsensusEntry>& entries() const { return entries_; }
  // Throws when `id` is not in the table.
  const ConsensusEntry& at(std::uint32_t id) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<ConsensusEntry> entries_;
};

// Accumulates counts and mean normalized LAB over every pixel of every frame
// carrying each supervoxel id. Per-frame partial sums are merged in frame
// order, so the result does not depend on `jobs`.
SupervoxelTable supervoxel_stats(std::span<const LabelMap> labels, std::span<const std::vector<Lab>> lab,
                                 std::span<const BinaryMask> masks, int jobs = 1);

std::size_t default_neighbor_count(std::size_t supervoxels);

// Local consensus for every supervoxel plus, in local+nonlocal mode, the
// weighted consensus of its nearest neighbours in mean-LAB colour
// (city-block distance, ties to the smaller id).
ConsensusTable build_consensus(const SupervoxelTable& stats, const RefineConfig& cfg, int jobs = 1);

// f is rescaled by its video-wide maximum, shifted by w0 * f_local +
// f_nonlocal of the pixel's supervoxel, thresholded at > 0, and limited to
// the cfg.n_segments segments with the greatest shifted sums.
std::vector<BinaryMask> refine_masks(std::span<const ScalarField> f, const ConsensusTable& consensus,
                                     std::span<const LabelMap> labels, const RefineConfig& cfg, int jobs = 1);

struct RefineResult {
  std::vector<BinaryMask> masks;
  SupervoxelTable supervoxels;
  ConsensusTable consensus;
};

// Second pass over a whole video: LAB conversion and normalization, consensus
// from the initial masks, refinement of every frame.
RefineResult refine_sequence(const FrameSequence& seq, std::span<const BinaryMask> initial_masks,
                             std::span<const ScalarField> f, const RefineConfig& cfg, int jobs = 1);

}  // namespace tis
