#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tis/raster.hpp"

namespace tis {

// Subdirectory names and index width for the on-disk video layout:
//
//   <video>/frames/00000.ppm
//   <video>/flow/00000.flo          flow i maps frame i to frame i+1
//   <video>/saliency/00000.pgm
//   <video>/svx/00000.pgm16
//   <video>/masks/<method>/00000.pgm
struct SequenceLayout {
  std::string frames = "frames";
  std::string flow = "flow";
  std::string saliency = "saliency";
  std::string supervoxels = "svx";
  std::string masks = "masks";
  int index_width = 5;
};

// One video, fully loaded. Immutable after open_sequence().
struct FrameSequence {
  std::string name;
  int width = 0;
  int height = 0;
  std::size_t frame_count = 0;

  // Each vector is either empty (not provided) or indexed by frame, except
  // `flow` which may hold frame_count - 1 entries.
  std::vector<RgbImage> frames;
  std::vector<FlowField> flow;
  std::vector<ScalarField> saliency;
  std::vector<LabelMap> labels;
  std::map<std::string, std::vector<BinaryMask>> masks;

  bool has_frames() const { return !frames.empty(); }
  bool has_flow() const { return !flow.empty(); }
  bool has_saliency() const { return !saliency.empty(); }
  bool has_labels() const { return !labels.empty(); }

  // Flow for frame t; the last frame reuses the last available flow file.
  const FlowField& flow_at(std::size_t t) const;
};

std::string frame_filename(std::size_t index, const std::string& extension, int index_width = 5);

// Sorted, contiguous-from-zero indices of files named like 00000.<extension>
// in `dir`. Throws "gap at index i" when the run is broken.
std::vector<std::filesystem::path> list_indexed_files(const std::filesystem::path& dir,
                                                      const std::string& extension, int index_width = 5);

FrameSequence open_sequence(const std::filesystem::path& video_dir, const SequenceLayout& layout = {});

std::vector<BinaryMask> read_mask_directory(const std::filesystem::path& dir, int index_width = 5);
void write_mask_directory(const std::filesystem::path& dir, const std::vector<BinaryMask>& masks,
                          int index_width = 5);

}  // namespace tis
