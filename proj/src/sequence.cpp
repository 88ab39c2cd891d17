#include "tis/sequence.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "tis/raster_io.hpp"

namespace fs = std::filesystem;

namespace tis {
namespace {

bool parse_index(const std::string& stem, int width, std::size_t& index) {
  if (static_cast<int>(stem.size()) != width) return false;
  std::size_t v = 0;
  for (char c : stem) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  index = v;
  return true;
}

template <typename T>
void check_shape(const T& raster, int width, int height, const fs::path& file) {
  if (raster.width != width || raster.height != height) {
    throw Error("dimension mismatch in " + file.string() + ": " + std::to_string(raster.width) + "x" +
                std::to_string(raster.height) + ", expected " + std::to_string(width) + "x" +
                std::to_string(height));
  }
}

template <typename T, typename Reader>
std::vector<T> load_all(const std::vector<fs::path>& files, Reader reader, int& width, int& height) {
  std::vector<T> out;
  out.reserve(files.size());
  for (const auto& f : files) {
    T r = reader(f);
    if (width == 0) {
      width = r.width;
      height = r.height;
    }
    check_shape(r, width, height, f);
    out.push_back(std::move(r));
  }
  return out;
}

void require_count(std::size_t have, std::size_t want, const fs::path& dir) {
  if (have != want) {
    throw Error("mismatched frame counts: " + dir.string() + " has " + std::to_string(have) +
                " files, expected " + std::to_string(want));
  }
}

}  // namespace

const FlowField& FrameSequence::flow_at(std::size_t t) const {
  if (flow.empty()) throw Error("sequence " + name + " has no flow");
  if (t >= frame_count) throw Error("frame index out of range");
  return flow[std::min(t, flow.size() - 1)];
}

std::string frame_filename(std::size_t index, const std::string& extension, int index_width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", index_width, index);
  return std::string(buf) + "." + extension;
}

std::vector<fs::path> list_indexed_files(const fs::path& dir, const std::string& extension, int index_width) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<std::pair<std::size_t, fs::path>> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() != "." + extension) continue;
    std::size_t idx = 0;
    if (!parse_index(p.stem().string(), index_width, idx)) continue;
    found.emplace_back(idx, p);
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  out.reserve(found.size());
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i].first != i) throw Error("gap at index " + std::to_string(i) + " in " + dir.string());
    out.push_back(found[i].second);
  }
  return out;
}

FrameSequence open_sequence(const fs::path& video_dir, const SequenceLayout& layout) {
  if (!fs::is_directory(video_dir)) throw Error("sequence directory not found: " + video_dir.string());

  FrameSequence seq;
  seq.name = video_dir.filename().string();
  if (seq.name.empty()) seq.name = video_dir.parent_path().filename().string();
  const int iw = layout.index_width;

  const fs::path frames_dir = video_dir / layout.frames;
  const fs::path flow_dir = video_dir / layout.flow;
  const fs::path sal_dir = video_dir / layout.saliency;
  const fs::path svx_dir = video_dir / layout.supervoxels;
  const fs::path masks_dir = video_dir / layout.masks;

  std::vector<fs::path> frame_files;
  if (fs::is_directory(frames_dir)) frame_files = list_indexed_files(frames_dir, "ppm", iw);

  std::map<std::string, std::vector<fs::path>> mask_files;
  if (fs::is_directory(masks_dir)) {
    for (const auto& entry : fs::directory_iterator(masks_dir)) {
      if (entry.is_directory()) {
        mask_files[entry.path().filename().string()] = list_indexed_files(entry.path(), "pgm", iw);
      }
    }
  }

  if (!frame_files.empty()) {
    seq.frame_count = frame_files.size();
  } else if (!mask_files.empty()) {
    seq.frame_count = mask_files.begin()->second.size();
  } else if (fs::is_directory(sal_dir)) {
    seq.frame_count = list_indexed_files(sal_dir, "pgm", iw).size();
  }
  if (seq.frame_count == 0) throw Error("empty sequence: no frames found in " + video_dir.string());

  int w = 0;
  int h = 0;
  seq.frames = load_all<RgbImage>(frame_files, [](const fs::path& p) { return read_ppm(p); }, w, h);

  if (fs::is_directory(flow_dir)) {
    auto files = list_indexed_files(flow_dir, "flo", iw);
    if (!files.empty()) {
      const std::size_t t = seq.frame_count;
      const bool ok = files.size() == t || (t > 1 && files.size() == t - 1);
      if (!ok) {
        throw Error("mismatched frame counts: " + flow_dir.string() + " has " + std::to_string(files.size()) +
                    " files, expected " + std::to_string(t) + " or " + std::to_string(t - 1));
      }
      seq.flow = load_all<FlowField>(files, [](const fs::path& p) { return read_flo(p); }, w, h);
    }
  }
  if (fs::is_directory(sal_dir)) {
    auto files = list_indexed_files(sal_dir, "pgm", iw);
    if (!files.empty()) {
      require_count(files.size(), seq.frame_count, sal_dir);
      seq.saliency = load_all<ScalarField>(files, [](const fs::path& p) { return read_saliency(p); }, w, h);
    }
  }
  if (fs::is_directory(svx_dir)) {
    auto files = list_indexed_files(svx_dir, "pgm16", iw);
    if (!files.empty()) {
      require_count(files.size(), seq.frame_count, svx_dir);
      seq.labels = load_all<LabelMap>(files, [](const fs::path& p) { return read_labels(p); }, w, h);
    }
  }
  for (const auto& [method, files] : mask_files) {
    require_count(files.size(), seq.frame_count, masks_dir / method);
    seq.masks[method] = load_all<BinaryMask>(files, [](const fs::path& p) { return read_mask(p); }, w, h);
  }
  seq.width = w;
  seq.height = h;
  return seq;
}

std::vector<BinaryMask> read_mask_directory(const fs::path& dir, int index_width) {
  const auto files = list_indexed_files(dir, "pgm", index_width);
  if (files.empty()) throw Error("no masks found in " + dir.string());
  int w = 0;
  int h = 0;
  return load_all<BinaryMask>(files, [](const fs::path& p) { return read_mask(p); }, w, h);
}

void write_mask_directory(const fs::path& dir, const std::vector<BinaryMask>& masks, int index_width) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    write_mask(dir / frame_filename(i, "pgm", index_width), masks[i]);
  }
}

}  // namespace tis
