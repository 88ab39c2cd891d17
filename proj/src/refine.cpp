#include "tis/refine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "tis/parallel.hpp"
#include "tis/tis0.hpp"

namespace tis {
namespace {

struct Accum {
  std::int64_t pixels = 0;
  std::int64_t labels = 0;
  Lab lab_sum{};
};

double city_block(const Lab& a, const Lab& b) {
  return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
}

}  // namespace

void RefineConfig::validate() const {
  if (!(epsilon_r > 0.0) || !std::isfinite(epsilon_r)) throw Error("epsilon_r must be positive");
  if (n_segments < 1) throw Error("n_segments must be at least 1");
  if (connectivity != 4 && connectivity != 8) throw Error("connectivity must be 4 or 8");
}

ConsensusTable::ConsensusTable(std::vector<ConsensusEntry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].id == entries_[i - 1].id) throw Error("duplicate supervoxel id " + std::to_string(entries_[i].id));
  }
}

const ConsensusEntry& ConsensusTable::at(std::uint32_t id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const ConsensusEntry& e, std::uint32_t v) { return e.id < v; });
  if (it == entries_.end() || it->id != id) throw Error("supervoxel id " + std::to_string(id) + " not in consensus table");
  return *it;
}

SupervoxelTable supervoxel_stats(std::span<const LabelMap> labels, std::span<const std::vector<Lab>> lab,
                                 std::span<const BinaryMask> masks, int jobs) {
  if (labels.size() != lab.size() || labels.size() != masks.size()) {
    throw Error("frame count mismatch between labels (" + std::to_string(labels.size()) + "), colours (" +
                std::to_string(lab.size()) + ") and masks (" + std::to_string(masks.size()) + ")");
  }
  for (std::size_t t = 0; t < labels.size(); ++t) {
    require_same_shape(labels[t], masks[t], "labels vs mask at frame " + std::to_string(t));
    if (lab[t].size() != labels[t].size()) {
      throw Error("dimension mismatch: labels vs colours at frame " + std::to_string(t));
    }
  }

  std::vector<std::map<std::uint32_t, Accum>> partial(labels.size());
  parallel_for(labels.size(), jobs, [&](std::size_t t) {
    auto& acc = partial[t];
    const LabelMap& ids = labels[t];
    for (std::size_t p = 0; p < ids.size(); ++p) {
      Accum& a = acc[ids[p]];
      ++a.pixels;
      a.labels += masks[t][p] ? 1 : 0;
      for (std::size_t c = 0; c < 3; ++c) a.lab_sum[c] += lab[t][p][c];
    }
  });

  std::map<std::uint32_t, Accum> total;
  for (const auto& frame : partial) {
    for (const auto& [id, a] : frame) {
      Accum& dst = total[id];
      dst.pixels += a.pixels;
      dst.labels += a.labels;
      for (std::size_t c = 0; c < 3; ++c) dst.lab_sum[c] += a.lab_sum[c];
    }
  }

  SupervoxelTable table;
  table.reserve(total.size());
  for (const auto& [id, a] : total) {
    SupervoxelStats s;
    s.id = id;
    s.pixel_count = a.pixels;
    s.label_sum = a.labels;
    for (std::size_t c = 0; c < 3; ++c) s.mean_lab[c] = a.lab_sum[c] / static_cast<double>(a.pixels);
    table.push_back(s);
  }
  return table;
}

std::size_t default_neighbor_count(std::size_t supervoxels) { return (supervoxels + 99) / 100; }

ConsensusTable build_consensus(const SupervoxelTable& stats, const RefineConfig& cfg, int jobs) {
  cfg.validate();
  std::vector<ConsensusEntry> entries(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    entries[i] = {stats[i].id, stats[i].local_consensus(), 0.0};
  }
  if (cfg.mode == ConsensusMode::kLocalOnly) return ConsensusTable(std::move(entries));

  const std::size_t n = stats.size();
  if (n < 2) throw Error("non-local consensus needs at least 2 supervoxels, got " + std::to_string(n));
  const std::size_t k = std::min(cfg.neighbors ? cfg.neighbors : default_neighbor_count(n), n - 1);
  const double total_weight = cfg.nonlocal_weight_total();

  parallel_for(n, jobs, [&](std::size_t s) {
    struct Candidate {
      double r;
      std::uint32_t id;
      std::size_t index;
    };
    std::vector<Candidate> cands;
    cands.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != s) cands.push_back({city_block(stats[s].mean_lab, stats[j].mean_lab), stats[j].id, j});
    }
    const auto nearer = [](const Candidate& a, const Candidate& b) {
      return a.r != b.r ? a.r < b.r : a.id < b.id;
    };
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k), cands.end(), nearer);

    double raw_sum = 0.0;
    std::vector<double> w(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double r = std::max(cands[i].r, cfg.epsilon_r);
      w[i] = 1.0 / (r * r);
      raw_sum += w[i];
    }
    double f_nl = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      f_nl += (w[i] / raw_sum) * total_weight * stats[cands[i].index].local_consensus();
    }
    entries[s].f_nonlocal = f_nl;
  });
  return ConsensusTable(std::move(entries));
}

std::vector<BinaryMask> refine_masks(std::span<const ScalarField> f, const ConsensusTable& consensus,
                                     std::span<const LabelMap> labels, const RefineConfig& cfg, int jobs) {
  cfg.validate();
  if (f.size() != labels.size()) {
    throw Error("frame count mismatch between foregroundness (" + std::to_string(f.size()) + ") and labels (" +
                std::to_string(labels.size()) + ")");
  }
  double f_max = 0.0;
  for (std::size_t t = 0; t < f.size(); ++t) {
    require_same_shape(f[t], labels[t], "foregroundness vs labels at frame " + std::to_string(t));
    for (double v : f[t].values) {
      if (!std::isfinite(v) || v < 0.0) throw Error("foregroundness must be finite and non-negative");
      f_max = std::max(f_max, v);
    }
  }
  const double scale = f_max > 0.0 ? 1.0 / f_max : 0.0;
  const double w0 = cfg.local_weight();

  std::vector<BinaryMask> out(f.size());
  parallel_for(f.size(), jobs, [&](std::size_t t) {
    ScalarField shifted(f[t].width, f[t].height);
    BinaryMask mask(f[t].width, f[t].height);
    for (std::size_t p = 0; p < shifted.size(); ++p) {
      const ConsensusEntry& e = consensus.at(labels[t][p]);
      shifted[p] = f[t][p] * scale + w0 * e.f_local + e.f_nonlocal;
      mask[p] = shifted[p] > 0.0 ? 1 : 0;
    }
    out[t] = select_top_segments(mask, shifted, cfg.n_segments, cfg.connectivity);
  });
  return out;
}

RefineResult refine_sequence(const FrameSequence& seq, std::span<const BinaryMask> initial_masks,
                             std::span<const ScalarField> f, const RefineConfig& cfg, int jobs) {
  if (!seq.has_frames()) throw Error("sequence " + seq.name + ": refinement needs RGB frames");
  if (!seq.has_labels()) throw Error("sequence " + seq.name + ": refinement needs supervoxel labels");

  std::vector<std::vector<Lab>> lab(seq.frame_count);
  parallel_for(seq.frame_count, jobs, [&](std::size_t t) { lab[t] = rgb_to_lab(seq.frames[t]); });
  normalize_lab(lab);

  RefineResult r;
  r.supervoxels = supervoxel_stats(seq.labels, lab, initial_masks, jobs);
  r.consensus = build_consensus(r.supervoxels, cfg, jobs);
  r.masks = refine_masks(f, r.consensus, seq.labels, cfg, jobs);
  return r;
}

}  // namespace tis
