#include "tis/tis0.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tis/parallel.hpp"

namespace tis {

std::string_view component_name(FlowComponent c) {
  switch (c) {
    case FlowComponent::kX: return "x";
    case FlowComponent::kY: return "y";
    case FlowComponent::kMagnitude: return "magnitude";
    case FlowComponent::kAngle: return "angle";
  }
  return "?";
}

void Tis0Config::validate() const {
  if (!std::isfinite(k_fences) || k_fences < 0.0) throw Error("k_fences must be finite and non-negative");
  if (vs_exponents.empty()) throw Error("at least one visual saliency exponent is required");
  for (double e : vs_exponents) {
    if (!std::isfinite(e) || e <= 0.0) throw Error("visual saliency exponents must be positive");
  }
  if (!(min_flow_scale >= 0.0 && min_flow_scale <= 1.0)) throw Error("min_flow_scale must lie in [0, 1]");
  if (connectivity != 4 && connectivity != 8) throw Error("connectivity must be 4 or 8");
}

FlowMeasures flow_measures(const FlowField& flow) {
  const int w = flow.width;
  const int h = flow.height;
  FlowMeasures m{{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)}};
  auto& [x, y, mag, ang] = m.fields;
  for (std::size_t i = 0; i < flow.size(); ++i) {
    const double u = flow.u[i];
    const double v = flow.v[i];
    x[i] = u;
    y[i] = v;
    mag[i] = std::hypot(u, v);
    double a = (u == 0.0 && v == 0.0) ? 0.0 : std::atan2(v, u);
    // atan2(-0, negative) returns -pi; fold onto the closed end of (-pi, pi].
    if (a == -std::numbers::pi) a = std::numbers::pi;
    ang[i] = a;
  }
  return m;
}

ScalarField motion_saliency(const ScalarField& component, const SourceStats& stats, double min_scale) {
  require_same_shape(component, stats.outliers, "motion saliency outlier indicator");
  ScalarField out(component.width, component.height);
  const double alpha = stats.scale.alpha;
  if (alpha < min_scale) return out;
  for (std::size_t i = 0; i < component.size(); ++i) {
    if (stats.outliers[i]) out[i] = alpha * std::abs(component[i] - stats.q.q2);
  }
  return out;
}

ScalarField motion_saliency(const ScalarField& component, const Tis0Config& cfg) {
  return motion_saliency(component, analyze_source(component, cfg.k_fences), cfg.min_flow_scale);
}

ScalarField visual_saliency(const ScalarField& saliency, const FlowMeasures& measures,
                            std::span<const SourceStats, kFlowComponents> stats, double exponent,
                            double min_scale) {
  require_same_shape(saliency, measures.fields[0], "visual saliency vs flow");
  ScalarField out(saliency.width, saliency.height);
  std::array<double, kFlowComponents> weight{};
  for (std::size_t c = 0; c < kFlowComponents; ++c) weight[c] = std::max(stats[c].scale.alpha, min_scale);

  for (std::size_t i = 0; i < saliency.size(); ++i) {
    const double base = saliency[i];
    if (base == 0.0) continue;
    double sum = 0.0;
    for (std::size_t c = 0; c < kFlowComponents; ++c) {
      sum += weight[c] * std::abs(measures.fields[c][i] - stats[c].q.q2);
    }
    out[i] = std::pow(base, exponent) * sum;
  }
  return out;
}

ScalarField foregroundness(std::span<const ScalarField> measures) {
  if (measures.empty()) throw Error("no saliency measures to combine");
  ScalarField f(measures[0].width, measures[0].height);
  for (const auto& m : measures) {
    require_same_shape(f, m, "foregroundness summand");
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += m[i];
  }
  return f;
}

BinaryMask threshold_mask(const ScalarField& f, const BinaryMask* previous) {
  if (previous) require_same_shape(f, *previous, "previous mask");
  const auto n = static_cast<double>(f.size());
  double sum = 0.0;
  for (double v : f.values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : f.values) ss += (v - mean) * (v - mean);
  const double beta = mean + std::sqrt(ss / n);

  BinaryMask mask(f.width, f.height);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double threshold = (previous && (*previous)[i]) ? beta * 0.5 : beta;
    mask[i] = f[i] > threshold ? 1 : 0;
  }
  return mask;
}

Components connected_components(const BinaryMask& mask, int connectivity) {
  if (connectivity != 4 && connectivity != 8) throw Error("connectivity must be 4 or 8");
  const int w = mask.width;
  const int h = mask.height;
  Components cc;
  cc.labels.assign(mask.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || cc.labels[start] >= 0) continue;
    const int id = cc.count++;
    cc.labels[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const int px = static_cast<int>(p % static_cast<std::size_t>(w));
      const int py = static_cast<int>(p / static_cast<std::size_t>(w));
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (connectivity == 4 && dx != 0 && dy != 0) continue;
          const int nx = px + dx;
          const int ny = py + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
          if (mask[q] && cc.labels[q] < 0) {
            cc.labels[q] = id;
            stack.push_back(q);
          }
        }
      }
    }
  }
  return cc;
}

BinaryMask select_top_segments(const BinaryMask& mask, const ScalarField& scores, int n_segments,
                               int connectivity) {
  require_same_shape(mask, scores, "segment scores");
  if (n_segments < 1) throw Error("n_segments must be at least 1");
  const Components cc = connected_components(mask, connectivity);

  struct Segment {
    int id;
    double score = 0.0;
    std::size_t pixels = 0;
  };
  std::vector<Segment> segs(static_cast<std::size_t>(cc.count));
  for (int i = 0; i < cc.count; ++i) segs[static_cast<std::size_t>(i)].id = i;
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (cc.labels[p] < 0) continue;
    auto& s = segs[static_cast<std::size_t>(cc.labels[p])];
    s.score += scores[p];
    ++s.pixels;
  }
  // Component ids follow raster order of the first pixel, so id order is the
  // final tie-break.
  std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.pixels != b.pixels) return a.pixels > b.pixels;
    return a.id < b.id;
  });
  std::vector<char> keep(static_cast<std::size_t>(cc.count), 0);
  for (std::size_t i = 0; i < segs.size() && i < static_cast<std::size_t>(n_segments); ++i) {
    keep[static_cast<std::size_t>(segs[i].id)] = 1;
  }
  BinaryMask out(mask.width, mask.height);
  for (std::size_t p = 0; p < mask.size(); ++p) {
    out[p] = (cc.labels[p] >= 0 && keep[static_cast<std::size_t>(cc.labels[p])]) ? 1 : 0;
  }
  return out;
}

Tis0FrameEvidence frame_evidence(const FlowField& flow, const ScalarField& saliency, const Tis0Config& cfg) {
  require_same_shape(flow, saliency, "saliency vs flow");
  const FlowMeasures measures = flow_measures(flow);
  Tis0FrameEvidence ev;
  std::vector<ScalarField> terms;
  terms.reserve(kFlowComponents + cfg.vs_exponents.size());
  for (std::size_t c = 0; c < kFlowComponents; ++c) {
    ev.stats[c] = analyze_source(measures.fields[c], cfg.k_fences);
    terms.push_back(motion_saliency(measures.fields[c], ev.stats[c], cfg.min_flow_scale));
  }
  for (double k : cfg.vs_exponents) {
    terms.push_back(visual_saliency(saliency, measures, ev.stats, k, cfg.min_flow_scale));
  }
  ev.foregroundness = foregroundness(terms);
  return ev;
}

Tis0Result run_tis0(const FrameSequence& seq, const Tis0Config& cfg, int jobs) {
  cfg.validate();
  const std::size_t t_count = seq.frame_count;
  if (!seq.has_flow()) throw Error("sequence " + seq.name + ": missing flow for frame 0");
  if (seq.saliency.size() != t_count) {
    throw Error("sequence " + seq.name + ": missing saliency for frame " + std::to_string(seq.saliency.size()));
  }

  std::vector<Tis0FrameEvidence> evidence(t_count);
  parallel_for(t_count, jobs, [&](std::size_t t) {
    evidence[t] = frame_evidence(seq.flow_at(t), seq.saliency[t], cfg);
  });

  Tis0Result result;
  result.masks.reserve(t_count);
  result.reports.reserve(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    const ScalarField& f = evidence[t].foregroundness;
    const BinaryMask* previous = t > 0 ? &result.masks[t - 1] : nullptr;
    const BinaryMask raw = threshold_mask(f, previous);
    result.masks.push_back(select_top_segments(raw, f, 1, cfg.connectivity));

    std::array<ComponentReport, kFlowComponents> report;
    for (std::size_t c = 0; c < kFlowComponents; ++c) {
      const auto& s = evidence[t].stats[c];
      report[c] = {s.q, s.fences, s.scale.alpha, count_foreground(s.outliers)};
    }
    result.reports.push_back(report);
  }
  result.foregroundness.reserve(t_count);
  for (auto& ev : evidence) result.foregroundness.push_back(std::move(ev.foregroundness));
  return result;
}

}  // namespace tis
