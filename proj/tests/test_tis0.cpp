#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "tis/metrics.hpp"
#include "tis/tis0.hpp"

using namespace tis;

namespace {

FlowField single(float u, float v) {
  FlowField f(1, 1);
  f.u[0] = u;
  f.v[0] = v;
  return f;
}

SourceStats stats_with(int w, int h, double q2, double alpha) {
  SourceStats s;
  s.q = {q2, q2, q2};
  s.fences = {q2, q2, 1.5};
  s.outliers = BinaryMask(w, h);
  s.scale.alpha = alpha;
  return s;
}

BinaryMask mask_from(int w, int h, std::vector<std::uint8_t> v) {
  BinaryMask m(w, h);
  m.values = std::move(v);
  return m;
}

ScalarField field_from(int w, int h, std::vector<double> v) {
  ScalarField f(w, h);
  f.values = std::move(v);
  return f;
}

FrameSequence block_sequence(std::size_t frames, double saliency = 0.5) {
  FrameSequence seq;
  seq.name = "block";
  seq.width = fixtures::kBlockWidth;
  seq.height = fixtures::kBlockHeight;
  seq.frame_count = frames;
  for (std::size_t t = 0; t < frames; ++t) {
    seq.flow.push_back(fixtures::block_flow());
    seq.saliency.emplace_back(seq.width, seq.height, saliency);
  }
  return seq;
}

}  // namespace

TEST_CASE("flow_measures") {
  auto m = flow_measures(single(3, 4));
  CHECK(m[FlowComponent::kMagnitude][0] == 5.0);
  CHECK(m[FlowComponent::kAngle][0] == doctest::Approx(0.927295218001612).epsilon(1e-14));
  CHECK(m[FlowComponent::kX][0] == 3.0);
  CHECK(m[FlowComponent::kY][0] == 4.0);

  m = flow_measures(single(0, 0));
  CHECK(m[FlowComponent::kMagnitude][0] == 0.0);
  CHECK(m[FlowComponent::kAngle][0] == 0.0);
  m = flow_measures(single(-0.0f, -0.0f));
  CHECK(m[FlowComponent::kAngle][0] == 0.0);

  m = flow_measures(single(-1, 0));
  CHECK(m[FlowComponent::kMagnitude][0] == 1.0);
  CHECK(m[FlowComponent::kAngle][0] == std::numbers::pi);
  m = flow_measures(single(-1, -0.0f));
  CHECK(m[FlowComponent::kAngle][0] == std::numbers::pi);
}

TEST_CASE("motion_saliency") {
  ScalarField comp = field_from(3, 1, {10, 2, 2});
  SourceStats s = stats_with(3, 1, 2.0, 0.3);
  s.outliers[0] = 1;
  for (double v : motion_saliency(comp, s, 0.5).values) CHECK(v == 0.0);

  s.scale.alpha = 0.8;
  const ScalarField out = motion_saliency(comp, s, 0.5);
  CHECK(out[0] == doctest::Approx(6.4).epsilon(1e-15));
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);
}

TEST_CASE("motion_saliency is zero off the outlier set") {
  std::mt19937 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  std::bernoulli_distribution spike(0.08);
  for (int i = 0; i < 100; ++i) {
    ScalarField comp(9, 7);
    for (auto& v : comp.values) v = spike(rng) ? 20 + n(rng) : n(rng);
    const SourceStats s = analyze_source(comp);
    const ScalarField out = motion_saliency(comp, s, 0.5);
    for (std::size_t p = 0; p < comp.size(); ++p) {
      if (!s.outliers[p] || s.scale.alpha < 0.5) {
        REQUIRE(out[p] == 0.0);
      } else {
        REQUIRE(std::abs(out[p] - s.scale.alpha * std::abs(comp[p] - s.q.q2)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("visual_saliency") {
  const auto measures = flow_measures(single(7, 0));
  std::array<SourceStats, kFlowComponents> stats{
      stats_with(1, 1, 2.0, 0.8), stats_with(1, 1, 0.0, 0.0), stats_with(1, 1, 7.0, 0.0),
      stats_with(1, 1, 0.0, 0.0)};

  CHECK(visual_saliency(ScalarField(1, 1, 0.0), measures, stats, 0.5)[0] == 0.0);
  CHECK(visual_saliency(ScalarField(1, 1, 0.25), measures, stats, 0.5)[0] == doctest::Approx(2.0).epsilon(1e-15));

  // Every weight floors at 0.5.
  const auto unit = flow_measures(single(1, 1));
  std::array<SourceStats, kFlowComponents> zero{stats_with(1, 1, 0.0, 0.0), stats_with(1, 1, 0.0, 0.0),
                                                stats_with(1, 1, std::sqrt(2.0) - 1.0, 0.0),
                                                stats_with(1, 1, std::numbers::pi / 4 - 1.0, 0.0)};
  CHECK(visual_saliency(ScalarField(1, 1, 1.0), unit, zero, 1.0)[0] == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS(visual_saliency(ScalarField(2, 1, 1.0), unit, zero, 1.0));
}

TEST_CASE("visual_saliency is monotone in the saliency map") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<float> fl(-5, 5);
  std::uniform_real_distribution<double> u01(0, 1);
  FlowField flow(6, 5);
  for (std::size_t p = 0; p < flow.size(); ++p) {
    flow.u[p] = fl(rng);
    flow.v[p] = fl(rng);
  }
  const auto m = flow_measures(flow);
  std::array<SourceStats, kFlowComponents> s;
  for (std::size_t c = 0; c < kFlowComponents; ++c) s[c] = analyze_source(m.fields[c]);
  ScalarField lo(6, 5), hi(6, 5), one(6, 5, 1.0);
  for (std::size_t p = 0; p < lo.size(); ++p) {
    lo[p] = u01(rng);
    hi[p] = std::min(1.0, lo[p] + u01(rng) * 0.3);
  }
  for (double k : {1.0, 0.5, 1.0 / 3.0}) {
    const auto a = visual_saliency(lo, m, s, k);
    const auto b = visual_saliency(hi, m, s, k);
    for (std::size_t p = 0; p < a.size(); ++p) CHECK(a[p] <= b[p]);
  }
  // k = 1 with unit saliency is the weighted deviation sum itself.
  const auto full = visual_saliency(one, m, s, 1.0);
  for (std::size_t p = 0; p < full.size(); ++p) {
    double sum = 0;
    for (std::size_t c = 0; c < kFlowComponents; ++c) {
      sum += std::max(s[c].scale.alpha, 0.5) * std::abs(m.fields[c][p] - s[c].q.q2);
    }
    CHECK(full[p] == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("foregroundness sums the measures") {
  std::vector<ScalarField> terms(7, ScalarField(2, 1));
  CHECK(foregroundness(terms) == ScalarField(2, 1));
  terms[0][0] = 1;
  terms[4][0] = 2;
  CHECK(foregroundness(terms)[0] == 3);
  std::swap(terms[0], terms[6]);
  std::swap(terms[4], terms[1]);
  CHECK(foregroundness(terms)[0] == 3);
  CHECK_THROWS(foregroundness(std::vector<ScalarField>{}));
}

TEST_CASE("threshold_mask") {
  const ScalarField f = field_from(4, 1, {0, 0, 0, 1});
  CHECK(threshold_mask(f).values == std::vector<std::uint8_t>{0, 0, 0, 1});

  CHECK(count_foreground(threshold_mask(ScalarField(3, 3, 2.0))) == 0);

  const ScalarField g = field_from(4, 1, {0, 0, 0.4, 1});
  const BinaryMask prev = mask_from(4, 1, {0, 0, 1, 1});
  CHECK(threshold_mask(g, &prev).values == std::vector<std::uint8_t>{0, 0, 1, 1});
  CHECK(threshold_mask(g).values == std::vector<std::uint8_t>{0, 0, 0, 1});

  const BinaryMask wrong(2, 2);
  CHECK_THROWS(threshold_mask(g, &wrong));
}

TEST_CASE("discount never removes pixels") {
  std::mt19937 rng(8);
  std::exponential_distribution<double> e(1.0);
  for (int i = 0; i < 200; ++i) {
    ScalarField f(8, 6);
    for (auto& v : f.values) v = e(rng);
    const BinaryMask prev = fixtures::random_mask(rng, 8, 6, 0.3);
    const BinaryMask plain = threshold_mask(f);
    const BinaryMask disc = threshold_mask(f, &prev);
    for (std::size_t p = 0; p < f.size(); ++p) REQUIRE(disc[p] >= plain[p]);
  }
}

TEST_CASE("select_top_segments") {
  // Two components: left column block (f-sum 5) and right block (f-sum 3).
  const BinaryMask m = mask_from(4, 4, {1, 0, 0, 1,  //
                                        1, 0, 0, 1,  //
                                        0, 0, 0, 1,  //
                                        0, 0, 0, 0});
  ScalarField f = field_from(4, 4, {2, 0, 0, 1,  //
                                    3, 0, 0, 1,  //
                                    0, 0, 0, 1,  //
                                    0, 0, 0, 0});
  const BinaryMask top = select_top_segments(m, f, 1);
  CHECK(top.values == std::vector<std::uint8_t>{1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  CHECK(select_top_segments(m, f, 2) == m);

  const BinaryMask one = mask_from(3, 3, {0, 1, 0, 1, 1, 1, 0, 1, 0});
  CHECK(select_top_segments(one, ScalarField(3, 3, 1.0), 1) == one);
  CHECK(select_top_segments(BinaryMask(3, 3), ScalarField(3, 3), 1) == BinaryMask(3, 3));

  // Equal sums: the larger component wins, then the earlier one.
  const BinaryMask tie = mask_from(5, 1, {1, 0, 1, 1, 0});
  f = field_from(5, 1, {2, 0, 1, 1, 0});
  CHECK(select_top_segments(tie, f, 1).values == std::vector<std::uint8_t>{0, 0, 1, 1, 0});
  f = field_from(5, 1, {1, 0, 1, 0, 0});
  const BinaryMask tie2 = mask_from(5, 1, {1, 0, 1, 0, 0});
  CHECK(select_top_segments(tie2, f, 1).values == std::vector<std::uint8_t>{1, 0, 0, 0, 0});
}

TEST_CASE("connectivity") {
  const BinaryMask diag = mask_from(2, 2, {1, 0, 0, 1});
  CHECK(connected_components(diag, 8).count == 1);
  CHECK(connected_components(diag, 4).count == 2);
  CHECK_THROWS(connected_components(diag, 6));
}

TEST_CASE("top segment output has at most one component") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const BinaryMask m = fixtures::random_mask(rng, 10, 7, 0.35);
    ScalarField f(10, 7);
    for (auto& v : f.values) v = u(rng);
    REQUIRE(connected_components(select_top_segments(m, f, 1)).count <= 1);
    REQUIRE(connected_components(select_top_segments(m, f, 2)).count <= 2);
  }
}

TEST_CASE("frame evidence matches the step-by-step oracle") {
  std::mt19937 rng(31);
  std::normal_distribution<float> bg(0.5f, 0.3f);
  std::uniform_real_distribution<double> sal(0, 1);
  for (int i = 0; i < 40; ++i) {
    FlowField flow(12, 9);
    ScalarField s(12, 9);
    const int bx = i % 6;
    for (int y = 0; y < 9; ++y) {
      for (int x = 0; x < 12; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * 12 + x;
        const bool obj = x >= bx && x < bx + 3 && y >= 2 && y < 5;
        flow.u[p] = obj ? 6.0f + bg(rng) : bg(rng);
        flow.v[p] = obj ? -3.0f : bg(rng) * 0.2f;
        s[p] = sal(rng);
      }
    }
    const auto ev = frame_evidence(flow, s, Tis0Config{});
    const auto ref = oracle::tis0_foregroundness(flow, s);
    for (std::size_t p = 0; p < ref.size(); ++p) REQUIRE(std::abs(ev.foregroundness[p] - ref[p]) <= 1e-9);
    for (double v : ev.foregroundness.values) REQUIRE(v >= 0.0);
  }
}

TEST_CASE("run_tis0 on the moving block") {
  const FrameSequence seq = block_sequence(1);
  const Tis0Result r = run_tis0(seq);
  REQUIRE(r.masks.size() == 1);
  CHECK(r.masks[0] == fixtures::block_mask());
  CHECK(jaccard(r.masks[0], fixtures::block_mask()) == 1.0);
  // x and magnitude see the block as outliers but carry too little of the
  // total flow to pass the 0.5 gate.
  CHECK(r.reports[0][0].outlier_count == 100);
  CHECK(r.reports[0][0].alpha == doctest::Approx(800.0 / (800.0 + 2972.0)));
  CHECK(r.reports[0][1].alpha == 0.0);

  const Tis0Result triple = run_tis0(block_sequence(3));
  for (const auto& m : triple.masks) CHECK(m == fixtures::block_mask());
}

TEST_CASE("run_tis0 edge cases") {
  FrameSequence still;
  still.name = "still";
  still.frame_count = 2;
  still.width = 5;
  still.height = 4;
  still.flow.push_back(FlowField(5, 4));
  still.saliency.assign(2, ScalarField(5, 4));
  for (const auto& m : run_tis0(still).masks) CHECK(count_foreground(m) == 0);

  FrameSequence no_sal = block_sequence(2);
  no_sal.saliency.pop_back();
  CHECK_THROWS_WITH(run_tis0(no_sal), doctest::Contains("saliency for frame 1"));
  FrameSequence no_flow = block_sequence(2);
  no_flow.flow.clear();
  CHECK_THROWS_WITH(run_tis0(no_flow), doctest::Contains("flow"));

  Tis0Config bad;
  bad.connectivity = 5;
  CHECK_THROWS(run_tis0(block_sequence(1), bad));
}

TEST_CASE("run_tis0 is deterministic across job counts") {
  std::mt19937 rng(12);
  std::normal_distribution<float> n(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  FrameSequence seq;
  seq.name = "noise";
  seq.width = 20;
  seq.height = 15;
  seq.frame_count = 6;
  for (int t = 0; t < 6; ++t) {
    FlowField f(20, 15);
    for (std::size_t p = 0; p < f.size(); ++p) {
      f.u[p] = n(rng) + ((p % 20) > 12 ? 4.0f : 0.0f);
      f.v[p] = n(rng);
    }
    seq.flow.push_back(f);
    ScalarField s(20, 15);
    for (auto& v : s.values) v = u(rng);
    seq.saliency.push_back(s);
  }
  const auto a = run_tis0(seq, {}, 1);
  const auto b = run_tis0(seq, {}, 8);
  CHECK(a.masks == b.masks);
  CHECK(a.foregroundness == b.foregroundness);
}
