#include <doctest.h>

#include "fixtures.hpp"
#include "tis/sequence.hpp"

using namespace tis;
namespace fs = std::filesystem;

TEST_CASE("open_sequence binds frames, flow, saliency and labels") {
  fixtures::TempDir dir;
  const auto video = dir / "block";
  fixtures::write_block_sequence(video, 10);
  const FrameSequence seq = open_sequence(video);
  CHECK(seq.name == "block");
  CHECK(seq.frame_count == 10);
  CHECK(seq.width == fixtures::kBlockWidth);
  CHECK(seq.height == fixtures::kBlockHeight);
  CHECK(seq.flow.size() == 9);
  CHECK(seq.saliency.size() == 10);
  CHECK(seq.labels.size() == 10);
  // The last frame reuses flow 8.
  CHECK(&seq.flow_at(9) == &seq.flow[8]);
  CHECK(&seq.flow_at(3) == &seq.flow[3]);
  CHECK_THROWS(seq.flow_at(10));
}

TEST_CASE("open_sequence errors") {
  fixtures::TempDir dir;
  SUBCASE("empty directory") {
    CHECK_THROWS_WITH(open_sequence(dir.path()), doctest::Contains("empty sequence"));
  }
  SUBCASE("missing directory") {
    CHECK_THROWS(open_sequence(dir / "nope"));
  }
  SUBCASE("gap in frames") {
    fs::create_directories(dir / "frames");
    for (int i : {0, 1, 3}) write_ppm(dir / "frames" / frame_filename(i, "ppm"), RgbImage(2, 2));
    CHECK_THROWS_WITH(open_sequence(dir.path()), doctest::Contains("gap at index 2"));
  }
  SUBCASE("dimension mismatch names the file") {
    fs::create_directories(dir / "frames");
    write_ppm(dir / "frames" / frame_filename(0, "ppm"), RgbImage(2, 2));
    write_ppm(dir / "frames" / frame_filename(1, "ppm"), RgbImage(3, 2));
    CHECK_THROWS_WITH(open_sequence(dir.path()), doctest::Contains("00001.ppm"));
  }
  SUBCASE("flow count must be T or T-1") {
    fixtures::write_block_sequence(dir / "v", 4);
    fs::remove(dir / "v" / "flow" / frame_filename(1, "flo"));
    CHECK_THROWS_WITH(open_sequence(dir / "v"), doctest::Contains("gap at index 1"));
    fs::remove(dir / "v" / "flow" / frame_filename(2, "flo"));
    CHECK_THROWS_WITH(open_sequence(dir / "v"), doctest::Contains("mismatched frame counts"));
  }
}

TEST_CASE("mask directories and method masks") {
  fixtures::TempDir dir;
  std::vector<BinaryMask> masks{BinaryMask(3, 2, 1), BinaryMask(3, 2, 0)};
  write_mask_directory(dir / "masks" / "a", masks);
  write_mask_directory(dir / "masks" / "b", masks);
  CHECK(read_mask_directory(dir / "masks" / "a") == masks);
  const FrameSequence seq = open_sequence(dir.path());
  CHECK(seq.frame_count == 2);
  CHECK(seq.masks.size() == 2);
  CHECK(seq.masks.at("b") == masks);

  write_mask(dir / "masks" / "b" / frame_filename(2, "pgm"), BinaryMask(3, 2));
  CHECK_THROWS_WITH(open_sequence(dir.path()), doctest::Contains("mismatched frame counts"));
}
