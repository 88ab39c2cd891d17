#include "tis/raster_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

namespace tis {
namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

std::uint32_t load_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_le32(Bytes& out, std::uint32_t w) {
  out.push_back(static_cast<std::uint8_t>(w));
  out.push_back(static_cast<std::uint8_t>(w >> 8));
  out.push_back(static_cast<std::uint8_t>(w >> 16));
  out.push_back(static_cast<std::uint8_t>(w >> 24));
}

float load_le_float(const std::uint8_t* p) { return std::bit_cast<float>(load_le32(p)); }

struct NetpbmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t payload_offset = 0;
};

// Parses "<magic> <width> <height> <maxval>" followed by exactly one
// whitespace byte. '#' comments are skipped as netpbm allows.
NetpbmHeader parse_netpbm(std::span<const std::uint8_t> bytes, const char* magic) {
  if (bytes.size() < 2 || bytes[0] != static_cast<std::uint8_t>(magic[0]) ||
      bytes[1] != static_cast<std::uint8_t>(magic[1])) {
    throw Error(std::string("bad magic: expected ") + magic);
  }
  std::size_t pos = 2;
  auto read_int = [&](const char* field) {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
      throw Error(std::string("malformed header: missing ") + field);
    }
    long long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1'000'000'000) throw Error(std::string("malformed header: ") + field + " too large");
      ++pos;
    }
    return static_cast<int>(v);
  };
  NetpbmHeader h;
  h.width = read_int("width");
  h.height = read_int("height");
  h.maxval = read_int("maxval");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw Error("malformed header: missing separator before raster data");
  }
  h.payload_offset = pos + 1;
  if (h.width <= 0 || h.height <= 0) throw Error("non-positive dimensions");
  if (h.maxval <= 0 || h.maxval > 65535) throw Error("maxval out of range");
  return h;
}

std::span<const std::uint8_t> payload(std::span<const std::uint8_t> bytes, const NetpbmHeader& h,
                                      std::size_t bytes_per_pixel) {
  const std::size_t need = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height) *
                           bytes_per_pixel;
  const std::size_t have = bytes.size() - h.payload_offset;
  if (have < need) throw Error("truncated raster data");
  if (have > need) throw Error("trailing bytes after raster data");
  return bytes.subspan(h.payload_offset, need);
}

Bytes netpbm_header(const char* magic, int width, int height, int maxval) {
  const std::string s = std::string(magic) + "\n" + std::to_string(width) + " " +
                        std::to_string(height) + "\n" + std::to_string(maxval) + "\n";
  return Bytes(s.begin(), s.end());
}

NetpbmHeader parse_pgm8(std::span<const std::uint8_t> bytes) {
  NetpbmHeader h = parse_netpbm(bytes, "P5");
  if (h.maxval > 255) throw Error("maxval " + std::to_string(h.maxval) + " exceeds 8-bit range");
  return h;
}

template <typename Decode>
auto with_path(const std::filesystem::path& path, Decode&& decode) {
  const Bytes bytes = read_file(path);
  try {
    return decode(bytes);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace

FlowField decode_flo(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || load_le_float(bytes.data()) != kFloSentinel) throw Error("not a flo file");
  if (bytes.size() < 12) throw Error("truncated flow");
  const auto w = static_cast<std::int32_t>(load_le32(bytes.data() + 4));
  const auto h = static_cast<std::int32_t>(load_le32(bytes.data() + 8));
  if (w <= 0 || h <= 0) throw Error("non-positive flow dimensions");
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const std::size_t remaining = bytes.size() - 12;
  if (remaining / 8 < n) throw Error("truncated flow");
  if (remaining != n * 8) throw Error("trailing bytes after flow data");

  FlowField flow(w, h);
  const std::uint8_t* p = bytes.data() + 12;
  for (std::size_t i = 0; i < n; ++i, p += 8) {
    flow.u[i] = load_le_float(p);
    flow.v[i] = load_le_float(p + 4);
    if (!std::isfinite(flow.u[i]) || !std::isfinite(flow.v[i])) throw Error("non-finite flow value");
  }
  return flow;
}

Bytes encode_flo(const FlowField& flow) {
  if (flow.width <= 0 || flow.height <= 0) throw Error("non-positive flow dimensions");
  Bytes out;
  out.reserve(12 + flow.size() * 8);
  store_le32(out, std::bit_cast<std::uint32_t>(kFloSentinel));
  store_le32(out, static_cast<std::uint32_t>(flow.width));
  store_le32(out, static_cast<std::uint32_t>(flow.height));
  for (std::size_t i = 0; i < flow.size(); ++i) {
    store_le32(out, std::bit_cast<std::uint32_t>(flow.u[i]));
    store_le32(out, std::bit_cast<std::uint32_t>(flow.v[i]));
  }
  return out;
}

BinaryMask decode_pgm_mask(std::span<const std::uint8_t> bytes) {
  const NetpbmHeader h = parse_pgm8(bytes);
  const auto data = payload(bytes, h, 1);
  BinaryMask mask(h.width, h.height);
  for (std::size_t i = 0; i < data.size(); ++i) mask[i] = data[i] > 127 ? 1 : 0;
  return mask;
}

Bytes encode_pgm_mask(const BinaryMask& mask) {
  Bytes out = netpbm_header("P5", mask.width, mask.height, 255);
  out.reserve(out.size() + mask.size());
  for (auto l : mask.values) out.push_back(l ? 255 : 0);
  return out;
}

ScalarField decode_pgm_scalar(std::span<const std::uint8_t> bytes) {
  const NetpbmHeader h = parse_pgm8(bytes);
  const auto data = payload(bytes, h, 1);
  ScalarField field(h.width, h.height);
  for (std::size_t i = 0; i < data.size(); ++i) field[i] = data[i] / 255.0;
  return field;
}

Bytes encode_pgm_scalar(const ScalarField& field) {
  Bytes out = netpbm_header("P5", field.width, field.height, 255);
  out.reserve(out.size() + field.size());
  for (double v : field.values) {
    if (!std::isfinite(v)) throw Error("non-finite saliency value");
    out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  return out;
}

LabelMap decode_pgm16(std::span<const std::uint8_t> bytes) {
  const NetpbmHeader h = parse_netpbm(bytes, "P5");
  if (h.maxval != 65535) throw Error("expected 16-bit PGM with maxval 65535");
  const std::size_t have = bytes.size() - h.payload_offset;
  if (have % 2 != 0) throw Error("truncated label data: odd payload byte count");
  const auto data = payload(bytes, h, 2);
  LabelMap labels(h.width, h.height);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<std::uint32_t>(data[2 * i]) << 8 | data[2 * i + 1];
  }
  return labels;
}

Bytes encode_pgm16(const LabelMap& labels) {
  Bytes out = netpbm_header("P5", labels.width, labels.height, 65535);
  out.reserve(out.size() + labels.size() * 2);
  for (auto id : labels.values) {
    if (id > 65535) throw Error("label id " + std::to_string(id) + " exceeds 16 bits");
    out.push_back(static_cast<std::uint8_t>(id >> 8));
    out.push_back(static_cast<std::uint8_t>(id));
  }
  return out;
}

RgbImage decode_ppm(std::span<const std::uint8_t> bytes) {
  const NetpbmHeader h = parse_netpbm(bytes, "P6");
  if (h.maxval != 255) throw Error("expected 24-bit PPM with maxval 255");
  const auto data = payload(bytes, h, 3);
  RgbImage image(h.width, h.height);
  std::copy(data.begin(), data.end(), image.rgb.begin());
  return image;
}

Bytes encode_ppm(const RgbImage& image) {
  Bytes out = netpbm_header("P6", image.width, image.height, 255);
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error("read error on " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write error on " + path.string());
}

FlowField read_flo(const std::filesystem::path& path) {
  return with_path(path, [](const Bytes& b) { return decode_flo(b); });
}
BinaryMask read_mask(const std::filesystem::path& path) {
  return with_path(path, [](const Bytes& b) { return decode_pgm_mask(b); });
}
ScalarField read_saliency(const std::filesystem::path& path) {
  return with_path(path, [](const Bytes& b) { return decode_pgm_scalar(b); });
}
LabelMap read_labels(const std::filesystem::path& path) {
  return with_path(path, [](const Bytes& b) { return decode_pgm16(b); });
}
RgbImage read_ppm(const std::filesystem::path& path) {
  return with_path(path, [](const Bytes& b) { return decode_ppm(b); });
}

void write_flo(const std::filesystem::path& path, const FlowField& flow) { write_file(path, encode_flo(flow)); }
void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  write_file(path, encode_pgm_mask(mask));
}
void write_saliency(const std::filesystem::path& path, const ScalarField& field) {
  write_file(path, encode_pgm_scalar(field));
}
void write_labels(const std::filesystem::path& path, const LabelMap& labels) {
  write_file(path, encode_pgm16(labels));
}
void write_ppm(const std::filesystem::path& path, const RgbImage& image) { write_file(path, encode_ppm(image)); }

}  // namespace tis
