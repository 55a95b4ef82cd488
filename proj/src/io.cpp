/* Copyright 2026 The RING Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "ring/io.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "ring/error.hpp"

namespace ring {
namespace {

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes_.insert(bytes_.end(), b, b + n);
  }
  void crc_since(std::size_t start) {
    u32(crc32(std::span<const std::uint8_t>(bytes_).subspan(start)));
  }
  std::size_t size() const { return bytes_.size(); }
  void patch_u32(std::size_t at, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) bytes_[at + k] = static_cast<std::uint8_t>(v >> (8 * k));
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> b, ErrorCode short_read) : b_(b), short_read_(short_read) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return b_.size() - pos_; }
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) fail(short_read_, std::string("truncated data while reading ") + what);
  }
  std::uint32_t u32() {
    need(4, "u32");
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b_[pos_ + k]) << (8 * k);
    pos_ += 4;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64() {
    need(8, "u64");
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b_[pos_ + k]) << (8 * k);
    pos_ += 8;
    return v;
  }
  double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n, "bytes");
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
  ErrorCode short_read_;
};

void check_magic(Reader& r, const char* magic, std::uint32_t version, const char* what) {
  if (r.remaining() < 12) fail(ErrorCode::kFormat, std::string(what) + ": file too short for header");
  const auto m = r.bytes(8);
  if (std::memcmp(m.data(), magic, 8) != 0) fail(ErrorCode::kFormat, std::string(what) + ": bad magic");
  const std::uint32_t v = r.u32();
  if (v != version)
    fail(ErrorCode::kFormat, std::string(what) + ": unsupported version " + std::to_string(v));
}

// Fixed part of a dataset chunk payload before the per-body parent entries.
constexpr std::size_t kChunkFixed = 4 + 4 + 8;

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    c = ::crc32(c, bytes.data() + off, n);
    off += n;
  }
  return static_cast<std::uint32_t>(c);
}

std::vector<std::uint8_t> encode_dataset(std::span<const TrainingPair> pairs) {
  Writer w;
  w.raw(kDatasetMagic, 8);
  w.u32(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(pairs.size()));
  w.crc_since(0);
  for (const auto& p : pairs) {
    if (p.X.size() != p.T * p.N * kChannels || p.Y.size() != p.T * p.N || p.lambda.size() != p.N)
      fail(ErrorCode::kInvalidArgument, "write_dataset: malformed training pair");
    const std::size_t len_at = w.size();
    w.u32(0);
    const std::size_t start = w.size();
    w.u32(static_cast<std::uint32_t>(p.N));
    w.u32(static_cast<std::uint32_t>(p.T));
    w.f64(p.F);
    for (int parent : p.lambda.parents) w.i32(parent);
    for (double x : p.X) w.f32(x);
    for (const Quat& q : p.Y) {
      w.f32(q.w);
      w.f32(q.x);
      w.f32(q.y);
      w.f32(q.z);
    }
    const std::size_t len = w.size() - start;
    if (len > std::numeric_limits<std::uint32_t>::max())
      fail(ErrorCode::kInvalidArgument, "write_dataset: sequence too large for one chunk");
    w.patch_u32(len_at, static_cast<std::uint32_t>(len));
    w.crc_since(start);
  }
  return w.take();
}

std::vector<TrainingPair> decode_dataset(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, ErrorCode::kChecksum);
  check_magic(r, kDatasetMagic, kDatasetVersion, "read_dataset");
  const std::uint32_t count = r.u32();
  const std::uint32_t header_crc = r.u32();
  if (header_crc != crc32(bytes.subspan(0, 16)))
    fail(ErrorCode::kChecksum, "read_dataset: header checksum mismatch");
  // Every chunk needs at least its length, fixed fields and CRC.
  if (count > r.remaining() / (4 + kChunkFixed + 4))
    fail(ErrorCode::kChecksum, "read_dataset: sequence count exceeds file size (truncated?)");

  std::vector<TrainingPair> out;
  out.reserve(count);
  for (std::uint32_t s = 0; s < count; ++s) {
    const std::string where = "read_dataset: sequence " + std::to_string(s);
    const std::uint32_t len = r.u32();
    if (static_cast<std::size_t>(len) + 4 > r.remaining())
      fail(ErrorCode::kChecksum, where + ": truncated chunk");
    const auto payload = r.bytes(len);
    const std::uint32_t crc = r.u32();
    if (crc != crc32(payload)) fail(ErrorCode::kChecksum, where + ": checksum mismatch");

    Reader c(payload, ErrorCode::kInvariant);
    TrainingPair p;
    p.N = c.u32();
    p.T = c.u32();
    p.F = c.f64();
    if (p.N == 0 || p.N > len || p.T > len || p.T * p.N > len ||
        kChunkFixed + 4 * p.N + 4 * p.T * p.N * (kChannels + 4) != len)
      fail(ErrorCode::kInvariant, where + ": chunk length does not match N, T");
    p.lambda.parents.resize(p.N);
    for (auto& parent : p.lambda.parents) parent = c.i32();
    if (check_parent_array(p.lambda) != ParentArrayFault::kNone)
      fail(ErrorCode::kInvariant, where + ": invalid parent array");
    if (!(p.F > 0.0) || !std::isfinite(p.F)) fail(ErrorCode::kInvariant, where + ": invalid sampling rate");
    p.X.resize(p.T * p.N * kChannels);
    for (double& x : p.X) x = c.f32();
    p.Y.resize(p.T * p.N);
    for (Quat& q : p.Y) {
      q.w = c.f32();
      q.x = c.f32();
      q.y = c.f32();
      q.z = c.f32();
    }
    const float inv_rate = static_cast<float>(1.0 / p.F);
    for (std::size_t t = 0; t < p.T; ++t) {
      for (std::size_t i = 0; i < p.N; ++i) {
        const std::string at = where + ", timestep " + std::to_string(t) + ", body " + std::to_string(i + 1);
        for (std::size_t ch = 0; ch < kChannels; ++ch)
          if (!std::isfinite(p.x(t, i, ch))) fail(ErrorCode::kInvariant, at + ": non-finite input");
        if (p.x(t, i, kInverseRateChannel) != static_cast<double>(inv_rate))
          fail(ErrorCode::kInvariant, at + ": channel 9 is not 1/F");
        const double n = p.y(t, i).norm();
        if (!(std::abs(n - 1.0) <= 1e-6))
          fail(ErrorCode::kInvariant, at + ": target quaternion is not unit norm");
      }
    }
    out.push_back(std::move(p));
  }
  if (r.remaining() != 0) fail(ErrorCode::kFormat, "read_dataset: trailing bytes after last sequence");
  return out;
}

void write_dataset(const std::string& path, std::span<const TrainingPair> pairs) {
  write_file(path, encode_dataset(pairs));
}

std::vector<TrainingPair> read_dataset(const std::string& path) { return decode_dataset(read_file(path)); }

std::vector<std::uint8_t> encode_weights(const RingParams& params) {
  if (!params.all_finite()) fail(ErrorCode::kNonFinite, "write_weights: parameters are not finite");
  Writer w;
  w.raw(kWeightsMagic, 8);
  w.u32(kWeightsVersion);
  w.u32(static_cast<std::uint32_t>(params.hidden()));
  w.u32(static_cast<std::uint32_t>(params.message()));
  w.u32(static_cast<std::uint32_t>(params.layout().size()));
  for (const auto& t : params.layout()) {
    w.u32(static_cast<std::uint32_t>(t.name.size()));
    w.raw(t.name.data(), t.name.size());
    w.u32(static_cast<std::uint32_t>(t.rows));
    w.u32(static_cast<std::uint32_t>(t.cols));
    for (std::size_t k = 0; k < t.rows * t.cols; ++k) w.f32(params.values()[t.offset + k]);
  }
  w.crc_since(0);
  return w.take();
}

RingParams decode_weights(std::span<const std::uint8_t> bytes, std::size_t expected_hidden,
                          std::size_t expected_message) {
  Reader r(bytes, ErrorCode::kChecksum);
  check_magic(r, kWeightsMagic, kWeightsVersion, "read_weights");
  if (bytes.size() < 16) fail(ErrorCode::kChecksum, "read_weights: truncated file");
  const std::uint32_t stored_crc = Reader(bytes.subspan(bytes.size() - 4), ErrorCode::kChecksum).u32();
  if (stored_crc != crc32(bytes.subspan(0, bytes.size() - 4)))
    fail(ErrorCode::kChecksum, "read_weights: checksum mismatch");

  const std::size_t H = r.u32();
  const std::size_t M = r.u32();
  const std::uint32_t tensors = r.u32();
  if ((expected_hidden != 0 && H != expected_hidden) || (expected_message != 0 && M != expected_message))
    fail(ErrorCode::kShapeMismatch, "read_weights: file holds H=" + std::to_string(H) + ", M=" +
                                        std::to_string(M) + " but H=" + std::to_string(expected_hidden) +
                                        ", M=" + std::to_string(expected_message) + " was requested");
  // Guard the allocation below against absurd widths.
  if (H == 0 || RingParams::count(H, M) > bytes.size())
    fail(ErrorCode::kShapeMismatch, "read_weights: widths inconsistent with file size");
  RingParams p(H, M);
  if (tensors != p.layout().size())
    fail(ErrorCode::kShapeMismatch, "read_weights: unexpected tensor count " + std::to_string(tensors));
  for (const auto& t : p.layout()) {
    const std::uint32_t name_len = r.u32();
    const auto name = r.bytes(name_len);
    const std::string got(name.begin(), name.end());
    if (got != t.name) fail(ErrorCode::kShapeMismatch, "read_weights: expected tensor '" + t.name + "', found '" + got + "'");
    const std::size_t rows = r.u32();
    const std::size_t cols = r.u32();
    if (rows != t.rows || cols != t.cols)
      fail(ErrorCode::kShapeMismatch, "read_weights: tensor '" + t.name + "' has shape " + std::to_string(rows) +
                                          "x" + std::to_string(cols));
    r.need(4 * rows * cols, "tensor data");
    for (std::size_t k = 0; k < rows * cols; ++k) p.values()[t.offset + k] = r.f32();
  }
  if (r.remaining() != 4) fail(ErrorCode::kFormat, "read_weights: unexpected trailing bytes");
  if (!p.all_finite()) fail(ErrorCode::kInvariant, "read_weights: non-finite weights");
  return p;
}

void write_weights(const std::string& path, const RingParams& params) {
  write_file(path, encode_weights(params));
}

RingParams read_weights(const std::string& path, std::size_t expected_hidden, std::size_t expected_message) {
  return decode_weights(read_file(path), expected_hidden, expected_message);
}

RingParams round_to_storage(const RingParams& params) {
  RingParams out = params;
  for (double& v : out.values()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

TrainingPair round_to_storage(const TrainingPair& pair) {
  TrainingPair out = pair;
  for (double& v : out.X) v = static_cast<double>(static_cast<float>(v));
  for (Quat& q : out.Y)
    q = {static_cast<double>(static_cast<float>(q.w)), static_cast<double>(static_cast<float>(q.x)),
         static_cast<double>(static_cast<float>(q.y)), static_cast<double>(static_cast<float>(q.z))};
  return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIo, "error reading '" + path + "'");
  return bytes;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "error writing '" + path + "'");
}

}  // namespace ring
