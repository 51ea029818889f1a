/*
 * Copyright 2026 The vrise Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vrise/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "vrise/half.hpp"

namespace vrise {
namespace {

constexpr char kMagic[4] = {'V', 'R', 'S', 'E'};
constexpr std::size_t kHeaderBytes = 20;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<std::byte>(v)); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) u8(static_cast<std::uint8_t>(v >> s));
  }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::byte*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  std::vector<std::byte> take() { return std::move(out_); }

 private:
  std::vector<std::byte> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> in) : in_(in) {}
  void need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n) {
      throw ArchiveError(ArchiveError::Kind::kTruncated,
                         std::string("archive truncated in ") + what);
    }
  }
  std::uint8_t u8() {
    need(1, "header");
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint16_t u16() {
    const std::uint16_t lo = u8();
    return static_cast<std::uint16_t>(lo | (u8() << 8));
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int s = 0; s < 32; s += 8) v |= static_cast<std::uint32_t>(u8()) << s;
    return v;
  }
  std::span<const std::byte> take(std::size_t n, const char* what) {
    need(n, what);
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::byte> encode_archive(std::span<const Image> planes,
                                      StorageDtype dtype,
                                      const nlohmann::json& metadata) {
  const std::uint32_t h = planes.empty() ? 0 : planes.front().height();
  const std::uint32_t w = planes.empty() ? 0 : planes.front().width();
  for (const Image& p : planes) {
    if (p.channels() != 1 || static_cast<std::uint32_t>(p.height()) != h ||
        static_cast<std::uint32_t>(p.width()) != w) {
      throw std::invalid_argument(
          "encode_archive: planes must be single-channel with equal shapes");
    }
  }

  nlohmann::json meta = metadata.is_object() ? metadata : nlohmann::json::object();
  meta["precision"] = dtype == StorageDtype::kF16 ? "fp16" : "fp32";
  meta["count"] = planes.size();
  meta["height"] = h;
  meta["width"] = w;

  Writer out;
  out.bytes(kMagic, 4);
  out.u8(kArchiveVersion);
  out.u8(static_cast<std::uint8_t>(dtype));
  out.u16(0);
  out.u32(static_cast<std::uint32_t>(planes.size()));
  out.u32(h);
  out.u32(w);
  for (const Image& p : planes) {
    for (float v : p.data()) {
      if (dtype == StorageDtype::kF16) {
        out.u16(float_to_half(v));
      } else {
        out.u32(std::bit_cast<std::uint32_t>(v));
      }
    }
  }
  const std::string text = meta.dump();
  out.u32(static_cast<std::uint32_t>(text.size()));
  out.bytes(text.data(), text.size());
  return out.take();
}

Archive decode_archive(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ArchiveError(ArchiveError::Kind::kBadMagic, "not a VRSE archive");
  }
  Reader in(bytes);
  in.take(4, "magic");
  if (bytes.size() < kHeaderBytes) {
    throw ArchiveError(ArchiveError::Kind::kTruncated, "archive header truncated");
  }
  const std::uint8_t version = in.u8();
  if (version != kArchiveVersion) {
    throw ArchiveError(ArchiveError::Kind::kVersionMismatch,
                       "unsupported archive version " + std::to_string(version));
  }
  const std::uint8_t dtype_raw = in.u8();
  if (dtype_raw > 1) {
    throw ArchiveError(ArchiveError::Kind::kCorrupt,
                       "unknown dtype " + std::to_string(dtype_raw));
  }
  in.u16();
  const std::uint32_t count = in.u32();
  const std::uint32_t h = in.u32();
  const std::uint32_t w = in.u32();

  Archive out;
  out.dtype = static_cast<StorageDtype>(dtype_raw);
  const std::size_t value_bytes = out.dtype == StorageDtype::kF16 ? 2 : 4;
  // In double so that a hostile header cannot overflow the size check.
  if (static_cast<double>(count) * h * w * static_cast<double>(value_bytes) >
      static_cast<double>(in.remaining())) {
    throw ArchiveError(ArchiveError::Kind::kTruncated, "archive payload truncated");
  }
  if (count > 0 && (h == 0 || w == 0)) {
    throw ArchiveError(ArchiveError::Kind::kCorrupt, "archive has empty planes");
  }
  out.planes.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Image plane(static_cast<int>(h), static_cast<int>(w), 1);
    for (float& v : plane.data()) {
      if (out.dtype == StorageDtype::kF16) {
        v = half_to_float(in.u16());
      } else {
        v = std::bit_cast<float>(in.u32());
      }
    }
    out.planes.push_back(std::move(plane));
  }
  if (in.remaining() < 4) {
    throw ArchiveError(ArchiveError::Kind::kTruncated, "archive metadata missing");
  }
  const std::uint32_t meta_len = in.u32();
  const auto meta_bytes = in.take(meta_len, "metadata");
  out.metadata = nlohmann::json::parse(
      reinterpret_cast<const char*>(meta_bytes.data()),
      reinterpret_cast<const char*>(meta_bytes.data()) + meta_bytes.size(),
      nullptr, false);
  if (out.metadata.is_discarded() || !out.metadata.is_object()) {
    throw ArchiveError(ArchiveError::Kind::kCorrupt, "archive metadata is not JSON");
  }
  if (in.remaining() != 0) {
    throw ArchiveError(ArchiveError::Kind::kCorrupt, "trailing bytes after metadata");
  }
  return out;
}

void store_archive(const std::filesystem::path& path,
                   std::span<const Image> planes, StorageDtype dtype,
                   const nlohmann::json& metadata) {
  const auto bytes = encode_archive(planes, dtype, metadata);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ArchiveError(ArchiveError::Kind::kIo,
                       "cannot write archive " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw ArchiveError(ArchiveError::Kind::kIo,
                       "short write to archive " + path.string());
  }
}

Archive load_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ArchiveError(ArchiveError::Kind::kIo,
                       "cannot open archive " + path.string());
  }
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  return decode_archive(std::as_bytes(std::span(raw)));
}

Image storage_round_trip(const Image& image, StorageDtype dtype) {
  Image out = image;
  if (dtype == StorageDtype::kF16) round_to_half(out.data());
  return out;
}

}  // namespace vrise
