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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <span>
#include <stdexcept>
#include <vector>

#include "vrise/image.hpp"

namespace vrise {

// "VRSE" archive, version 1:
//
//   offset  size  field
//   0       4     magic "VRSE"
//   4       1     version (1)
//   5       1     dtype (0 = float32, 1 = float16)
//   6       2     reserved (0)
//   8       4     count
//   12      4     height
//   16      4     width
//   20      ...   count * height * width values, little-endian
//   ...     4     metadata length
//   ...     ...   metadata, UTF-8 JSON object
//
// All integers are little-endian u32/u16. float16 values are written with
// round-to-nearest-even.
enum class StorageDtype : std::uint8_t { kF32 = 0, kF16 = 1 };

inline constexpr std::uint8_t kArchiveVersion = 1;

class ArchiveError : public std::runtime_error {
 public:
  enum class Kind { kIo, kBadMagic, kVersionMismatch, kTruncated, kCorrupt };
  ArchiveError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Archive {
  StorageDtype dtype = StorageDtype::kF32;
  std::vector<Image> planes;  // single-channel, equal shapes
  nlohmann::json metadata = nlohmann::json::object();
};

std::vector<std::byte> encode_archive(std::span<const Image> planes,
                                      StorageDtype dtype,
                                      const nlohmann::json& metadata = {});
Archive decode_archive(std::span<const std::byte> bytes);

void store_archive(const std::filesystem::path& path,
                   std::span<const Image> planes, StorageDtype dtype,
                   const nlohmann::json& metadata = {});
Archive load_archive(const std::filesystem::path& path);

// Values as they read back from an archive of the given dtype.
Image storage_round_trip(const Image& image, StorageDtype dtype);

}  // namespace vrise
