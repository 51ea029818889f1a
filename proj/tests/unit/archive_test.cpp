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

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <vector>

#include "vrise/archive.hpp"
#include "vrise/rng.hpp"

namespace vrise {
namespace {

std::vector<Image> random_planes(int count, int h, int w, std::uint64_t seed) {
  RandomStream rng(seed, StreamDomain::kExperiment);
  std::vector<Image> planes;
  for (int i = 0; i < count; ++i) {
    Image p(h, w, 1);
    for (float& v : p.data()) v = static_cast<float>(rng.uniform());
    planes.push_back(std::move(p));
  }
  return planes;
}

ArchiveError::Kind decode_error(std::span<const std::byte> bytes) {
  try {
    decode_archive(bytes);
  } catch (const ArchiveError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode succeeded";
  return ArchiveError::Kind::kIo;
}

TEST(ArchiveTest, HeaderLayout) {
  const auto planes = random_planes(2, 3, 5, 1);
  const auto bytes = encode_archive(planes, StorageDtype::kF32);
  EXPECT_EQ(std::memcmp(bytes.data(), "VRSE", 4), 0);
  EXPECT_EQ(static_cast<int>(bytes[4]), 1);
  EXPECT_EQ(static_cast<int>(bytes[5]), 0);
  std::uint32_t count = 0, h = 0, w = 0;
  std::memcpy(&count, bytes.data() + 8, 4);
  std::memcpy(&h, bytes.data() + 12, 4);
  std::memcpy(&w, bytes.data() + 16, 4);
  EXPECT_EQ(count, 2u);
  EXPECT_EQ(h, 3u);
  EXPECT_EQ(w, 5u);
  float first = 0.0f;
  std::memcpy(&first, bytes.data() + 20, 4);
  EXPECT_EQ(first, planes[0].data()[0]);
}

TEST(ArchiveTest, Float32RoundTripIsExact) {
  const auto planes = random_planes(3, 7, 4, 2);
  const Archive back = decode_archive(encode_archive(planes, StorageDtype::kF32, {{"k", "v"}}));
  EXPECT_EQ(back.dtype, StorageDtype::kF32);
  EXPECT_EQ(back.planes, planes);
  EXPECT_EQ(back.metadata.at("k"), "v");
  EXPECT_EQ(back.metadata.at("precision"), "fp32");
  EXPECT_EQ(back.metadata.at("count"), 3);
  EXPECT_EQ(back.metadata.at("height"), 7);
  EXPECT_EQ(back.metadata.at("width"), 4);
}

TEST(ArchiveTest, Float16ErrorWithinHalfUlp) {
  const auto planes = random_planes(4, 32, 32, 3);
  const Archive back = decode_archive(encode_archive(planes, StorageDtype::kF16));
  EXPECT_EQ(back.metadata.at("precision"), "fp16");
  float worst = 0.0f;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    for (std::size_t k = 0; k < planes[i].size(); ++k) {
      worst = std::max(worst, std::abs(back.planes[i].data()[k] - planes[i].data()[k]));
    }
    EXPECT_EQ(back.planes[i], storage_round_trip(planes[i], StorageDtype::kF16));
  }
  EXPECT_LE(worst, std::ldexp(1.0f, -11));
  EXPECT_EQ(storage_round_trip(planes[0], StorageDtype::kF32), planes[0]);
}

TEST(ArchiveTest, RejectsInvalidPlanes) {
  std::vector<Image> mixed{Image(2, 2, 1), Image(3, 2, 1)};
  EXPECT_THROW(encode_archive(mixed, StorageDtype::kF32), std::invalid_argument);
  std::vector<Image> rgb{Image(2, 2, 3)};
  EXPECT_THROW(encode_archive(rgb, StorageDtype::kF32), std::invalid_argument);
}

TEST(ArchiveTest, CorruptionIsClassified) {
  const auto planes = random_planes(2, 4, 4, 4);
  const auto good = encode_archive(planes, StorageDtype::kF16, {{"a", 1}});
  using Kind = ArchiveError::Kind;

  auto bad_magic = good;
  bad_magic[0] = std::byte{'X'};
  EXPECT_EQ(decode_error(bad_magic), Kind::kBadMagic);

  auto version = good;
  version[4] = std::byte{2};
  EXPECT_EQ(decode_error(version), Kind::kVersionMismatch);

  auto dtype = good;
  dtype[5] = std::byte{7};
  EXPECT_EQ(decode_error(dtype), Kind::kCorrupt);

  EXPECT_EQ(decode_error(std::span(good).first(10)), Kind::kTruncated);
  EXPECT_EQ(decode_error(std::span(good).first(40)), Kind::kTruncated);
  EXPECT_EQ(decode_error(std::span(good).first(good.size() - 2)), Kind::kTruncated);

  auto huge = good;
  const std::uint32_t big = 0xffffffffu;
  std::memcpy(huge.data() + 8, &big, 4);
  std::memcpy(huge.data() + 12, &big, 4);
  EXPECT_EQ(decode_error(huge), Kind::kTruncated);

  auto meta = good;
  meta[meta.size() - 1] = std::byte{'!'};
  EXPECT_EQ(decode_error(meta), Kind::kCorrupt);

  auto trailing = good;
  trailing.push_back(std::byte{0});
  EXPECT_EQ(decode_error(trailing), Kind::kCorrupt);
}

TEST(ArchiveTest, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "vrise_archive_test.vrse";
  const auto planes = random_planes(1, 5, 6, 5);
  store_archive(path, planes, StorageDtype::kF32, {{"x", 2}});
  const Archive back = load_archive(path);
  EXPECT_EQ(back.planes, planes);
  std::filesystem::remove(path);
  try {
    load_archive(path);
    FAIL();
  } catch (const ArchiveError& e) {
    EXPECT_EQ(e.kind(), ArchiveError::Kind::kIo);
  }
}

}  // namespace
}  // namespace vrise
