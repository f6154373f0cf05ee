/*
 * Copyright 2026 The colstore Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include <random>

#include "colstore/codec.hpp"
#include "test_util.hpp"

namespace colstore {
namespace {

using testing_util::error_class_of;

Bytes sample_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bytes out(n);
  for (std::size_t i = 0; i < n; ++i) {
    // mix of runs and noise so every codec has something to find
    out[i] = static_cast<std::byte>(i % 97 < 60 ? (i / 17) & 0xff : rng() & 0xff);
  }
  return out;
}

class CodecRoundTrip : public ::testing::TestWithParam<std::uint8_t> {};

TEST_P(CodecRoundTrip, SizesFromEmptyToLarge) {
  for (std::size_t n : {0u, 1u, 7u, 4096u, 65536u, 1u << 20}) {
    const auto input = sample_bytes(n, n + 1);
    const auto packed = compress(input, GetParam());
    Bytes out(n);
    decompress(packed, GetParam(), out);
    EXPECT_EQ(out, input) << codec_name(GetParam()) << " n=" << n;
  }
}

TEST_P(CodecRoundTrip, WrongLengthIsCorruption) {
  const auto input = sample_bytes(1000, 3);
  const auto packed = compress(input, GetParam());
  Bytes shorter(999);
  EXPECT_EQ(error_class_of([&] { decompress(packed, GetParam(), shorter); }), ErrorClass::kCorruption);
  Bytes longer(1001);
  EXPECT_EQ(error_class_of([&] { decompress(packed, GetParam(), longer); }), ErrorClass::kCorruption);
}

TEST_P(CodecRoundTrip, Deterministic) {
  const auto input = sample_bytes(50000, 9);
  EXPECT_EQ(compress(input, GetParam()), compress(input, GetParam()));
}

INSTANTIATE_TEST_SUITE_P(AllCodecs, CodecRoundTrip, ::testing::Values(0, 1, 2, 3, 4),
                         [](const auto& info) { return std::string(codec_name(info.param)); });

TEST(Codec, CompressibleInputShrinks) {
  Bytes zeros(100000);
  for (std::uint8_t c = 1; c < kCodecCount; ++c) EXPECT_LT(compress(zeros, c).size(), 2000u) << codec_name(c);
}

TEST(Codec, GarbageStreamIsCorruption) {
  const auto noise = sample_bytes(200, 11);
  for (std::uint8_t c = 1; c < kCodecCount; ++c) {
    Bytes out(5000);
    EXPECT_EQ(error_class_of([&] { decompress(noise, c, out); }), ErrorClass::kCorruption) << codec_name(c);
  }
}

TEST(Codec, UnknownIdRejected) {
  Bytes out(4);
  EXPECT_EQ(error_class_of([&] { compress(out, 9); }), ErrorClass::kConfig);
  EXPECT_EQ(error_class_of([&] { decompress(out, 9, out); }), ErrorClass::kCorruption);
}

TEST(Codec, ParseNamesAndIds) {
  EXPECT_EQ(parse_codec("none"), 0);
  EXPECT_EQ(parse_codec("zstd"), 2);
  EXPECT_EQ(parse_codec("lzma"), 4);
  EXPECT_EQ(parse_codec("3"), 3);
  EXPECT_EQ(error_class_of([] { parse_codec("brotli"); }), ErrorClass::kConfig);
  EXPECT_EQ(error_class_of([] { parse_codec("5"); }), ErrorClass::kConfig);
}

}  // namespace
}  // namespace colstore
