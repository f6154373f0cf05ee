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


// Page compression codecs.
//
//   0  none
//   1  zlib (deflate), level 6
//   2  zstd, level 3
//   3  lz4 (block format)
//   4  LZMA2 raw stream, preset 6

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "colstore/format.hpp"

namespace colstore {

enum class Codec : std::uint8_t {
  kNone = 0,
  kZlib = 1,
  kZstd = 2,
  kLz4 = 3,
  kLzma = 4,
};

std::string_view codec_name(std::uint8_t codec_id) noexcept;
/// Accepts a codec name or its numeric id. Throws kConfig otherwise.
std::uint8_t parse_codec(std::string_view text);

/// Compresses `input`. The result may be larger than the input; callers
/// store pages uncompressed in that case.
Bytes compress(ByteSpan input, std::uint8_t codec_id);

/// Decompresses into `output`, whose size is the expected uncompressed size.
/// Throws kCorruption when the stream is invalid or its length differs.
void decompress(ByteSpan input, std::uint8_t codec_id, std::span<std::byte> output);

}  // namespace colstore
