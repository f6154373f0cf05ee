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


#include "colstore/codec.hpp"

#include <charconv>
#include <lz4/lz4.h>
#include <lzma.h>
#include <zlib.h>
#include <zstd/zstd.h>

#include <algorithm>
#include <limits>
#include <string>

namespace colstore {

namespace {

constexpr int kZlibLevel = 6;
constexpr int kZstdLevel = 3;
constexpr std::uint32_t kLzmaPreset = 6;

[[noreturn]] void corrupt(std::uint8_t codec, const std::string& detail) {
  raise(ErrorClass::kCorruption, "decompression failed", std::string(codec_name(codec)) + ": " + detail);
}

void check_length(std::uint8_t codec, std::size_t got, std::size_t expected) {
  if (got != expected) {
    corrupt(codec, "produced " + std::to_string(got) + " bytes, expected " + std::to_string(expected));
  }
}

lzma_options_lzma lzma_options(std::size_t input_size) {
  lzma_options_lzma opt;
  lzma_lzma_preset(&opt, kLzmaPreset);
  // LZMA_DICT_SIZE_MIN is 4 KiB; a page never needs a larger window than
  // itself.
  opt.dict_size = static_cast<std::uint32_t>(
      std::clamp<std::size_t>(input_size, LZMA_DICT_SIZE_MIN, opt.dict_size));
  return opt;
}

Bytes lzma_compress(ByteSpan input) {
  auto opt = lzma_options(input.size());
  const lzma_filter filters[] = {{LZMA_FILTER_LZMA2, &opt}, {LZMA_VLI_UNKNOWN, nullptr}};
  lzma_stream strm = LZMA_STREAM_INIT;
  if (lzma_raw_encoder(&strm, filters) != LZMA_OK) raise(ErrorClass::kConfig, "lzma encoder initialization failed");
  Bytes out(input.size() + input.size() / 2 + 128);
  strm.next_in = reinterpret_cast<const std::uint8_t*>(input.data());
  strm.avail_in = input.size();
  strm.next_out = reinterpret_cast<std::uint8_t*>(out.data());
  strm.avail_out = out.size();
  lzma_ret ret;
  while ((ret = lzma_code(&strm, LZMA_FINISH)) == LZMA_OK) {
    const auto used = out.size() - strm.avail_out;
    out.resize(out.size() * 2);
    strm.next_out = reinterpret_cast<std::uint8_t*>(out.data()) + used;
    strm.avail_out = out.size() - used;
  }
  const auto produced = out.size() - strm.avail_out;
  lzma_end(&strm);
  if (ret != LZMA_STREAM_END) raise(ErrorClass::kEncoding, "lzma compression failed");
  out.resize(produced);
  return out;
}

void lzma_decompress(ByteSpan input, std::span<std::byte> output) {
  auto opt = lzma_options(output.size());
  const lzma_filter filters[] = {{LZMA_FILTER_LZMA2, &opt}, {LZMA_VLI_UNKNOWN, nullptr}};
  lzma_stream strm = LZMA_STREAM_INIT;
  if (lzma_raw_decoder(&strm, filters) != LZMA_OK) raise(ErrorClass::kConfig, "lzma decoder initialization failed");
  strm.next_in = reinterpret_cast<const std::uint8_t*>(input.data());
  strm.avail_in = input.size();
  strm.next_out = reinterpret_cast<std::uint8_t*>(output.data());
  strm.avail_out = output.size();
  const auto ret = lzma_code(&strm, LZMA_FINISH);
  const auto produced = output.size() - strm.avail_out;
  const auto leftover = strm.avail_in;
  lzma_end(&strm);
  if (ret != LZMA_STREAM_END && !(ret == LZMA_OK && produced == output.size())) {
    corrupt(4, "lzma error " + std::to_string(static_cast<int>(ret)));
  }
  check_length(4, produced, output.size());
  if (leftover != 0) corrupt(4, "trailing input");
}

}  // namespace

std::string_view codec_name(std::uint8_t codec_id) noexcept {
  switch (codec_id) {
    case 0: return "none";
    case 1: return "zlib";
    case 2: return "zstd";
    case 3: return "lz4";
    case 4: return "lzma";
  }
  return "unknown";
}

std::uint8_t parse_codec(std::string_view text) {
  for (std::uint8_t id = 0; id < kCodecCount; ++id) {
    if (text == codec_name(id)) return id;
  }
  unsigned id = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
  if (ec == std::errc() && end == text.data() + text.size() && id < kCodecCount) return static_cast<std::uint8_t>(id);
  raise(ErrorClass::kConfig, "unknown codec '" + std::string(text) + "'", "expected none|zlib|zstd|lz4|lzma or 0-4");
}

Bytes compress(ByteSpan input, std::uint8_t codec_id) {
  switch (codec_id) {
    case 0: return Bytes(input.begin(), input.end());
    case 1: {
      uLongf size = compressBound(static_cast<uLong>(input.size()));
      Bytes out(size);
      if (compress2(reinterpret_cast<Bytef*>(out.data()), &size, reinterpret_cast<const Bytef*>(input.data()),
                    static_cast<uLong>(input.size()), kZlibLevel) != Z_OK) {
        raise(ErrorClass::kEncoding, "zlib compression failed");
      }
      out.resize(size);
      return out;
    }
    case 2: {
      Bytes out(ZSTD_compressBound(input.size()));
      const auto n = ZSTD_compress(out.data(), out.size(), input.data(), input.size(), kZstdLevel);
      if (ZSTD_isError(n)) raise(ErrorClass::kEncoding, "zstd compression failed", ZSTD_getErrorName(n));
      out.resize(n);
      return out;
    }
    case 3: {
      if (input.size() > static_cast<std::size_t>(LZ4_MAX_INPUT_SIZE)) raise(ErrorClass::kEncoding, "page too large for lz4");
      Bytes out(static_cast<std::size_t>(LZ4_compressBound(static_cast<int>(input.size()))));
      const auto n = LZ4_compress_default(reinterpret_cast<const char*>(input.data()), reinterpret_cast<char*>(out.data()),
                                          static_cast<int>(input.size()), static_cast<int>(out.size()));
      if (n <= 0) raise(ErrorClass::kEncoding, "lz4 compression failed");
      out.resize(static_cast<std::size_t>(n));
      return out;
    }
    case 4: return lzma_compress(input);
  }
  raise(ErrorClass::kConfig, "unknown codec id " + std::to_string(codec_id));
}

void decompress(ByteSpan input, std::uint8_t codec_id, std::span<std::byte> output) {
  switch (codec_id) {
    case 0:
      check_length(0, input.size(), output.size());
      std::copy(input.begin(), input.end(), output.begin());
      return;
    case 1: {
      uLongf size = static_cast<uLongf>(output.size());
      const auto rc = uncompress(reinterpret_cast<Bytef*>(output.data()), &size,
                                 reinterpret_cast<const Bytef*>(input.data()), static_cast<uLong>(input.size()));
      if (rc != Z_OK) corrupt(1, "zlib error " + std::to_string(rc));
      check_length(1, size, output.size());
      return;
    }
    case 2: {
      const auto n = ZSTD_decompress(output.data(), output.size(), input.data(), input.size());
      if (ZSTD_isError(n)) corrupt(2, ZSTD_getErrorName(n));
      check_length(2, n, output.size());
      return;
    }
    case 3: {
      if (input.size() > static_cast<std::size_t>(std::numeric_limits<int>::max()) ||
          output.size() > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
        corrupt(3, "page too large");
      }
      const auto n = LZ4_decompress_safe(reinterpret_cast<const char*>(input.data()), reinterpret_cast<char*>(output.data()),
                                         static_cast<int>(input.size()), static_cast<int>(output.size()));
      if (n < 0) corrupt(3, "malformed block");
      check_length(3, static_cast<std::size_t>(n), output.size());
      return;
    }
    case 4: lzma_decompress(input, output); return;
  }
  raise(ErrorClass::kCorruption, "unknown codec id " + std::to_string(codec_id));
}

}  // namespace colstore
