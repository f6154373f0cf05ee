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

// Bit-exact on-disk encoding: element payloads, envelope, header and footer
// records. The layout is documented in docs/format.md.

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "colstore/descriptors.hpp"
#include "colstore/error.hpp"

namespace colstore {

using Bytes = std::vector<std::byte>;
using ByteSpan = std::span<const std::byte>;

inline constexpr std::size_t kEnvelopeSize = 64;

/// A fundamental value in its widest representation.
using Scalar = std::variant<bool, std::int64_t, std::uint64_t, double>;

namespace detail {

template <class T>
constexpr T byteswap(T value) noexcept {
  static_assert(std::is_trivially_copyable_v<T>);
  auto raw = std::bit_cast<std::array<std::byte, sizeof(T)>>(value);
  for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
  return std::bit_cast<T>(raw);
}

}  // namespace detail

template <class T>
inline void store_le(std::byte* dst, T value) noexcept {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) value = detail::byteswap(value);
  std::memcpy(dst, &value, sizeof(T));
}

template <class T>
inline T load_le(const std::byte* src) noexcept {
  T value;
  std::memcpy(&value, src, sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) value = detail::byteswap(value);
  return value;
}

/// Packs booleans (one byte each, nonzero = true) into a bitmap,
/// least-significant bit first; the final partial byte is zero-padded.
void pack_bits(std::span<const std::uint8_t> bools, std::span<std::byte> out) noexcept;
void unpack_bits(ByteSpan bits, std::size_t count, std::span<std::uint8_t> out) noexcept;

/// Generic encoding with range checks. Throws kEncoding naming the element
/// index when a value does not fit `type`.
Bytes encode_elements(std::span<const Scalar> values, PhysicalType type);

/// Inverse of encode_elements. Throws kTruncation when the buffer is shorter
/// than the encoded size of `count` elements.
std::vector<Scalar> decode_elements(ByteSpan buffer, PhysicalType type, std::size_t count);

std::uint32_t crc32(ByteSpan data) noexcept;

/// Append-only little-endian record builder.
class ByteWriter {
 public:
  template <class T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto at = buffer_.size();
    buffer_.resize(at + sizeof(T));
    store_le(buffer_.data() + at, value);
  }
  void put_string(std::string_view s);
  void put_bytes(ByteSpan bytes);
  void patch_u32(std::size_t at, std::uint32_t value) noexcept { store_le(buffer_.data() + at, value); }

  std::size_t size() const noexcept { return buffer_.size(); }
  Bytes take() && { return std::move(buffer_); }
  const Bytes& bytes() const noexcept { return buffer_; }

 private:
  Bytes buffer_;
};

/// Bounds-checked little-endian cursor. Every read past the end throws
/// kTruncation with the offending position.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan data, std::string_view what = "record") : data_(data), what_(what) {}

  template <class T>
  T get() {
    require(sizeof(T));
    T value = load_le<T>(data_.data() + pos_);
    pos_ += sizeof(T);
    return value;
  }
  std::string get_string();
  ByteSpan get_bytes(std::size_t n);
  /// Throws unless at least `count * min_record_bytes` bytes remain; guards
  /// allocations sized from untrusted counts.
  void require_records(std::uint64_t count, std::size_t min_record_bytes) const;

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  void require(std::size_t n) const;

  ByteSpan data_;
  std::size_t pos_ = 0;
  std::string_view what_;
};

Bytes serialize_envelope(const FileEnvelope& envelope);
FileEnvelope deserialize_envelope(ByteSpan bytes);

/// Serializes a header after checking the structural tree invariants
/// (single anonymous root record, parents precede children, columns reference
/// existing fields). Deterministic.
Bytes serialize_header(const Header& header);
Header deserialize_header(ByteSpan bytes);

/// `column_count` is recorded in the footer and cross-checked against every
/// cluster's page table.
Bytes serialize_footer(const Footer& footer, std::uint32_t column_count);
Footer deserialize_footer(ByteSpan bytes);

/// Checks the footer invariants: contiguous ascending cluster entry ranges
/// summing to total_entries, pages inside their cluster region, page sizes
/// consistent with `columns` when given.
void check_footer(const Footer& footer, std::span<const ColumnDescriptor> columns = {});

}  // namespace colstore
