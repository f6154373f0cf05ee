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

// Plain metadata records shared by the format, schema and storage layers.
// Everything here is a value type with structural equality.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace colstore {

using FieldId = std::uint32_t;
using ColumnId = std::uint32_t;
using EntryIndex = std::uint64_t;

inline constexpr std::array<char, 4> kMagic = {'C', 'S', 'N', 'T'};
inline constexpr std::uint16_t kFormatVersion = 1;
/// Codec ids 0..4 are defined; see codec.hpp.
inline constexpr std::uint8_t kCodecCount = 5;

/// Feature flag bits stored in the envelope. Readers reject unknown bits.
namespace feature {
inline constexpr std::uint64_t kPageChecksums = 1u << 0;
inline constexpr std::uint64_t kKnownMask = kPageChecksums;
}  // namespace feature

/// Fundamental on-disk element types.
enum class PhysicalType : std::uint8_t {
  kBit = 0,
  kByte,
  kInt8,
  kInt16,
  kInt32,
  kInt64,
  kUInt8,
  kUInt16,
  kUInt32,
  kUInt64,
  kFloat32,
  kFloat64,
  kIndex64,
};

inline constexpr std::uint8_t kPhysicalTypeCount = 13;

std::string_view physical_type_name(PhysicalType type) noexcept;

/// Bytes per element on disk; 0 for kBit (packed 8 per byte).
std::size_t disk_width(PhysicalType type) noexcept;

/// Bytes per element in memory. kBit elements are unpacked to one byte each.
std::size_t memory_width(PhysicalType type) noexcept;

/// Exact encoded payload size of `count` elements.
std::uint64_t encoded_size(PhysicalType type, std::uint64_t count) noexcept;

struct ByteRange {
  std::uint64_t offset = 0;
  std::uint32_t compressed_size = 0;
  std::uint32_t uncompressed_size = 0;
  std::uint8_t codec_id = 0;

  std::uint64_t end() const noexcept { return offset + compressed_size; }
  bool operator==(const ByteRange&) const = default;
};

struct FileEnvelope {
  std::array<char, 4> magic = kMagic;
  std::uint16_t format_version = kFormatVersion;
  std::uint64_t feature_flags = 0;
  ByteRange header_locator;
  ByteRange footer_locator;

  bool operator==(const FileEnvelope&) const = default;
};

enum class FieldKind : std::uint8_t {
  kBool = 1,
  kInt,
  kFloat,
  kString,
  kCollection,
  kFixedArray,
  kRecord,
  kVariant,
};

std::string_view field_kind_name(FieldKind kind) noexcept;

/// A field kind together with its parameters (integer/float width, signedness,
/// fixed array length).
struct FieldType {
  FieldKind kind = FieldKind::kRecord;
  std::uint8_t width_bits = 0;
  bool is_signed = false;
  std::uint64_t array_length = 0;

  static FieldType boolean() { return {FieldKind::kBool}; }
  static FieldType integer(std::uint8_t bits, bool is_signed) { return {FieldKind::kInt, bits, is_signed}; }
  static FieldType floating(std::uint8_t bits) { return {FieldKind::kFloat, bits}; }
  static FieldType string() { return {FieldKind::kString}; }
  static FieldType collection() { return {FieldKind::kCollection}; }
  static FieldType fixed_array(std::uint64_t length) { return {FieldKind::kFixedArray, 0, false, length}; }
  static FieldType record() { return {FieldKind::kRecord}; }
  static FieldType variant() { return {FieldKind::kVariant}; }

  bool is_leaf() const noexcept { return kind == FieldKind::kBool || kind == FieldKind::kInt || kind == FieldKind::kFloat; }
  std::string to_string() const;

  bool operator==(const FieldType&) const = default;
};

struct FieldDescriptor {
  FieldId field_id = 0;
  std::string name;
  FieldType type;
  std::optional<FieldId> parent_id;
  std::vector<FieldId> children;

  bool operator==(const FieldDescriptor&) const = default;
};

enum class ColumnRole : std::uint8_t {
  kValue = 0,
  kOffset,
  kVariantTag,
  kCharData,
};

std::string_view column_role_name(ColumnRole role) noexcept;

struct ColumnDescriptor {
  ColumnId column_id = 0;
  FieldId owner_field = 0;
  ColumnRole role = ColumnRole::kValue;
  PhysicalType type = PhysicalType::kByte;
  /// Reduced-precision float storage: number of mantissa bits kept, 0 = full.
  std::uint8_t mantissa_bits = 0;

  bool operator==(const ColumnDescriptor&) const = default;
};

struct Header {
  std::string dataset_name;
  std::vector<FieldDescriptor> fields;
  std::vector<ColumnDescriptor> columns;

  bool operator==(const Header&) const = default;
};

struct PageLocator {
  ByteRange range;
  std::uint32_t element_count = 0;
  ColumnId column_id = 0;
  /// CRC32 of the stored bytes; meaningful when the file carries
  /// feature::kPageChecksums.
  std::uint32_t checksum = 0;

  bool operator==(const PageLocator&) const = default;
};

struct ClusterDescriptor {
  EntryIndex first_entry = 0;
  std::uint64_t entry_count = 0;
  /// Contiguous byte region holding every page of the cluster.
  std::uint64_t region_offset = 0;
  std::uint64_t region_size = 0;
  /// Page locators grouped per column (index = column id), in element order.
  std::vector<std::vector<PageLocator>> pages;

  std::uint64_t element_count(ColumnId column) const;
  bool operator==(const ClusterDescriptor&) const = default;
};

struct Footer {
  std::vector<ClusterDescriptor> clusters;
  std::uint64_t total_entries = 0;

  bool operator==(const Footer&) const = default;
};

}  // namespace colstore
