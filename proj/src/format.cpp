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

#include "colstore/format.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace colstore {

namespace {

constexpr std::uint16_t kHeaderRecord = 1;
constexpr std::uint16_t kFooterRecord = 2;
constexpr std::uint32_t kNoParent = 0xFFFFFFFFu;
// record_size + version + record type, and the trailing crc
constexpr std::size_t kRecordPrologue = 8;
constexpr std::size_t kRecordEpilogue = 4;
constexpr std::size_t kFieldRecordMin = 4 + 4 + 4 + 4 + 8;
constexpr std::size_t kColumnRecordSize = 4 + 4 + 4;
constexpr std::size_t kClusterRecordMin = 8 * 4;
constexpr std::size_t kPageRecordSize = 8 + 4 + 4 + 1 + 4 + 4;

std::string index_context(std::size_t i) { return "element " + std::to_string(i); }

template <class T>
bool fits(const Scalar& v) {
  if (const auto* s = std::get_if<std::int64_t>(&v)) {
    if constexpr (std::is_signed_v<T>) {
      return *s >= std::numeric_limits<T>::min() && *s <= std::numeric_limits<T>::max();
    } else {
      return *s >= 0 && static_cast<std::uint64_t>(*s) <= std::numeric_limits<T>::max();
    }
  }
  if (const auto* u = std::get_if<std::uint64_t>(&v)) {
    return *u <= static_cast<std::uint64_t>(std::numeric_limits<T>::max());
  }
  return false;
}

template <class T>
T integral_value(const Scalar& v) {
  if (const auto* s = std::get_if<std::int64_t>(&v)) return static_cast<T>(*s);
  return static_cast<T>(std::get<std::uint64_t>(v));
}

template <class T>
void encode_integral(std::span<const Scalar> values, std::byte* out) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!fits<T>(values[i])) raise(ErrorClass::kEncoding, "value out of range for integer column", index_context(i));
    store_le(out + i * sizeof(T), integral_value<T>(values[i]));
  }
}

template <class T>
void encode_floating(std::span<const Scalar> values, std::byte* out) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto* d = std::get_if<double>(&values[i]);
    if (d == nullptr) raise(ErrorClass::kEncoding, "non-floating value for floating column", index_context(i));
    if constexpr (std::is_same_v<T, float>) {
      if (std::isfinite(*d) && std::fabs(*d) > std::numeric_limits<float>::max()) {
        raise(ErrorClass::kEncoding, "value out of range for Float32", index_context(i));
      }
    }
    store_le(out + i * sizeof(T), static_cast<T>(*d));
  }
}

template <class T>
void decode_into(ByteSpan buffer, std::size_t count, std::vector<Scalar>& out) {
  for (std::size_t i = 0; i < count; ++i) {
    const T v = load_le<T>(buffer.data() + i * sizeof(T));
    if constexpr (std::is_floating_point_v<T>) {
      out.emplace_back(static_cast<double>(v));
    } else if constexpr (std::is_signed_v<T>) {
      out.emplace_back(static_cast<std::int64_t>(v));
    } else {
      out.emplace_back(static_cast<std::uint64_t>(v));
    }
  }
}

void put_range(ByteWriter& w, const ByteRange& r) {
  w.put<std::uint64_t>(r.offset);
  w.put<std::uint32_t>(r.compressed_size);
  w.put<std::uint32_t>(r.uncompressed_size);
  w.put<std::uint8_t>(r.codec_id);
}

ByteRange get_range(ByteReader& r) {
  ByteRange out;
  out.offset = r.get<std::uint64_t>();
  out.compressed_size = r.get<std::uint32_t>();
  out.uncompressed_size = r.get<std::uint32_t>();
  out.codec_id = r.get<std::uint8_t>();
  return out;
}

void check_range(const ByteRange& r, std::string_view what) {
  if (r.codec_id >= kCodecCount) raise(ErrorClass::kFormat, "unknown codec id " + std::to_string(r.codec_id), std::string(what));
  if (r.codec_id == 0 && r.compressed_size != r.uncompressed_size) {
    raise(ErrorClass::kFormat, "uncompressed range with differing sizes", std::string(what));
  }
  if (r.offset > std::numeric_limits<std::uint64_t>::max() - r.compressed_size) {
    raise(ErrorClass::kFormat, "byte range overflows", std::string(what));
  }
}

// Opens a length-prefixed, version-tagged, crc-terminated record.
ByteReader open_record(ByteSpan bytes, std::uint16_t record_type, std::string_view what) {
  if (bytes.size() < kRecordPrologue + kRecordEpilogue) {
    raise(ErrorClass::kTruncation, "record shorter than its fixed prologue",
          std::string(what) + ": have " + std::to_string(bytes.size()) + " bytes");
  }
  const auto declared = load_le<std::uint32_t>(bytes.data());
  if (declared != bytes.size()) {
    raise(ErrorClass::kTruncation, "record length mismatch",
          std::string(what) + ": declared " + std::to_string(declared) + ", have " + std::to_string(bytes.size()));
  }
  const auto version = load_le<std::uint16_t>(bytes.data() + 4);
  if (version != kFormatVersion) {
    raise(ErrorClass::kVersion, "unsupported format version " + std::to_string(version), std::string(what));
  }
  const auto type = load_le<std::uint16_t>(bytes.data() + 6);
  const auto stored_crc = load_le<std::uint32_t>(bytes.data() + bytes.size() - 4);
  if (crc32(bytes.first(bytes.size() - 4)) != stored_crc) {
    raise(ErrorClass::kCorruption, "checksum mismatch", std::string(what));
  }
  if (type != record_type) raise(ErrorClass::kFormat, "unexpected record type " + std::to_string(type), std::string(what));
  ByteReader reader(bytes.subspan(kRecordPrologue, bytes.size() - kRecordPrologue - kRecordEpilogue), what);
  return reader;
}

ByteWriter begin_record(std::uint16_t record_type) {
  ByteWriter w;
  w.put<std::uint32_t>(0);
  w.put<std::uint16_t>(kFormatVersion);
  w.put<std::uint16_t>(record_type);
  return w;
}

Bytes finish_record(ByteWriter w) {
  const auto total = w.size() + kRecordEpilogue;
  if (total > std::numeric_limits<std::uint32_t>::max()) raise(ErrorClass::kUsage, "metadata record exceeds 4 GiB");
  w.patch_u32(0, static_cast<std::uint32_t>(total));
  const auto crc = crc32(w.bytes());
  w.put<std::uint32_t>(crc);
  return std::move(w).take();
}

bool can_have_children(FieldKind kind) {
  return kind == FieldKind::kCollection || kind == FieldKind::kFixedArray || kind == FieldKind::kRecord ||
         kind == FieldKind::kVariant;
}

// Tree-shape checks shared by serialization and deserialization. Children
// lists must be exactly the fields naming the parent, in id order.
void check_header_tree(const Header& h) {
  if (h.fields.empty()) raise(ErrorClass::kSchema, "header has no fields; a root record is required");
  std::vector<std::vector<FieldId>> expected(h.fields.size());
  for (std::size_t i = 0; i < h.fields.size(); ++i) {
    const auto& f = h.fields[i];
    const auto ctx = "field " + std::to_string(i);
    if (f.field_id != i) raise(ErrorClass::kSchema, "field ids must be dense and in pre-order", ctx);
    if (i == 0) {
      if (f.parent_id) raise(ErrorClass::kSchema, "root field has a parent", ctx);
      if (f.type.kind != FieldKind::kRecord || !f.name.empty()) {
        raise(ErrorClass::kSchema, "root must be an anonymous record", ctx);
      }
      continue;
    }
    if (!f.parent_id) raise(ErrorClass::kSchema, "multiple roots", ctx);
    if (*f.parent_id >= i) raise(ErrorClass::kSchema, "parent must precede child", ctx);
    if (!can_have_children(h.fields[*f.parent_id].type.kind)) {
      raise(ErrorClass::kSchema, "parent kind cannot have children", ctx);
    }
    expected[*f.parent_id].push_back(f.field_id);
  }
  for (std::size_t i = 0; i < h.fields.size(); ++i) {
    if (h.fields[i].children != expected[i]) {
      raise(ErrorClass::kSchema, "children list disagrees with parent ids", "field " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < h.columns.size(); ++i) {
    const auto& c = h.columns[i];
    const auto ctx = "column " + std::to_string(i);
    if (c.column_id != i) raise(ErrorClass::kSchema, "column ids must be dense", ctx);
    if (c.owner_field >= h.fields.size()) raise(ErrorClass::kSchema, "column references a missing field", ctx);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// descriptor helpers

std::string_view physical_type_name(PhysicalType type) noexcept {
  switch (type) {
    case PhysicalType::kBit: return "Bit";
    case PhysicalType::kByte: return "Byte";
    case PhysicalType::kInt8: return "Int8";
    case PhysicalType::kInt16: return "Int16";
    case PhysicalType::kInt32: return "Int32";
    case PhysicalType::kInt64: return "Int64";
    case PhysicalType::kUInt8: return "UInt8";
    case PhysicalType::kUInt16: return "UInt16";
    case PhysicalType::kUInt32: return "UInt32";
    case PhysicalType::kUInt64: return "UInt64";
    case PhysicalType::kFloat32: return "Float32";
    case PhysicalType::kFloat64: return "Float64";
    case PhysicalType::kIndex64: return "Index64";
  }
  return "?";
}

std::size_t disk_width(PhysicalType type) noexcept {
  switch (type) {
    case PhysicalType::kBit: return 0;
    case PhysicalType::kByte:
    case PhysicalType::kInt8:
    case PhysicalType::kUInt8: return 1;
    case PhysicalType::kInt16:
    case PhysicalType::kUInt16: return 2;
    case PhysicalType::kInt32:
    case PhysicalType::kUInt32:
    case PhysicalType::kFloat32: return 4;
    case PhysicalType::kInt64:
    case PhysicalType::kUInt64:
    case PhysicalType::kFloat64:
    case PhysicalType::kIndex64: return 8;
  }
  return 0;
}

std::size_t memory_width(PhysicalType type) noexcept {
  return type == PhysicalType::kBit ? 1 : disk_width(type);
}

std::uint64_t encoded_size(PhysicalType type, std::uint64_t count) noexcept {
  if (type == PhysicalType::kBit) return (count + 7) / 8;
  return count * disk_width(type);
}

std::string_view field_kind_name(FieldKind kind) noexcept {
  switch (kind) {
    case FieldKind::kBool: return "bool";
    case FieldKind::kInt: return "int";
    case FieldKind::kFloat: return "float";
    case FieldKind::kString: return "string";
    case FieldKind::kCollection: return "collection";
    case FieldKind::kFixedArray: return "array";
    case FieldKind::kRecord: return "record";
    case FieldKind::kVariant: return "variant";
  }
  return "?";
}

std::string FieldType::to_string() const {
  switch (kind) {
    case FieldKind::kInt: return (is_signed ? "int" : "uint") + std::to_string(width_bits);
    case FieldKind::kFloat: return "float" + std::to_string(width_bits);
    case FieldKind::kFixedArray: return "array[" + std::to_string(array_length) + "]";
    default: return std::string(field_kind_name(kind));
  }
}

std::string_view column_role_name(ColumnRole role) noexcept {
  switch (role) {
    case ColumnRole::kValue: return "value";
    case ColumnRole::kOffset: return "offset";
    case ColumnRole::kVariantTag: return "tag";
    case ColumnRole::kCharData: return "chars";
  }
  return "?";
}

std::uint64_t ClusterDescriptor::element_count(ColumnId column) const {
  std::uint64_t n = 0;
  if (column < pages.size()) {
    for (const auto& p : pages[column]) n += p.element_count;
  }
  return n;
}

// ---------------------------------------------------------------------------
// elements

void pack_bits(std::span<const std::uint8_t> bools, std::span<std::byte> out) noexcept {
  std::fill(out.begin(), out.end(), std::byte{0});
  for (std::size_t i = 0; i < bools.size(); ++i) {
    if (bools[i] != 0) out[i / 8] |= std::byte{static_cast<unsigned char>(1u << (i % 8))};
  }
}

void unpack_bits(ByteSpan bits, std::size_t count, std::span<std::uint8_t> out) noexcept {
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = static_cast<std::uint8_t>((std::to_integer<unsigned>(bits[i / 8]) >> (i % 8)) & 1u);
  }
}

Bytes encode_elements(std::span<const Scalar> values, PhysicalType type) {
  Bytes out(encoded_size(type, values.size()));
  std::byte* dst = out.data();
  switch (type) {
    case PhysicalType::kBit: {
      std::vector<std::uint8_t> bools(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        const auto* b = std::get_if<bool>(&values[i]);
        if (b == nullptr) raise(ErrorClass::kEncoding, "non-boolean value for Bit column", index_context(i));
        bools[i] = *b ? 1 : 0;
      }
      pack_bits(bools, out);
      break;
    }
    case PhysicalType::kByte:
    case PhysicalType::kUInt8: encode_integral<std::uint8_t>(values, dst); break;
    case PhysicalType::kInt8: encode_integral<std::int8_t>(values, dst); break;
    case PhysicalType::kInt16: encode_integral<std::int16_t>(values, dst); break;
    case PhysicalType::kInt32: encode_integral<std::int32_t>(values, dst); break;
    case PhysicalType::kInt64: encode_integral<std::int64_t>(values, dst); break;
    case PhysicalType::kUInt16: encode_integral<std::uint16_t>(values, dst); break;
    case PhysicalType::kUInt32: encode_integral<std::uint32_t>(values, dst); break;
    case PhysicalType::kUInt64:
    case PhysicalType::kIndex64: encode_integral<std::uint64_t>(values, dst); break;
    case PhysicalType::kFloat32: encode_floating<float>(values, dst); break;
    case PhysicalType::kFloat64: encode_floating<double>(values, dst); break;
  }
  return out;
}

std::vector<Scalar> decode_elements(ByteSpan buffer, PhysicalType type, std::size_t count) {
  const auto needed = encoded_size(type, count);
  if (buffer.size() < needed) {
    raise(ErrorClass::kTruncation, "element buffer too short",
          "expected " + std::to_string(needed) + " bytes, have " + std::to_string(buffer.size()));
  }
  std::vector<Scalar> out;
  out.reserve(count);
  switch (type) {
    case PhysicalType::kBit: {
      std::vector<std::uint8_t> bools(count);
      unpack_bits(buffer, count, bools);
      for (auto b : bools) out.emplace_back(b != 0);
      break;
    }
    case PhysicalType::kByte:
    case PhysicalType::kUInt8: decode_into<std::uint8_t>(buffer, count, out); break;
    case PhysicalType::kInt8: decode_into<std::int8_t>(buffer, count, out); break;
    case PhysicalType::kInt16: decode_into<std::int16_t>(buffer, count, out); break;
    case PhysicalType::kInt32: decode_into<std::int32_t>(buffer, count, out); break;
    case PhysicalType::kInt64: decode_into<std::int64_t>(buffer, count, out); break;
    case PhysicalType::kUInt16: decode_into<std::uint16_t>(buffer, count, out); break;
    case PhysicalType::kUInt32: decode_into<std::uint32_t>(buffer, count, out); break;
    case PhysicalType::kUInt64:
    case PhysicalType::kIndex64: decode_into<std::uint64_t>(buffer, count, out); break;
    case PhysicalType::kFloat32: decode_into<float>(buffer, count, out); break;
    case PhysicalType::kFloat64: decode_into<double>(buffer, count, out); break;
  }
  return out;
}

std::uint32_t crc32(ByteSpan data) noexcept {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  const auto* p = reinterpret_cast<const Bytef*>(data.data());
  std::size_t left = data.size();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = ::crc32(crc, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

// ---------------------------------------------------------------------------
// byte cursors

void ByteWriter::put_string(std::string_view s) {
  put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
  const auto at = buffer_.size();
  buffer_.resize(at + s.size());
  std::memcpy(buffer_.data() + at, s.data(), s.size());
}

void ByteWriter::put_bytes(ByteSpan bytes) { buffer_.insert(buffer_.end(), bytes.begin(), bytes.end()); }

void ByteReader::require(std::size_t n) const {
  if (remaining() < n) {
    raise(ErrorClass::kTruncation, "read past end of " + std::string(what_),
          "position " + std::to_string(pos_) + ", need " + std::to_string(n) + ", have " + std::to_string(remaining()));
  }
}

void ByteReader::require_records(std::uint64_t count, std::size_t min_record_bytes) const {
  if (min_record_bytes != 0 && count > remaining() / min_record_bytes) {
    raise(ErrorClass::kTruncation, "record count exceeds remaining bytes of " + std::string(what_),
          "count " + std::to_string(count) + " at position " + std::to_string(pos_));
  }
}

std::string ByteReader::get_string() {
  const auto n = get<std::uint32_t>();
  auto bytes = get_bytes(n);
  return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

ByteSpan ByteReader::get_bytes(std::size_t n) {
  require(n);
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

// ---------------------------------------------------------------------------
// envelope

Bytes serialize_envelope(const FileEnvelope& e) {
  ByteWriter w;
  for (char c : e.magic) w.put<char>(c);
  w.put<std::uint16_t>(e.format_version);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(kEnvelopeSize));
  w.put<std::uint64_t>(e.feature_flags);
  put_range(w, e.header_locator);
  for (int i = 0; i < 3; ++i) w.put<std::uint8_t>(0);
  put_range(w, e.footer_locator);
  for (int i = 0; i < 3; ++i) w.put<std::uint8_t>(0);
  w.put<std::uint32_t>(0);
  const auto crc = crc32(w.bytes());
  w.put<std::uint32_t>(crc);
  return std::move(w).take();
}

FileEnvelope deserialize_envelope(ByteSpan bytes) {
  if (bytes.size() < kEnvelopeSize) {
    raise(ErrorClass::kTruncation, "file shorter than envelope", "have " + std::to_string(bytes.size()) + " bytes");
  }
  bytes = bytes.first(kEnvelopeSize);
  FileEnvelope e;
  ByteReader r(bytes, "envelope");
  for (auto& c : e.magic) c = r.get<char>();
  if (e.magic != kMagic) raise(ErrorClass::kFormat, "bad magic", "offset 0");
  e.format_version = r.get<std::uint16_t>();
  if (e.format_version != kFormatVersion) {
    raise(ErrorClass::kVersion, "unsupported format version " + std::to_string(e.format_version), "offset 4");
  }
  if (crc32(bytes.first(kEnvelopeSize - 4)) != load_le<std::uint32_t>(bytes.data() + kEnvelopeSize - 4)) {
    raise(ErrorClass::kCorruption, "envelope checksum mismatch", "offset 60");
  }
  if (r.get<std::uint16_t>() != kEnvelopeSize) raise(ErrorClass::kFormat, "unexpected envelope size", "offset 6");
  e.feature_flags = r.get<std::uint64_t>();
  if ((e.feature_flags & ~feature::kKnownMask) != 0) {
    raise(ErrorClass::kVersion, "unknown feature flags", "offset 8");
  }
  e.header_locator = get_range(r);
  for (int i = 0; i < 3; ++i) {
    if (r.get<std::uint8_t>() != 0) raise(ErrorClass::kFormat, "nonzero reserved envelope byte");
  }
  e.footer_locator = get_range(r);
  for (int i = 0; i < 3; ++i) {
    if (r.get<std::uint8_t>() != 0) raise(ErrorClass::kFormat, "nonzero reserved envelope byte");
  }
  if (r.get<std::uint32_t>() != 0) raise(ErrorClass::kFormat, "nonzero reserved envelope word");
  check_range(e.header_locator, "header locator");
  check_range(e.footer_locator, "footer locator");
  if (e.header_locator.codec_id != 0 || e.footer_locator.codec_id != 0) {
    raise(ErrorClass::kFormat, "metadata records are stored uncompressed in this format version");
  }
  const auto& h = e.header_locator;
  const auto& f = e.footer_locator;
  if (h.offset < kEnvelopeSize || f.offset < kEnvelopeSize || (h.offset < f.end() && f.offset < h.end())) {
    raise(ErrorClass::kFormat, "header and footer ranges overlap each other or the envelope");
  }
  return e;
}

// ---------------------------------------------------------------------------
// header

Bytes serialize_header(const Header& h) {
  check_header_tree(h);
  auto w = begin_record(kHeaderRecord);
  w.put_string(h.dataset_name);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(h.fields.size()));
  for (const auto& f : h.fields) {
    w.put<std::uint32_t>(f.field_id);
    w.put<std::uint32_t>(f.parent_id ? *f.parent_id : kNoParent);
    w.put_string(f.name);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(f.type.kind));
    w.put<std::uint8_t>(f.type.width_bits);
    w.put<std::uint8_t>(f.type.is_signed ? 1 : 0);
    w.put<std::uint8_t>(0);
    w.put<std::uint64_t>(f.type.array_length);
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(h.columns.size()));
  for (const auto& c : h.columns) {
    w.put<std::uint32_t>(c.column_id);
    w.put<std::uint32_t>(c.owner_field);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(c.role));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(c.type));
    w.put<std::uint8_t>(c.mantissa_bits);
    w.put<std::uint8_t>(0);
  }
  return finish_record(std::move(w));
}

Header deserialize_header(ByteSpan bytes) {
  auto r = open_record(bytes, kHeaderRecord, "header");
  Header h;
  h.dataset_name = r.get_string();
  const auto nfields = r.get<std::uint32_t>();
  r.require_records(nfields, kFieldRecordMin);
  h.fields.resize(nfields);
  for (auto& f : h.fields) {
    f.field_id = r.get<std::uint32_t>();
    const auto parent = r.get<std::uint32_t>();
    if (parent != kNoParent) f.parent_id = parent;
    f.name = r.get_string();
    const auto kind = r.get<std::uint8_t>();
    if (kind < static_cast<std::uint8_t>(FieldKind::kBool) || kind > static_cast<std::uint8_t>(FieldKind::kVariant)) {
      raise(ErrorClass::kFormat, "unknown field kind " + std::to_string(kind), "field " + std::to_string(f.field_id));
    }
    f.type.kind = static_cast<FieldKind>(kind);
    f.type.width_bits = r.get<std::uint8_t>();
    const auto is_signed = r.get<std::uint8_t>();
    if (is_signed > 1 || r.get<std::uint8_t>() != 0) raise(ErrorClass::kFormat, "bad field flags");
    f.type.is_signed = is_signed == 1;
    f.type.array_length = r.get<std::uint64_t>();
  }
  for (auto& f : h.fields) {
    if (f.parent_id && *f.parent_id < f.field_id && f.field_id < h.fields.size()) {
      h.fields[*f.parent_id].children.push_back(f.field_id);
    }
  }
  const auto ncolumns = r.get<std::uint32_t>();
  r.require_records(ncolumns, kColumnRecordSize);
  h.columns.resize(ncolumns);
  for (auto& c : h.columns) {
    c.column_id = r.get<std::uint32_t>();
    c.owner_field = r.get<std::uint32_t>();
    const auto role = r.get<std::uint8_t>();
    const auto type = r.get<std::uint8_t>();
    if (role > static_cast<std::uint8_t>(ColumnRole::kCharData)) raise(ErrorClass::kFormat, "unknown column role");
    if (type >= kPhysicalTypeCount) raise(ErrorClass::kFormat, "unknown physical type");
    c.role = static_cast<ColumnRole>(role);
    c.type = static_cast<PhysicalType>(type);
    c.mantissa_bits = r.get<std::uint8_t>();
    if (r.get<std::uint8_t>() != 0) raise(ErrorClass::kFormat, "nonzero reserved column byte");
  }
  if (r.remaining() != 0) raise(ErrorClass::kFormat, "trailing bytes in header record");
  try {
    check_header_tree(h);
  } catch (const Error&) {
    raise_nested(ErrorClass::kFormat, "header describes an invalid schema tree");
  }
  return h;
}

// ---------------------------------------------------------------------------
// footer

void check_footer(const Footer& f, std::span<const ColumnDescriptor> columns) {
  std::uint64_t next_entry = 0;
  std::uint64_t prev_region_end = 0;
  for (std::size_t ci = 0; ci < f.clusters.size(); ++ci) {
    const auto& c = f.clusters[ci];
    const auto ctx = "cluster " + std::to_string(ci);
    if (c.first_entry != next_entry) raise(ErrorClass::kFormat, "cluster entry ranges are not contiguous", ctx);
    if (c.entry_count > std::numeric_limits<std::uint64_t>::max() - next_entry) {
      raise(ErrorClass::kFormat, "cluster entry count overflows", ctx);
    }
    next_entry += c.entry_count;
    if (c.region_offset < prev_region_end || c.region_offset > std::numeric_limits<std::uint64_t>::max() - c.region_size) {
      raise(ErrorClass::kFormat, "cluster regions overlap or are out of order", ctx);
    }
    prev_region_end = c.region_offset + c.region_size;
    if (!columns.empty() && c.pages.size() != columns.size()) {
      raise(ErrorClass::kFormat, "cluster page table does not match column count", ctx);
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
    for (std::size_t col = 0; col < c.pages.size(); ++col) {
      for (const auto& p : c.pages[col]) {
        const auto pctx = ctx + " column " + std::to_string(col);
        check_range(p.range, pctx);
        if (p.column_id != col) raise(ErrorClass::kFormat, "page locator column id mismatch", pctx);
        if (p.element_count == 0) raise(ErrorClass::kFormat, "empty page", pctx);
        if (p.range.offset < c.region_offset || p.range.end() > prev_region_end) {
          raise(ErrorClass::kFormat, "page outside its cluster region", pctx);
        }
        if (!columns.empty() && p.range.uncompressed_size != encoded_size(columns[col].type, p.element_count)) {
          raise(ErrorClass::kFormat, "page size inconsistent with element count", pctx);
        }
        spans.emplace_back(p.range.offset, p.range.end());
      }
    }
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first < spans[i - 1].second) raise(ErrorClass::kFormat, "overlapping pages", ctx);
    }
  }
  if (next_entry != f.total_entries) {
    raise(ErrorClass::kFormat, "cluster entry counts do not sum to total_entries",
          std::to_string(next_entry) + " != " + std::to_string(f.total_entries));
  }
}

Bytes serialize_footer(const Footer& f, std::uint32_t column_count) {
  try {
    check_footer(f);
  } catch (const Error&) {
    raise_nested(ErrorClass::kConsistency, "refusing to serialize an inconsistent footer");
  }
  auto w = begin_record(kFooterRecord);
  w.put<std::uint64_t>(f.total_entries);
  w.put<std::uint32_t>(column_count);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(f.clusters.size()));
  for (const auto& c : f.clusters) {
    if (c.pages.size() != column_count) raise(ErrorClass::kConsistency, "cluster page table does not match column count");
    w.put<std::uint64_t>(c.first_entry);
    w.put<std::uint64_t>(c.entry_count);
    w.put<std::uint64_t>(c.region_offset);
    w.put<std::uint64_t>(c.region_size);
    for (const auto& column_pages : c.pages) {
      w.put<std::uint32_t>(static_cast<std::uint32_t>(column_pages.size()));
      for (const auto& p : column_pages) {
        put_range(w, p.range);
        w.put<std::uint32_t>(p.element_count);
        w.put<std::uint32_t>(p.checksum);
      }
    }
  }
  return finish_record(std::move(w));
}

Footer deserialize_footer(ByteSpan bytes) {
  auto r = open_record(bytes, kFooterRecord, "footer");
  Footer f;
  f.total_entries = r.get<std::uint64_t>();
  const auto column_count = r.get<std::uint32_t>();
  const auto cluster_count = r.get<std::uint32_t>();
  r.require_records(cluster_count, kClusterRecordMin + 4ull * column_count);
  f.clusters.resize(cluster_count);
  for (auto& c : f.clusters) {
    c.first_entry = r.get<std::uint64_t>();
    c.entry_count = r.get<std::uint64_t>();
    c.region_offset = r.get<std::uint64_t>();
    c.region_size = r.get<std::uint64_t>();
    c.pages.resize(column_count);
    for (ColumnId col = 0; col < column_count; ++col) {
      const auto npages = r.get<std::uint32_t>();
      r.require_records(npages, kPageRecordSize);
      auto& pages = c.pages[col];
      pages.resize(npages);
      for (auto& p : pages) {
        p.range = get_range(r);
        p.element_count = r.get<std::uint32_t>();
        p.checksum = r.get<std::uint32_t>();
        p.column_id = col;
      }
    }
  }
  if (r.remaining() != 0) raise(ErrorClass::kFormat, "trailing bytes in footer record");
  check_footer(f);
  return f;
}

}  // namespace colstore
