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

#include "colstore/shredding.hpp"

#include <cmath>
#include <limits>

#include "colstore/error.hpp"

namespace colstore {

namespace {

constexpr std::uint64_t kUnknownCount = std::numeric_limits<std::uint64_t>::max();

[[noreturn]] void type_error(const Schema& schema, FieldId field, const std::string& what) {
  raise(ErrorClass::kType, what, "field '" + schema.path_of(field) + "'");
}

template <class T>
bool int_fits(const Value& v) {
  if (v.is<std::int64_t>()) {
    const auto s = v.as<std::int64_t>();
    if constexpr (std::is_signed_v<T>) {
      return s >= std::numeric_limits<T>::min() && s <= std::numeric_limits<T>::max();
    } else {
      return s >= 0 && static_cast<std::uint64_t>(s) <= std::numeric_limits<T>::max();
    }
  }
  if (v.is<std::uint64_t>()) return v.as<std::uint64_t>() <= static_cast<std::uint64_t>(std::numeric_limits<T>::max());
  return false;
}

template <class T>
T int_value(const Value& v) {
  if (v.is<std::int64_t>()) return static_cast<T>(v.as<std::int64_t>());
  return static_cast<T>(v.as<std::uint64_t>());
}

bool int_fits(const FieldType& t, const Value& v) {
  switch (t.width_bits) {
    case 8: return t.is_signed ? int_fits<std::int8_t>(v) : int_fits<std::uint8_t>(v);
    case 16: return t.is_signed ? int_fits<std::int16_t>(v) : int_fits<std::uint16_t>(v);
    case 32: return t.is_signed ? int_fits<std::int32_t>(v) : int_fits<std::uint32_t>(v);
    case 64: return t.is_signed ? int_fits<std::int64_t>(v) : int_fits<std::uint64_t>(v);
    default: return false;
  }
}

void push_int(ColumnId col, const FieldType& t, const Value& v, ColumnWriteBuffers& b) {
  switch (t.width_bits) {
    case 8: t.is_signed ? b.push(col, int_value<std::int8_t>(v)) : b.push(col, int_value<std::uint8_t>(v)); break;
    case 16: t.is_signed ? b.push(col, int_value<std::int16_t>(v)) : b.push(col, int_value<std::uint16_t>(v)); break;
    case 32: t.is_signed ? b.push(col, int_value<std::int32_t>(v)) : b.push(col, int_value<std::uint32_t>(v)); break;
    default: t.is_signed ? b.push(col, int_value<std::int64_t>(v)) : b.push(col, int_value<std::uint64_t>(v)); break;
  }
}

template <class T>
Value typed_int(ColumnReadState& s, ColumnId col, std::uint64_t i) {
  return Value(s.read_one<T>(col, i));
}

Value read_int(const FieldType& t, ColumnReadState& s, ColumnId col, std::uint64_t i) {
  switch (t.width_bits) {
    case 8: return t.is_signed ? typed_int<std::int8_t>(s, col, i) : typed_int<std::uint8_t>(s, col, i);
    case 16: return t.is_signed ? typed_int<std::int16_t>(s, col, i) : typed_int<std::uint16_t>(s, col, i);
    case 32: return t.is_signed ? typed_int<std::int32_t>(s, col, i) : typed_int<std::uint32_t>(s, col, i);
    default: return t.is_signed ? typed_int<std::int64_t>(s, col, i) : typed_int<std::uint64_t>(s, col, i);
  }
}

// Number of logical values `field` holds in the current cluster, derived from
// the first column found in its subtree. kUnknownCount for column-less
// subtrees (records without members).
std::uint64_t value_count(const Schema& schema, FieldId field, ColumnReadState& s) {
  const auto& f = schema.field(field);
  const auto own = schema.columns_of(field);
  if (!own.empty()) return s.element_count(own.front());
  if (f.type.kind == FieldKind::kFixedArray) {
    const auto child = value_count(schema, f.children.front(), s);
    return child == kUnknownCount ? child : child / f.type.array_length;
  }
  for (auto c : f.children) {
    const auto n = value_count(schema, c, s);
    if (n != kUnknownCount) return n;
  }
  return kUnknownCount;
}

// [begin, end) of value i of an offset column.
std::pair<std::uint64_t, std::uint64_t> offset_range(const Schema& schema, FieldId field, ColumnId offset_column,
                                                     std::uint64_t i, std::uint64_t child_count, ColumnReadState& s) {
  const auto end = s.read_one<std::uint64_t>(offset_column, i);
  const auto begin = i == 0 ? 0 : s.read_one<std::uint64_t>(offset_column, i - 1);
  if (begin > end || end > child_count) {
    raise(ErrorClass::kCorruption, "inconsistent offset column",
          "field '" + schema.path_of(field) + "' element " + std::to_string(i) + ": [" + std::to_string(begin) + ", " +
              std::to_string(end) + ") of " + std::to_string(child_count));
  }
  return {begin, end};
}

void read_into(const Schema& schema, FieldId field, std::uint64_t i, ColumnReadState& s, Value& out, bool nested) {
  const auto& f = schema.field(field);
  const auto own = schema.columns_of(field);
  if (!own.empty() && i >= s.element_count(own.front())) {
    raise(nested ? ErrorClass::kCorruption : ErrorClass::kBounds, "index out of range",
          "field '" + schema.path_of(field) + "' index " + std::to_string(i) + " of " +
              std::to_string(s.element_count(own.front())));
  }
  switch (f.type.kind) {
    case FieldKind::kBool:
      out = Value(s.read_one<std::uint8_t>(own[0], i) != 0);
      return;
    case FieldKind::kInt:
      out = read_int(f.type, s, own[0], i);
      return;
    case FieldKind::kFloat:
      if (f.type.width_bits == 32) {
        out = Value(s.read_one<float>(own[0], i));
      } else {
        out = Value(s.read_one<double>(own[0], i));
      }
      return;
    case FieldKind::kString: {
      const auto [begin, end] = offset_range(schema, field, own[0], i, s.element_count(own[1]), s);
      if (!out.is<std::string>()) out = Value(std::string());
      auto& str = out.as<std::string>();
      str.resize(end - begin);
      if (end > begin) s.read(own[1], begin, end - begin, std::as_writable_bytes(std::span(str.data(), str.size())));
      return;
    }
    case FieldKind::kCollection: {
      const auto child = f.children.front();
      const auto [begin, end] = offset_range(schema, field, own[0], i, value_count(schema, child, s), s);
      if (!out.is<Value::List>()) out = Value(Value::List{});
      auto& items = out.items();
      items.resize(end - begin);
      for (std::uint64_t j = begin; j < end; ++j) read_into(schema, child, j, s, items[j - begin], true);
      return;
    }
    case FieldKind::kFixedArray: {
      const auto len = f.type.array_length;
      if (len != 0 && i > std::numeric_limits<std::uint64_t>::max() / len - 1) {
        raise(ErrorClass::kBounds, "fixed array index overflow", "field '" + schema.path_of(field) + "'");
      }
      const auto child = f.children.front();
      const auto available = value_count(schema, child, s);
      if (available != kUnknownCount && (i + 1) * len > available) {
        raise(nested ? ErrorClass::kCorruption : ErrorClass::kBounds, "index out of range",
              "field '" + schema.path_of(field) + "' index " + std::to_string(i));
      }
      if (!out.is<Value::List>()) out = Value(Value::List{});
      auto& items = out.items();
      items.resize(len);
      for (std::uint64_t j = 0; j < len; ++j) read_into(schema, child, i * len + j, s, items[j], nested);
      return;
    }
    case FieldKind::kRecord: {
      if (!out.is<Value::List>()) out = Value(Value::List{});
      auto& items = out.items();
      items.resize(f.children.size());
      for (std::size_t j = 0; j < f.children.size(); ++j) read_into(schema, f.children[j], i, s, items[j], nested);
      return;
    }
    case FieldKind::kVariant: {
      const auto tag = s.read_one<std::uint32_t>(own[0], i);
      if (tag == 0 || tag > f.children.size()) {
        raise(ErrorClass::kCorruption, "invalid variant tag " + std::to_string(tag),
              "field '" + schema.path_of(field) + "' element " + std::to_string(i));
      }
      const auto local = s.variant_local_index(own[0], i);
      Value payload;
      if (out.is<VariantValue>() && out.as<VariantValue>().alternative() == tag - 1) {
        payload = std::move(out.as<VariantValue>().payload());
      }
      read_into(schema, f.children[tag - 1], local, s, payload, true);
      out = Value::variant(tag - 1, std::move(payload));
      return;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

ColumnWriteBuffers::ColumnWriteBuffers(const Schema& schema)
    : schema_(&schema),
      columns_(schema.columns().size()),
      counts_(schema.columns().size(), 0),
      values_(schema.fields().size(), 0) {}

void ColumnWriteBuffers::push_chars(ColumnId column, std::string_view chars) {
  auto& buf = columns_[column];
  const auto at = buf.size();
  buf.resize(at + chars.size());
  std::memcpy(buf.data() + at, chars.data(), chars.size());
  counts_[column] += chars.size();
}

std::uint64_t ColumnWriteBuffers::encoded_bytes() const {
  std::uint64_t total = 0;
  for (std::size_t c = 0; c < columns_.size(); ++c) total += encoded_size(schema_->columns()[c].type, counts_[c]);
  return total;
}

void ColumnWriteBuffers::clear() {
  for (auto& c : columns_) c.clear();
  std::fill(counts_.begin(), counts_.end(), 0);
  std::fill(values_.begin(), values_.end(), 0);
}

void check_value(const Schema& schema, FieldId field, const Value& value) {
  const auto& f = schema.field(field);
  auto expect = [&](bool ok, std::string_view expected) {
    if (!ok) {
      type_error(schema, field, "expected " + std::string(expected) + ", got " + std::string(value.kind_name()));
    }
  };
  switch (f.type.kind) {
    case FieldKind::kBool:
      expect(value.is<bool>(), "bool");
      return;
    case FieldKind::kInt:
      expect(value.is<std::int64_t>() || value.is<std::uint64_t>(), "integer");
      if (!int_fits(f.type, value)) type_error(schema, field, "integer out of range for " + f.type.to_string());
      return;
    case FieldKind::kFloat:
      expect(value.is<float>() || value.is<double>(), "floating value");
      if (f.type.width_bits == 32 && value.is<double>()) {
        const auto d = value.as<double>();
        if (std::isfinite(d) && std::fabs(d) > std::numeric_limits<float>::max()) {
          type_error(schema, field, "value out of range for float32");
        }
      }
      return;
    case FieldKind::kString:
      expect(value.is<std::string>(), "string");
      return;
    case FieldKind::kCollection:
      expect(value.is<Value::List>(), "list");
      for (const auto& item : value.items()) check_value(schema, f.children.front(), item);
      return;
    case FieldKind::kFixedArray:
      expect(value.is<Value::List>(), "list");
      if (value.items().size() != f.type.array_length) {
        type_error(schema, field, "fixed array expects " + std::to_string(f.type.array_length) + " items, got " +
                                      std::to_string(value.items().size()));
      }
      for (const auto& item : value.items()) check_value(schema, f.children.front(), item);
      return;
    case FieldKind::kRecord:
      expect(value.is<Value::List>(), "record (list of members)");
      if (value.items().size() != f.children.size()) {
        type_error(schema, field, "record expects " + std::to_string(f.children.size()) + " members, got " +
                                      std::to_string(value.items().size()));
      }
      for (std::size_t i = 0; i < f.children.size(); ++i) check_value(schema, f.children[i], value.items()[i]);
      return;
    case FieldKind::kVariant: {
      expect(value.is<VariantValue>(), "variant");
      const auto& v = value.as<VariantValue>();
      if (v.alternative() >= f.children.size()) {
        type_error(schema, field, "variant alternative " + std::to_string(v.alternative()) + " out of range");
      }
      check_value(schema, f.children[v.alternative()], v.payload());
      return;
    }
  }
}

void append_value(const Schema& schema, FieldId field, const Value& value, ColumnWriteBuffers& b) {
  const auto& f = schema.field(field);
  const auto own = schema.columns_of(field);
  switch (f.type.kind) {
    case FieldKind::kBool:
      b.push<std::uint8_t>(own[0], value.as<bool>() ? 1 : 0);
      break;
    case FieldKind::kInt:
      push_int(own[0], f.type, value, b);
      break;
    case FieldKind::kFloat:
      if (f.type.width_bits == 32) {
        b.push<float>(own[0], value.is<float>() ? value.as<float>() : static_cast<float>(value.as<double>()));
      } else {
        b.push<double>(own[0], value.is<double>() ? value.as<double>() : static_cast<double>(value.as<float>()));
      }
      break;
    case FieldKind::kString:
      b.push_chars(own[1], value.as<std::string>());
      b.push<std::uint64_t>(own[0], b.element_count(own[1]));
      break;
    case FieldKind::kCollection:
      for (const auto& item : value.items()) append_value(schema, f.children.front(), item, b);
      b.push<std::uint64_t>(own[0], b.value_count(f.children.front()));
      break;
    case FieldKind::kFixedArray:
      for (const auto& item : value.items()) append_value(schema, f.children.front(), item, b);
      break;
    case FieldKind::kRecord:
      for (std::size_t i = 0; i < f.children.size(); ++i) append_value(schema, f.children[i], value.items()[i], b);
      break;
    case FieldKind::kVariant: {
      const auto& v = value.as<VariantValue>();
      b.push<std::uint32_t>(own[0], v.alternative() + 1);
      append_value(schema, f.children[v.alternative()], v.payload(), b);
      break;
    }
  }
  b.count_value(field);
}

std::uint64_t ColumnReadState::variant_local_index(ColumnId tag_column, std::uint64_t index) {
  auto it = variant_cache_.find(tag_column);
  if (it == variant_cache_.end()) {
    const auto n = element_count(tag_column);
    std::vector<std::uint32_t> tags(n);
    if (n > 0) read(tag_column, 0, n, std::as_writable_bytes(std::span(tags)));
    std::vector<std::uint64_t> local(n);
    std::map<std::uint32_t, std::uint64_t> seen;
    for (std::uint64_t i = 0; i < n; ++i) local[i] = seen[tags[i]]++;
    it = variant_cache_.emplace(tag_column, std::move(local)).first;
  }
  if (index >= it->second.size()) raise(ErrorClass::kBounds, "variant index out of range");
  return it->second[index];
}

Value read_value(const Schema& schema, FieldId field, std::uint64_t index, ColumnReadState& state) {
  Value out;
  read_into(schema, field, index, state, out, false);
  return out;
}

void read_value_into(const Schema& schema, FieldId field, std::uint64_t index, ColumnReadState& state, Value& out) {
  read_into(schema, field, index, state, out, false);
}

void BufferReadState::read(ColumnId column, std::uint64_t first, std::uint64_t count, std::span<std::byte> out) {
  const auto data = buffers_->data(column);
  const auto n = buffers_->element_count(column);
  if (first > n || count > n - first) raise(ErrorClass::kBounds, "read past buffered elements");
  const auto width = n == 0 ? 0 : data.size() / n;
  std::memcpy(out.data(), data.data() + first * width, count * width);
}

}  // namespace colstore
