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

// Shredding of values into column buffers and reassembly from columns.
//
// All element indices are cluster-local. Offset columns hold end positions:
// a collection value i spans child elements [offset[i-1], offset[i]) with
// offset[-1] = 0 at the start of every cluster.

#pragma once

#include <cstdint>
#include <cstring>
#include <map>
#include <span>
#include <vector>

#include "colstore/format.hpp"
#include "colstore/schema.hpp"
#include "colstore/value.hpp"

namespace colstore {

/// Per-cluster write buffers: one growing buffer per column in in-memory
/// element layout (booleans one byte each) and a logical value counter per
/// field. Single writer.
class ColumnWriteBuffers {
 public:
  explicit ColumnWriteBuffers(const Schema& schema);

  template <class T>
  void push(ColumnId column, T value) {
    auto& buf = columns_[column];
    const auto at = buf.size();
    buf.resize(at + sizeof(T));
    std::memcpy(buf.data() + at, &value, sizeof(T));
    ++counts_[column];
  }
  void push_chars(ColumnId column, std::string_view chars);
  void count_value(FieldId field) { ++values_[field]; }

  std::uint64_t element_count(ColumnId column) const { return counts_[column]; }
  std::uint64_t value_count(FieldId field) const { return values_[field]; }
  ByteSpan data(ColumnId column) const { return columns_[column]; }
  std::size_t column_count() const noexcept { return columns_.size(); }

  /// Encoded (on-disk, pre-compression) size of everything buffered.
  std::uint64_t encoded_bytes() const;

  /// Starts a new cluster: buffers emptied, all counters restart at 0.
  void clear();

 private:
  const Schema* schema_;
  std::vector<Bytes> columns_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> values_;
};

/// Checks that `value` has the shape of `field` without touching any buffer.
/// Throws kType naming the offending field path.
void check_value(const Schema& schema, FieldId field, const Value& value);

/// Appends one logical value of `field`. The value must already have passed
/// check_value (otherwise buffers may be left partially written).
void append_value(const Schema& schema, FieldId field, const Value& value, ColumnWriteBuffers& buffers);

/// Column access for reassembly, scoped to one cluster.
class ColumnReadState {
 public:
  virtual ~ColumnReadState() = default;

  /// Number of elements of `column` in the current cluster.
  virtual std::uint64_t element_count(ColumnId column) = 0;
  /// Copies elements [first, first + count) in in-memory layout into `out`.
  virtual void read(ColumnId column, std::uint64_t first, std::uint64_t count, std::span<std::byte> out) = 0;

  template <class T>
  T read_one(ColumnId column, std::uint64_t index) {
    T v;
    read(column, index, 1, std::as_writable_bytes(std::span<T, 1>(&v, 1)));
    return v;
  }

  /// Position of variant value `index` among the values holding the same
  /// alternative. Built per tag column on first use and cached until
  /// reset_variant_cache().
  std::uint64_t variant_local_index(ColumnId tag_column, std::uint64_t index);

 protected:
  void reset_variant_cache() { variant_cache_.clear(); }

 private:
  std::map<ColumnId, std::vector<std::uint64_t>> variant_cache_;
};

/// Reassembles value `index` of `field` from columns. Throws kBounds for an
/// index past the field's values and kCorruption for inconsistent columns
/// (tag 0, decreasing offsets, offsets past the child column).
Value read_value(const Schema& schema, FieldId field, std::uint64_t index, ColumnReadState& state);
/// Same, reusing the storage already held by `out`.
void read_value_into(const Schema& schema, FieldId field, std::uint64_t index, ColumnReadState& state, Value& out);

/// Read state over in-memory write buffers (round-trips without storage).
class BufferReadState final : public ColumnReadState {
 public:
  explicit BufferReadState(const ColumnWriteBuffers& buffers) : buffers_(&buffers) {}

  std::uint64_t element_count(ColumnId column) override { return buffers_->element_count(column); }
  void read(ColumnId column, std::uint64_t first, std::uint64_t count, std::span<std::byte> out) override;

 private:
  const ColumnWriteBuffers* buffers_;
};

}  // namespace colstore
