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

// The logical data model: a tree of typed fields, and the deterministic rules
// that shred each field into columns of fundamental types.
//
//   bool/int/float  -> one value column (bool -> Bit)
//   string          -> offset column + char data column
//   collection      -> offset column, item mapped recursively
//   fixed array     -> no column, item mapped with length-multiplied indexing
//   record          -> no column, members mapped recursively
//   variant         -> tag column (UInt32, 1-based), alternatives mapped
//                      recursively with independent indexing

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "colstore/descriptors.hpp"

namespace colstore {

/// Declarative description of a field subtree, used to build schemas.
class FieldSpec {
 public:
  static FieldSpec leaf(std::string name, FieldType type);
  static FieldSpec string(std::string name);
  /// Item is renamed to "_0".
  static FieldSpec collection(std::string name, FieldSpec item);
  static FieldSpec array(std::string name, std::uint64_t length, FieldSpec item);
  static FieldSpec record(std::string name, std::vector<FieldSpec> members);
  /// Alternatives are renamed "_0", "_1", ...
  static FieldSpec variant(std::string name, std::vector<FieldSpec> alternatives);

  template <class T>
  static FieldSpec of(std::string name);

  /// Reduced precision for float leaves: keep only `bits` mantissa bits.
  FieldSpec& with_mantissa_bits(std::uint8_t bits) {
    mantissa_bits_ = bits;
    return *this;
  }

  const std::string& name() const noexcept { return name_; }
  const FieldType& type() const noexcept { return type_; }
  const std::vector<FieldSpec>& children() const noexcept { return children_; }
  std::uint8_t mantissa_bits() const noexcept { return mantissa_bits_; }

  bool operator==(const FieldSpec&) const = default;

 private:
  FieldSpec(std::string name, FieldType type, std::vector<FieldSpec> children = {})
      : name_(std::move(name)), type_(type), children_(std::move(children)) {}

  std::string name_;
  FieldType type_;
  std::vector<FieldSpec> children_;
  std::uint8_t mantissa_bits_ = 0;
};

template <class T>
FieldSpec FieldSpec::of(std::string name) {
  if constexpr (std::is_same_v<T, bool>) {
    return leaf(std::move(name), FieldType::boolean());
  } else if constexpr (std::is_integral_v<T>) {
    return leaf(std::move(name), FieldType::integer(sizeof(T) * 8, std::is_signed_v<T>));
  } else if constexpr (std::is_floating_point_v<T>) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    return leaf(std::move(name), FieldType::floating(sizeof(T) * 8));
  } else if constexpr (std::is_same_v<T, std::string>) {
    return string(std::move(name));
  } else {
    static_assert(sizeof(T) == 0, "unsupported leaf type");
  }
}

struct SchemaViolation {
  std::optional<FieldId> field;
  std::string message;
};

/// Collects every invariant violation of a descriptor tree (duplicate sibling
/// names, dangling parents, arity rules, unsupported widths, cycles).
std::vector<SchemaViolation> validate_schema(std::span<const FieldDescriptor> fields);

/// Columns of the subtree rooted at `field`, in pre-order with a field's
/// offset/tag column first. Ids are assigned consecutively from `first_id`.
std::vector<ColumnDescriptor> map_field_to_columns(const FieldDescriptor& field,
                                                   std::span<const FieldDescriptor> tree,
                                                   ColumnId first_id = 0);

/// Physical type of a leaf field's value column.
PhysicalType leaf_physical_type(const FieldType& type);

/// An immutable, validated schema: field tree plus column table.
class Schema {
 public:
  Schema();

  /// Builds the tree under an anonymous root record. Throws kSchema listing
  /// all violations.
  static Schema from_specs(std::span<const FieldSpec> top_level);
  /// Rebuilds and re-validates a schema read from a header. Throws kFormat if
  /// the stored column table disagrees with the mapping rules.
  static Schema from_header(const Header& header);

  Header to_header(std::string dataset_name) const;

  const std::vector<FieldDescriptor>& fields() const noexcept { return fields_; }
  const std::vector<ColumnDescriptor>& columns() const noexcept { return columns_; }
  const FieldDescriptor& field(FieldId id) const { return fields_.at(id); }
  const FieldDescriptor& root() const { return fields_.front(); }
  std::span<const FieldId> top_level() const { return root().children; }

  /// The field's own columns (offset/tag/value/chars), not its descendants.
  std::span<const ColumnId> columns_of(FieldId id) const;
  std::vector<ColumnId> subtree_columns(FieldId id) const;
  std::vector<FieldId> subtree_fields(FieldId id) const;

  /// Dot-separated path from the root, e.g. "particles._0.energy".
  std::string path_of(FieldId id) const;
  std::optional<FieldId> find(std::string_view path) const;
  /// Like find, but throws kLookup listing the available top-level names.
  FieldId lookup(std::string_view path) const;

  /// True if every ancestor below the root is a record, i.e. the field has
  /// exactly one value per entry.
  bool is_entry_indexed(FieldId id) const;

  /// Equality of field tree and column table (what fast merge requires).
  bool structurally_equal(const Schema& other) const;
  /// Path of the first field that differs, empty if structurally equal.
  std::string first_difference(const Schema& other) const;

  /// Indented textual dump of the field tree with column assignments.
  std::string dump() const;

  bool operator==(const Schema& other) const { return structurally_equal(other); }

 private:
  void index();

  std::vector<FieldDescriptor> fields_;
  std::vector<ColumnDescriptor> columns_;
  std::vector<std::vector<ColumnId>> own_columns_;
};

}  // namespace colstore
