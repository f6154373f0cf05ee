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


// Dataset models and entries: the set of top-level fields a writer fills or
// a reader loads, and reusable holders for one entry's values.

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colstore/schema.hpp"
#include "colstore/value.hpp"

namespace colstore {

/// Values of one entry, one per model field, in model order.
class Entry {
 public:
  Entry() = default;
  explicit Entry(std::shared_ptr<const std::vector<std::string>> names);

  std::size_t size() const noexcept { return values_.size(); }
  /// Throws kLookup for an unknown name.
  Value& operator[](std::string_view name);
  const Value& operator[](std::string_view name) const;
  Value& at(std::size_t i) { return values_.at(i); }
  const Value& at(std::size_t i) const { return values_.at(i); }
  std::span<Value> values() noexcept { return values_; }
  std::span<const Value> values() const noexcept { return values_; }
  const std::vector<std::string>& names() const noexcept { return *names_; }

 private:
  std::size_t index_of(std::string_view name) const;

  std::shared_ptr<const std::vector<std::string>> names_ = std::make_shared<const std::vector<std::string>>();
  std::vector<Value> values_;
};

/// Ordered top-level fields. Frozen when a writer is created from it or a
/// reader imposes it; later additions throw kUsage.
class DatasetModel {
 public:
  DatasetModel() = default;
  explicit DatasetModel(std::vector<FieldSpec> fields);
  /// All top-level fields of `schema`.
  static DatasetModel from_schema(const Schema& schema);
  /// The named top-level fields of `schema`, in the given order.
  static DatasetModel select(const Schema& schema, std::span<const std::string> names);

  DatasetModel& add(FieldSpec field);
  /// Adds a leaf field of C++ type T; returns its position in the entry.
  template <class T>
  std::size_t make_field(std::string name) {
    add(FieldSpec::of<T>(std::move(name)));
    return fields_.size() - 1;
  }

  void freeze() noexcept { frozen_ = true; }
  bool frozen() const noexcept { return frozen_; }
  const std::vector<FieldSpec>& fields() const noexcept { return fields_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Builds and validates the schema. Throws kSchema.
  Schema schema() const;
  Entry create_entry() const;

 private:
  std::vector<FieldSpec> fields_;
  bool frozen_ = false;
};

/// FieldSpec describing the subtree of `field` in `schema`.
FieldSpec spec_of(const Schema& schema, FieldId field);

}  // namespace colstore
