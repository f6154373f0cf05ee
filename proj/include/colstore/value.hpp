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

#pragma once

#include <concepts>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace colstore {

class Value;

/// The chosen alternative of a variant field (0-based) and its payload.
class VariantValue {
 public:
  VariantValue(std::uint32_t alternative, Value payload);
  VariantValue(const VariantValue& other);
  VariantValue& operator=(const VariantValue& other);
  VariantValue(VariantValue&&) noexcept = default;
  VariantValue& operator=(VariantValue&&) noexcept = default;
  ~VariantValue();

  std::uint32_t alternative() const noexcept { return alternative_; }
  const Value& payload() const noexcept { return *payload_; }
  Value& payload() noexcept { return *payload_; }

  bool operator==(const VariantValue& other) const;

 private:
  std::uint32_t alternative_;
  std::unique_ptr<Value> payload_;
};

/// Dynamically typed value of any field. Records, collections and fixed
/// arrays are lists (records positionally, in member order). Signed integers
/// are held as int64, unsigned as uint64; float32 and float64 keep their
/// width. Floating values compare by bit pattern.
class Value {
 public:
  using List = std::vector<Value>;
  using Storage = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, float, double, std::string, List,
                               VariantValue>;

  Value() = default;
  Value(bool v) : data_(v) {}  // NOLINT(google-explicit-constructor)
  template <std::integral T>
    requires(!std::same_as<T, bool> && !std::same_as<T, char>)
  Value(T v) {  // NOLINT(google-explicit-constructor)
    if constexpr (std::is_signed_v<T>) {
      data_ = static_cast<std::int64_t>(v);
    } else {
      data_ = static_cast<std::uint64_t>(v);
    }
  }
  Value(float v) : data_(v) {}                        // NOLINT(google-explicit-constructor)
  Value(double v) : data_(v) {}                       // NOLINT(google-explicit-constructor)
  Value(std::string v) : data_(std::move(v)) {}       // NOLINT(google-explicit-constructor)
  Value(const char* v) : data_(std::string(v)) {}     // NOLINT(google-explicit-constructor)
  Value(std::string_view v) : data_(std::string(v)) {}  // NOLINT(google-explicit-constructor)
  Value(List v) : data_(std::move(v)) {}              // NOLINT(google-explicit-constructor)
  Value(VariantValue v) : data_(std::move(v)) {}      // NOLINT(google-explicit-constructor)

  static Value list(List items) { return Value(std::move(items)); }
  static Value variant(std::uint32_t alternative, Value payload) {
    return Value(VariantValue(alternative, std::move(payload)));
  }

  bool is_empty() const noexcept { return std::holds_alternative<std::monostate>(data_); }
  template <class T>
  bool is() const noexcept {
    return std::holds_alternative<T>(data_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(data_);
  }
  template <class T>
  T& as() {
    return std::get<T>(data_);
  }
  const List& items() const { return std::get<List>(data_); }
  List& items() { return std::get<List>(data_); }

  const Storage& data() const noexcept { return data_; }
  Storage& data() noexcept { return data_; }

  /// Short type tag for diagnostics ("bool", "int", "list", ...).
  std::string_view kind_name() const noexcept;

  bool operator==(const Value& other) const;

 private:
  Storage data_;
};

}  // namespace colstore
