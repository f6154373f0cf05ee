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

#include "colstore/value.hpp"

#include <bit>

namespace colstore {

VariantValue::VariantValue(std::uint32_t alternative, Value payload)
    : alternative_(alternative), payload_(std::make_unique<Value>(std::move(payload))) {}

VariantValue::VariantValue(const VariantValue& other)
    : alternative_(other.alternative_), payload_(std::make_unique<Value>(*other.payload_)) {}

VariantValue& VariantValue::operator=(const VariantValue& other) {
  if (this != &other) {
    alternative_ = other.alternative_;
    payload_ = std::make_unique<Value>(*other.payload_);
  }
  return *this;
}

VariantValue::~VariantValue() = default;

bool VariantValue::operator==(const VariantValue& other) const {
  return alternative_ == other.alternative_ && *payload_ == *other.payload_;
}

std::string_view Value::kind_name() const noexcept {
  switch (data_.index()) {
    case 0: return "empty";
    case 1: return "bool";
    case 2: return "int";
    case 3: return "uint";
    case 4: return "float32";
    case 5: return "float64";
    case 6: return "string";
    case 7: return "list";
    case 8: return "variant";
  }
  return "?";
}

bool Value::operator==(const Value& other) const {
  if (data_.index() != other.data_.index()) return false;
  if (const auto* f = std::get_if<float>(&data_)) {
    return std::bit_cast<std::uint32_t>(*f) == std::bit_cast<std::uint32_t>(std::get<float>(other.data_));
  }
  if (const auto* d = std::get_if<double>(&data_)) {
    return std::bit_cast<std::uint64_t>(*d) == std::bit_cast<std::uint64_t>(std::get<double>(other.data_));
  }
  return data_ == other.data_;
}

}  // namespace colstore
