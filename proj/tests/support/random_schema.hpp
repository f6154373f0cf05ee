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


// Seeded random schemas and values for round-trip properties.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "colstore/schema.hpp"
#include "colstore/value.hpp"

namespace colstore::testing_random {

struct Options {
  int max_depth = 4;
  int max_top_level = 6;
  int max_members = 4;
  std::uint64_t max_collection_size = 64;
};

class Generator {
 public:
  explicit Generator(std::uint64_t seed, Options options = {}) : rng_(seed), options_(options) {}

  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& rng() { return rng_; }

  std::vector<FieldSpec> schema() {
    std::vector<FieldSpec> top;
    const auto n = uniform(1, static_cast<std::uint64_t>(options_.max_top_level));
    for (std::uint64_t i = 0; i < n; ++i) top.push_back(field("f" + std::to_string(i), 1));
    return top;
  }

  FieldSpec field(std::string name, int depth) {
    const bool can_nest = depth < options_.max_depth;
    const auto kind = uniform(0, can_nest ? 9 : 4);
    switch (kind) {
      case 0: return FieldSpec::of<bool>(std::move(name));
      case 1: return int_leaf(std::move(name));
      case 2: return coin() ? FieldSpec::of<float>(std::move(name)) : FieldSpec::of<double>(std::move(name));
      case 3: return FieldSpec::string(std::move(name));
      case 4: return int_leaf(std::move(name));
      case 5:
      case 6: return FieldSpec::collection(std::move(name), field("item", depth + 1));
      case 7: return FieldSpec::array(std::move(name), uniform(1, 4), field("item", depth + 1));
      case 8: {
        std::vector<FieldSpec> members;
        const auto n = uniform(0, static_cast<std::uint64_t>(options_.max_members));
        for (std::uint64_t i = 0; i < n; ++i) members.push_back(field("m" + std::to_string(i), depth + 1));
        return FieldSpec::record(std::move(name), std::move(members));
      }
      default: {
        std::vector<FieldSpec> alts;
        const auto n = uniform(1, 3);
        for (std::uint64_t i = 0; i < n; ++i) alts.push_back(field("alt", depth + 1));
        return FieldSpec::variant(std::move(name), std::move(alts));
      }
    }
  }

  Value value(const FieldSpec& spec, std::uint64_t max_size) {
    const auto& t = spec.type();
    switch (t.kind) {
      case FieldKind::kBool: return Value(coin());
      case FieldKind::kInt: return int_value(t);
      case FieldKind::kFloat:
        if (t.width_bits == 32) return Value(std::uniform_real_distribution<float>(-1e3f, 1e3f)(rng_));
        return Value(std::uniform_real_distribution<double>(-1e9, 1e9)(rng_));
      case FieldKind::kString: {
        std::string s(uniform(0, std::min<std::uint64_t>(max_size, 16)), ' ');
        for (auto& c : s) c = static_cast<char>(uniform(0, 255));
        return Value(std::move(s));
      }
      case FieldKind::kCollection: {
        Value::List items(uniform(0, max_size));
        for (auto& v : items) v = value(spec.children().front(), max_size / 4);
        return Value::list(std::move(items));
      }
      case FieldKind::kFixedArray: {
        Value::List items(t.array_length);
        for (auto& v : items) v = value(spec.children().front(), max_size / 4);
        return Value::list(std::move(items));
      }
      case FieldKind::kRecord: {
        Value::List items;
        for (const auto& m : spec.children()) items.push_back(value(m, max_size));
        return Value::list(std::move(items));
      }
      case FieldKind::kVariant: {
        const auto alt = static_cast<std::uint32_t>(uniform(0, spec.children().size() - 1));
        return Value::variant(alt, value(spec.children()[alt], max_size));
      }
    }
    return {};
  }

  /// One entry: positional values of the top-level fields.
  std::vector<Value> entry(const std::vector<FieldSpec>& top) {
    std::vector<Value> out;
    const auto size = uniform(0, options_.max_collection_size);
    for (const auto& f : top) out.push_back(value(f, size));
    return out;
  }

 private:
  FieldSpec int_leaf(std::string name) {
    switch (uniform(0, 7)) {
      case 0: return FieldSpec::of<std::int8_t>(std::move(name));
      case 1: return FieldSpec::of<std::uint8_t>(std::move(name));
      case 2: return FieldSpec::of<std::int16_t>(std::move(name));
      case 3: return FieldSpec::of<std::uint16_t>(std::move(name));
      case 4: return FieldSpec::of<std::int32_t>(std::move(name));
      case 5: return FieldSpec::of<std::uint32_t>(std::move(name));
      case 6: return FieldSpec::of<std::int64_t>(std::move(name));
      default: return FieldSpec::of<std::uint64_t>(std::move(name));
    }
  }

  Value int_value(const FieldType& t) {
    const auto bits = static_cast<unsigned>(rng_());
    const auto raw = rng_();
    const auto shift = 64 - t.width_bits;
    if (t.is_signed) {
      const auto v = static_cast<std::int64_t>(raw) >> shift;
      return Value(bits % 4 == 0 ? std::int64_t{0} : v);
    }
    return Value(raw >> shift);
  }

  std::mt19937_64 rng_;
  Options options_;
};

}  // namespace colstore::testing_random
