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


// Synthetic benchmark samples with the structure of three analysis
// datasets:
//
//   lhcb-like   26 flat top-level fields, 85,000 entries at scale 0.01
//   h1-like    152 top-level fields incl. per-event collections, 28,000
//   cms-like  1479 top-level fields incl. per-event collections, 16,000
//
// Every field draws from one of a few seeded distributions (near-constant,
// low-cardinality, quantized, continuous) so pages compress like real data
// to varying degrees. Output is bytewise reproducible for fixed inputs.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "colstore/schema.hpp"
#include "colstore/storage.hpp"

namespace colstore {

enum class SampleShape { kLhcb, kH1, kCms };

struct ShapeInfo {
  std::string_view name;
  std::uint64_t full_entries;  // entries at scale 1
  std::size_t field_count;     // top-level fields
};

ShapeInfo shape_info(SampleShape shape) noexcept;
/// Accepts "lhcb-like" / "lhcb", "h1-like" / "h1", "cms-like" / "cms".
SampleShape parse_shape(std::string_view name);

std::vector<FieldSpec> shape_fields(SampleShape shape);
/// The top-level fields the sample analysis reads.
std::vector<std::string> shape_read_fields(SampleShape shape);
/// round(full_entries * scale), at least 1.
std::uint64_t shape_entries(SampleShape shape, double scale);

struct GenerateOptions {
  std::uint64_t seed = 1;
  double scale = 0.01;
  WriteOptions write;
  std::string dataset_name = "Events";
};

/// Writes the sample into `target`; returns the entry count.
std::uint64_t generate(SampleShape shape, const GenerateOptions& options, Container target);

}  // namespace colstore
