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


// Dataset-level tools built on the storage layer: fast merging and the
// structural validator.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "colstore/storage.hpp"

namespace colstore {

/// Concatenates datasets by copying every cluster region verbatim and
/// writing a new header and footer. All inputs must have structurally equal
/// schemas (kMerge names the first differing field) and the same feature
/// flags. The output dataset name defaults to the first input's.
void fast_merge(std::span<const Container> inputs, Container output, std::string dataset_name = {});
void fast_merge(std::span<const std::string> input_paths, const std::string& output_path, bool overwrite = false);

struct ValidationReport {
  std::vector<std::string> problems;
  std::uint64_t clusters = 0;
  std::uint64_t offset_columns_checked = 0;
  std::uint64_t elements_checked = 0;

  bool ok() const noexcept { return problems.empty(); }
};

/// Decodes every page and checks the column invariants per cluster:
/// offset columns non-decreasing with the last value equal to the child's
/// element count, variant tags in range and consistent with the
/// alternatives' value counts, top-level value counts equal to the
/// cluster's entry count. Problems are reported, not thrown.
ValidationReport validate_dataset(Container container);

}  // namespace colstore
