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


// Read request planning (linearize, merge, split) and multi-stream
// execution.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "colstore/descriptors.hpp"

namespace colstore {

struct SchedulerConfig {
  std::uint64_t gap_threshold = 16 * 1024;
  std::uint64_t max_request_bytes = 8 * 1024 * 1024;
  unsigned stream_count = 1;
  unsigned readahead_clusters = 1;

  /// Throws kConfig for stream_count 0 or max_request_bytes 0.
  void validate() const;
};

/// Part of a locator served by one request.
struct RequestTarget {
  std::size_t locator = 0;        // index into the planned range list
  std::uint64_t locator_offset = 0;  // first byte within the locator
  std::uint64_t request_offset = 0;  // first byte within the request
  std::uint64_t length = 0;
};

struct ReadRequest {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  std::vector<RequestTarget> targets;

  std::uint64_t end() const noexcept { return offset + length; }
};

/// Plans device requests for `ranges` (offset, compressed_size). Ranges are
/// sorted, identical ranges served once, neighbours merged across gaps of at
/// most gap_threshold bytes, and merged extents split into requests of at
/// most max_request_bytes. Splits fall on byte boundaries, so a page can be
/// served by two consecutive requests; each split point restarts at the next
/// needed byte and each request ends on a needed byte.
std::vector<ReadRequest> plan_requests(std::span<const ByteRange> ranges, const SchedulerConfig& config);

struct StreamStats {
  std::uint64_t requests = 0;
  unsigned peak_in_flight = 0;
};

/// Runs `run(i)` for every request index using up to `stream_count`
/// concurrent workers. After the first failure no further requests start;
/// the first failure is rethrown wrapped in an error naming the request.
void execute_streams(std::span<const ReadRequest> requests, unsigned stream_count,
                     const std::function<void(std::size_t)>& run, StreamStats* stats = nullptr);

}  // namespace colstore
