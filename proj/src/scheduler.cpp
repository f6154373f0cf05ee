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


#include "colstore/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "colstore/error.hpp"

namespace colstore {

void SchedulerConfig::validate() const {
  if (stream_count == 0) raise(ErrorClass::kConfig, "stream count must be at least 1");
  if (max_request_bytes == 0) raise(ErrorClass::kConfig, "max request size must be positive");
}

namespace {

struct Extent {
  std::uint64_t begin;
  std::uint64_t end;
  std::vector<std::size_t> members;  // unique range indices, ascending offset
};

}  // namespace

std::vector<ReadRequest> plan_requests(std::span<const ByteRange> ranges, const SchedulerConfig& config) {
  config.validate();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].compressed_size > 0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranges[a].offset != ranges[b].offset ? ranges[a].offset < ranges[b].offset
                                                : ranges[a].compressed_size < ranges[b].compressed_size;
  });

  // Duplicates map to the first occurrence; the plan serves them together.
  std::vector<std::vector<std::size_t>> aliases(ranges.size());
  std::vector<Extent> extents;
  const ByteRange* prev = nullptr;
  std::size_t prev_index = 0;
  for (auto i : order) {
    const auto& r = ranges[i];
    if (prev && prev->offset == r.offset && prev->compressed_size == r.compressed_size) {
      aliases[prev_index].push_back(i);
      continue;
    }
    prev = &r;
    prev_index = i;
    if (!extents.empty() && r.offset <= extents.back().end + config.gap_threshold) {
      extents.back().end = std::max(extents.back().end, r.end());
    } else {
      extents.push_back({r.offset, r.end(), {}});
    }
    extents.back().members.push_back(i);
  }

  std::vector<ReadRequest> out;
  for (const auto& ext : extents) {
    // Needed intervals of this extent, merged where ranges touch or overlap.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> needed;
    for (auto i : ext.members) {
      const auto& r = ranges[i];
      if (!needed.empty() && r.offset <= needed.back().second) {
        needed.back().second = std::max(needed.back().second, r.end());
      } else {
        needed.emplace_back(r.offset, r.end());
      }
    }
    std::size_t n = 0;
    std::uint64_t pos = needed.front().first;
    while (n < needed.size()) {
      const auto limit = pos + config.max_request_bytes;
      std::uint64_t last = pos;
      while (n < needed.size() && needed[n].first < limit) {
        last = std::min(needed[n].second, limit);
        if (needed[n].second > limit) break;
        ++n;
      }
      out.push_back({pos, last - pos, {}});
      if (n < needed.size()) pos = std::max(last, needed[n].first);
    }
  }

  // Attach locator pieces to the requests covering them.
  std::size_t first_request = 0;
  for (const auto& ext : extents) {
    for (auto i : ext.members) {
      const auto& r = ranges[i];
      while (first_request < out.size() && out[first_request].end() <= r.offset) ++first_request;
      for (auto q = first_request; q < out.size() && out[q].offset < r.end(); ++q) {
        const auto lo = std::max(out[q].offset, r.offset);
        const auto hi = std::min(out[q].end(), r.end());
        if (lo >= hi) continue;
        out[q].targets.push_back({i, lo - r.offset, lo - out[q].offset, hi - lo});
        for (auto alias : aliases[i]) out[q].targets.push_back({alias, lo - r.offset, lo - out[q].offset, hi - lo});
      }
    }
  }
  return out;
}

void execute_streams(std::span<const ReadRequest> requests, unsigned stream_count,
                     const std::function<void(std::size_t)>& run, StreamStats* stats) {
  if (stream_count == 0) raise(ErrorClass::kConfig, "stream count must be at least 1");
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::atomic<unsigned> in_flight{0};
  std::atomic<unsigned> peak{0};
  std::atomic<std::uint64_t> done{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = 0;

  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const auto i = next.fetch_add(1);
      if (i >= requests.size()) return;
      const auto now = in_flight.fetch_add(1) + 1;
      auto seen = peak.load();
      while (now > seen && !peak.compare_exchange_weak(seen, now)) {
      }
      try {
        run(i);
        done.fetch_add(1);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
          error_index = i;
        }
        failed.store(true);
      }
      in_flight.fetch_sub(1);
    }
  };

  const auto threads = static_cast<unsigned>(std::min<std::size_t>(stream_count, requests.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (stats) {
    stats->requests = done.load();
    stats->peak_in_flight = peak.load();
  }
  if (error) {
    const auto& r = requests[error_index];
    auto cls = ErrorClass::kIo;
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      cls = classify(e);
    } catch (...) {
    }
    try {
      std::rethrow_exception(error);
    } catch (...) {
      raise_nested(cls, "read request failed",
                   "request " + std::to_string(error_index) + " [" + std::to_string(r.offset) + ", +" +
                       std::to_string(r.length) + ")");
    }
  }
}

}  // namespace colstore
