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


// Cluster-level page access: maps (column, cluster, element) to resident
// pages, and prefetches the pages of active columns for upcoming clusters
// on a background worker.

#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "colstore/pages.hpp"
#include "colstore/scheduler.hpp"
#include "colstore/storage.hpp"

namespace colstore {

enum class AccessMode {
  kExplicit,  // positioned reads, decompression
  kMapped,    // pages served from a mapping of the file (codec 0 only)
};

struct PoolOptions {
  SchedulerConfig scheduler;
  std::uint64_t page_budget = 256ull * 1024 * 1024;
  AccessMode access = AccessMode::kExplicit;
};

struct PrefetchEvent {
  enum class Kind { kScheduled, kCompleted, kFailed, kForegroundWait };
  Kind kind;
  std::uint32_t cluster;
};

class ClusterPool {
 public:
  /// Throws kUnsupportedMode for mapped access to a file with compressed
  /// pages.
  ClusterPool(std::shared_ptr<PageSource> source, PoolOptions options);
  ClusterPool(const ClusterPool&) = delete;
  ClusterPool& operator=(const ClusterPool&) = delete;
  ~ClusterPool();

  const PageSource& source() const noexcept { return *source_; }
  PageSource& source() noexcept { return *source_; }
  const PoolOptions& options() const noexcept { return options_; }
  PagePool& pages() noexcept { return pool_; }

  /// Adds columns to the set that prefetching loads.
  void activate(std::span<const ColumnId> columns);
  std::vector<ColumnId> active_columns() const;

  /// Queues loading every page of the active columns in `cluster` and keeps
  /// them pinned until the cluster leaves the readahead window. The future
  /// becomes ready when the load finished, successfully or not; failures are
  /// reported by the next acquire in that cluster.
  std::shared_future<void> prefetch_cluster(std::uint32_t cluster);

  /// Called when iteration reaches `cluster`: prefetches it and the next
  /// readahead_clusters clusters, and unpins clusters outside that window.
  /// No-op with readahead_clusters == 0.
  void enter_cluster(std::uint32_t cluster);

  /// Page of `column` in `cluster` holding cluster-local `element`. Waits for
  /// a pending prefetch of that cluster; rethrows its failure. Throws kBounds
  /// past the column's elements.
  PageHandle acquire(ColumnId column, std::uint32_t cluster, std::uint64_t element);

  std::uint32_t cluster_count() const noexcept { return static_cast<std::uint32_t>(first_elements_.size()); }
  /// Index of the cluster holding global `entry`.
  std::uint32_t cluster_of(EntryIndex entry) const;
  std::uint64_t column_elements(std::uint32_t cluster, ColumnId column) const;
  EntryIndex cluster_first_entry(std::uint32_t cluster) const { return cluster_first_entry_.at(cluster); }

  std::vector<PrefetchEvent> events() const;
  unsigned peak_streams() const noexcept;

 private:
  struct Job {
    std::uint32_t cluster;
    std::vector<ColumnId> columns;
    std::shared_ptr<std::promise<void>> done;
  };
  struct ClusterState {
    std::set<ColumnId> requested;
    std::shared_future<void> ready;
    std::vector<PageHandle> pins;
    std::exception_ptr error;
  };

  Page load(const PageLocator& locator, std::uint64_t first_element, const Bytes* disk);
  void run_job(const Job& job);
  void worker();
  void log(PrefetchEvent::Kind kind, std::uint32_t cluster);

  std::shared_ptr<PageSource> source_;
  PoolOptions options_;
  PagePool pool_;
  std::shared_ptr<const Mapping> mapping_;
  // first element index of every page, per cluster and column
  std::vector<std::vector<std::vector<std::uint64_t>>> first_elements_;
  std::vector<std::vector<std::uint64_t>> column_elements_;
  std::vector<EntryIndex> cluster_first_entry_;

  mutable std::mutex mutex_;
  std::condition_variable wake_;
  std::deque<Job> queue_;
  std::map<std::uint32_t, ClusterState> clusters_;
  std::set<ColumnId> active_;
  std::vector<PrefetchEvent> events_;
  unsigned peak_streams_ = 0;
  bool stop_ = false;
  std::thread thread_;
};

}  // namespace colstore
