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


#include "colstore/cluster_pool.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace colstore {

ClusterPool::ClusterPool(std::shared_ptr<PageSource> source, PoolOptions options)
    : source_(std::move(source)), options_(options), pool_(options.page_budget) {
  options_.scheduler.validate();
  if (options_.access == AccessMode::kMapped) {
    if (!source_->is_uncompressed()) {
      raise(ErrorClass::kUnsupportedMode, "mapped access requires a file without compressed pages",
            source_->container().device->name());
    }
    mapping_ = source_->mapping();
  }
  const auto& footer = source_->footer();
  const auto columns = source_->schema().columns().size();
  for (const auto& c : footer.clusters) {
    cluster_first_entry_.push_back(c.first_entry);
    auto& firsts = first_elements_.emplace_back(columns);
    auto& totals = column_elements_.emplace_back(columns, 0);
    for (ColumnId col = 0; col < columns; ++col) {
      for (const auto& p : c.pages[col]) {
        firsts[col].push_back(totals[col]);
        totals[col] += p.element_count;
      }
    }
  }
  thread_ = std::thread([this] { worker(); });
}

ClusterPool::~ClusterPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  thread_.join();
  for (auto& job : queue_) job.done->set_value();
  clusters_.clear();
}

void ClusterPool::activate(std::span<const ColumnId> columns) {
  std::lock_guard lock(mutex_);
  active_.insert(columns.begin(), columns.end());
}

std::vector<ColumnId> ClusterPool::active_columns() const {
  std::lock_guard lock(mutex_);
  return {active_.begin(), active_.end()};
}

std::uint32_t ClusterPool::cluster_of(EntryIndex entry) const {
  const auto it = std::upper_bound(cluster_first_entry_.begin(), cluster_first_entry_.end(), entry);
  if (it == cluster_first_entry_.begin() || entry >= source_->footer().total_entries) {
    raise(ErrorClass::kBounds, "entry out of range",
          "entry " + std::to_string(entry) + " of " + std::to_string(source_->footer().total_entries));
  }
  return static_cast<std::uint32_t>(it - cluster_first_entry_.begin() - 1);
}

std::uint64_t ClusterPool::column_elements(std::uint32_t cluster, ColumnId column) const {
  return column_elements_.at(cluster).at(column);
}

void ClusterPool::log(PrefetchEvent::Kind kind, std::uint32_t cluster) { events_.push_back({kind, cluster}); }

std::vector<PrefetchEvent> ClusterPool::events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

unsigned ClusterPool::peak_streams() const noexcept {
  std::lock_guard lock(mutex_);
  return peak_streams_;
}

std::shared_future<void> ClusterPool::prefetch_cluster(std::uint32_t cluster) {
  if (cluster >= cluster_count()) {
    raise(ErrorClass::kBounds, "no such cluster", std::to_string(cluster) + " of " + std::to_string(cluster_count()));
  }
  std::unique_lock lock(mutex_);
  auto& state = clusters_[cluster];
  std::vector<ColumnId> missing;
  std::set_difference(active_.begin(), active_.end(), state.requested.begin(), state.requested.end(),
                      std::back_inserter(missing));
  if (missing.empty()) {
    if (!state.ready.valid()) {
      std::promise<void> done;
      done.set_value();
      state.ready = done.get_future().share();
    }
    return state.ready;
  }
  auto done = std::make_shared<std::promise<void>>();
  state.ready = done->get_future().share();
  state.requested.insert(missing.begin(), missing.end());
  queue_.push_back({cluster, std::move(missing), done});
  log(PrefetchEvent::Kind::kScheduled, cluster);
  lock.unlock();
  wake_.notify_all();
  return state.ready;
}

void ClusterPool::enter_cluster(std::uint32_t cluster) {
  const auto ahead = options_.scheduler.readahead_clusters;
  if (ahead == 0 || cluster >= cluster_count()) return;
  const auto last = static_cast<std::uint32_t>(std::min<std::uint64_t>(std::uint64_t{cluster} + ahead, cluster_count() - 1));
  std::vector<PageHandle> unpinned;
  {
    std::lock_guard lock(mutex_);
    for (auto& [c, state] : clusters_) {
      if (c < cluster || c > last) {
        std::move(state.pins.begin(), state.pins.end(), std::back_inserter(unpinned));
        state.pins.clear();
      }
    }
  }
  unpinned.clear();
  for (auto c = cluster; c <= last; ++c) prefetch_cluster(c);
}

Page ClusterPool::load(const PageLocator& loc, std::uint64_t first_element, const Bytes* disk) {
  const auto type = source_->schema().columns()[loc.column_id].type;
  if (options_.access == AccessMode::kMapped) {
    const auto view = source_->mapped_page(loc);
    const auto width = memory_width(type);
    if (type != PhysicalType::kBit && std::endian::native == std::endian::little &&
        reinterpret_cast<std::uintptr_t>(view.data()) % width == 0) {
      if (loc.element_count == 0) raise(ErrorClass::kFormat, "page with zero elements");
      return Page::borrowed(loc.column_id, first_element, loc.element_count, type, view, mapping_);
    }
    return unpack_page(view, type, loc.element_count, loc.column_id, first_element);
  }
  if (disk) return unpack_page(*disk, type, loc.element_count, loc.column_id, first_element);
  const auto bytes = source_->read_page(loc);
  return unpack_page(bytes, type, loc.element_count, loc.column_id, first_element);
}

PageHandle ClusterPool::acquire(ColumnId column, std::uint32_t cluster, std::uint64_t element) {
  if (cluster >= cluster_count()) raise(ErrorClass::kBounds, "no such cluster", std::to_string(cluster));
  if (column >= column_elements_[cluster].size()) raise(ErrorClass::kBounds, "no such column", std::to_string(column));
  const auto total = column_elements_[cluster][column];
  if (element >= total) {
    raise(ErrorClass::kBounds, "element out of range",
          "column " + std::to_string(column) + " cluster " + std::to_string(cluster) + " element " +
              std::to_string(element) + " of " + std::to_string(total));
  }
  for (;;) {
    std::unique_lock lock(mutex_);
    auto it = clusters_.find(cluster);
    if (it == clusters_.end()) break;
    auto& state = it->second;
    if (state.error) {
      const auto error = state.error;
      state.error = nullptr;
      state.requested.clear();
      state.ready = {};
      lock.unlock();
      try {
        std::rethrow_exception(error);
      } catch (const std::exception& e) {
        const auto cls = classify(e);
        raise_nested(cls, "prefetch of cluster " + std::to_string(cluster) + " failed");
      }
    }
    if (state.requested.count(column) == 0 || !state.ready.valid() ||
        state.ready.wait_for(std::chrono::seconds(0)) == std::future_status::ready) {
      break;
    }
    auto ready = state.ready;
    log(PrefetchEvent::Kind::kForegroundWait, cluster);
    lock.unlock();
    ready.wait();
  }
  const auto& firsts = first_elements_[cluster][column];
  const auto page = static_cast<std::uint32_t>(std::upper_bound(firsts.begin(), firsts.end(), element) - firsts.begin() - 1);
  const auto& loc = source_->footer().clusters[cluster].pages[column][page];
  return pool_.acquire({column, cluster, page}, [&] { return load(loc, firsts[page], nullptr); });
}

void ClusterPool::run_job(const Job& job) {
  const auto& cluster = source_->footer().clusters[job.cluster];
  std::vector<PageKey> keys;
  std::vector<PageLocator> locators;
  std::vector<PageHandle> pins;
  for (auto col : job.columns) {
    for (std::uint32_t p = 0; p < cluster.pages[col].size(); ++p) {
      const PageKey key{col, job.cluster, p};
      if (auto h = pool_.try_acquire(key)) {
        pins.push_back(std::move(h));
      } else {
        keys.push_back(key);
        locators.push_back(cluster.pages[col][p]);
      }
    }
  }
  std::vector<Bytes> disk;
  StreamStats stats;
  if (options_.access == AccessMode::kExplicit && !locators.empty()) {
    disk = source_->read_vector(locators, options_.scheduler, &stats);
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto first = first_elements_[job.cluster][keys[i].column][keys[i].page];
    pins.push_back(pool_.acquire(keys[i], [&] { return load(locators[i], first, disk.empty() ? nullptr : &disk[i]); }));
  }
  std::lock_guard lock(mutex_);
  peak_streams_ = std::max(peak_streams_, stats.peak_in_flight);
  auto& state = clusters_[job.cluster];
  std::move(pins.begin(), pins.end(), std::back_inserter(state.pins));
}

void ClusterPool::worker() {
  for (;;) {
    Job job;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || !queue_.empty(); });
      if (stop_) return;
      job = std::move(queue_.front());
      queue_.pop_front();
    }
    try {
      run_job(job);
      std::lock_guard lock(mutex_);
      log(PrefetchEvent::Kind::kCompleted, job.cluster);
    } catch (...) {
      std::lock_guard lock(mutex_);
      clusters_[job.cluster].error = std::current_exception();
      log(PrefetchEvent::Kind::kFailed, job.cluster);
    }
    job.done->set_value();
  }
}

}  // namespace colstore
