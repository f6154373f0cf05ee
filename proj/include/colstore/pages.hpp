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


// In-memory pages, packing between memory and disk layout, and the pool of
// resident pages shared by views, entry loading and prefetching.

#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "colstore/descriptors.hpp"
#include "colstore/format.hpp"

namespace colstore {

/// A run of consecutive elements of one column in memory layout (booleans
/// one byte each). The payload is either owned or borrowed from a longer
/// lived buffer such as a file mapping.
class Page {
 public:
  Page() = default;
  Page(ColumnId column, std::uint64_t first_element, std::uint32_t element_count, PhysicalType type, Bytes payload);
  static Page borrowed(ColumnId column, std::uint64_t first_element, std::uint32_t element_count, PhysicalType type,
                       ByteSpan payload, std::shared_ptr<const void> owner);

  ColumnId column() const noexcept { return column_; }
  std::uint64_t first_element() const noexcept { return first_; }
  std::uint32_t element_count() const noexcept { return count_; }
  std::uint64_t end_element() const noexcept { return first_ + count_; }
  PhysicalType type() const noexcept { return type_; }
  ByteSpan bytes() const noexcept { return view_; }
  bool is_borrowed() const noexcept { return owned_.empty() && !view_.empty(); }

  template <class T>
  const T* data() const noexcept {
    return reinterpret_cast<const T*>(view_.data());
  }

 private:
  ColumnId column_ = 0;
  std::uint64_t first_ = 0;
  std::uint32_t count_ = 0;
  PhysicalType type_ = PhysicalType::kByte;
  Bytes owned_;
  ByteSpan view_;
  std::shared_ptr<const void> owner_;
};

/// Zeroes all but the `bits` most significant mantissa bits. bits == 0 or
/// bits >= the full mantissa width leaves the value unchanged.
float truncate_mantissa(float value, unsigned bits) noexcept;
double truncate_mantissa(double value, unsigned bits) noexcept;

/// Memory layout -> disk layout. Identity copy except for Bit (bit-packed)
/// and float columns with reduced mantissa precision.
Bytes pack_elements(ByteSpan memory, PhysicalType type, std::uint64_t count, unsigned mantissa_bits = 0);
Bytes pack_page(const Page& page, unsigned mantissa_bits = 0);

/// Disk layout -> memory layout into `out` (sized count * memory_width).
/// Throws kCorruption when the buffer length does not match.
void unpack_elements(ByteSpan disk, PhysicalType type, std::uint64_t count, std::span<std::byte> out);
/// Throws kFormat for a zero element count.
Page unpack_page(ByteSpan disk, PhysicalType type, std::uint32_t count, ColumnId column = 0,
                 std::uint64_t first_element = 0);

/// Identity of a stored page: column, cluster and position in the cluster's
/// page list for that column.
struct PageKey {
  ColumnId column = 0;
  std::uint32_t cluster = 0;
  std::uint32_t page = 0;
  bool operator==(const PageKey&) const = default;
};

struct PageKeyHash {
  std::size_t operator()(const PageKey& k) const noexcept {
    return std::hash<std::uint64_t>()((std::uint64_t{k.column} << 40) ^ (std::uint64_t{k.cluster} << 20) ^ k.page);
  }
};

class PagePool;

/// Counted reference to a resident page. The page stays resident while any
/// handle to it is alive.
class PageHandle {
 public:
  PageHandle() = default;
  PageHandle(const PageHandle& other);
  PageHandle& operator=(const PageHandle& other);
  PageHandle(PageHandle&& other) noexcept;
  PageHandle& operator=(PageHandle&& other) noexcept;
  ~PageHandle();

  explicit operator bool() const noexcept { return page_ != nullptr; }
  const Page& operator*() const noexcept { return *page_; }
  const Page* operator->() const noexcept { return page_; }
  const Page* get() const noexcept { return page_; }
  void reset();

 private:
  friend class PagePool;
  PageHandle(PagePool* pool, PageKey key, const Page* page) : pool_(pool), key_(key), page_(page) {}

  PagePool* pool_ = nullptr;
  PageKey key_;
  const Page* page_ = nullptr;
};

struct PagePoolStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t resident_pages = 0;
  std::uint64_t resident_bytes = 0;
  std::uint64_t peak_resident_pages = 0;
  std::uint64_t peak_resident_bytes = 0;
  std::uint64_t live_references = 0;
};

/// Thread-safe pool of resident pages with reference counting and
/// least-recently-released eviction. Pages with live references are never
/// evicted; when every resident page is referenced the budget is exceeded
/// rather than failing the load.
class PagePool {
 public:
  using Loader = std::function<Page()>;

  explicit PagePool(std::uint64_t budget_bytes);
  PagePool(const PagePool&) = delete;
  PagePool& operator=(const PagePool&) = delete;
  ~PagePool();

  /// Returns the resident page for `key`, calling `loader` on a miss. A
  /// concurrent acquire of a page being loaded waits for that load. Loader
  /// exceptions propagate; the page is then not resident.
  PageHandle acquire(const PageKey& key, const Loader& loader);
  /// Returns an empty handle when the page is not resident.
  PageHandle try_acquire(const PageKey& key);
  bool contains(const PageKey& key) const;

  /// Drops every unreferenced page.
  void clear();
  std::uint64_t budget() const noexcept { return budget_; }
  PagePoolStats stats() const;

 private:
  friend class PageHandle;

  struct Slot {
    std::unique_ptr<Page> page;
    std::uint64_t bytes = 0;
    std::uint64_t refs = 0;
    bool loading = false;
    std::list<PageKey>::iterator lru;
  };

  void add_ref(const PageKey& key);
  void release(const PageKey& key);
  void make_room(std::uint64_t incoming);
  void evict_oldest();

  const std::uint64_t budget_;
  mutable std::mutex mutex_;
  std::condition_variable loaded_;
  std::unordered_map<PageKey, Slot, PageKeyHash> slots_;
  std::list<PageKey> lru_;  // unreferenced resident pages, least recent first
  PagePoolStats stats_;
};

}  // namespace colstore
