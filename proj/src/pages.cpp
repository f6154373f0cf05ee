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


#include "colstore/pages.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace colstore {

Page::Page(ColumnId column, std::uint64_t first_element, std::uint32_t element_count, PhysicalType type, Bytes payload)
    : column_(column), first_(first_element), count_(element_count), type_(type), owned_(std::move(payload)) {
  if (owned_.size() != std::uint64_t{count_} * memory_width(type_)) {
    raise(ErrorClass::kConsistency, "page payload size does not match element count",
          std::to_string(owned_.size()) + " bytes for " + std::to_string(count_) + " elements");
  }
  view_ = owned_;
}

Page Page::borrowed(ColumnId column, std::uint64_t first_element, std::uint32_t element_count, PhysicalType type,
                    ByteSpan payload, std::shared_ptr<const void> owner) {
  if (payload.size() != std::uint64_t{element_count} * memory_width(type)) {
    raise(ErrorClass::kConsistency, "page payload size does not match element count");
  }
  Page p;
  p.column_ = column;
  p.first_ = first_element;
  p.count_ = element_count;
  p.type_ = type;
  p.view_ = payload;
  p.owner_ = std::move(owner);
  return p;
}

namespace {

template <class F, class U>
F truncate(F value, unsigned bits, unsigned mantissa) noexcept {
  if (bits == 0 || bits >= mantissa || std::isnan(value)) return value;
  const auto mask = ~((U{1} << (mantissa - bits)) - 1);
  return std::bit_cast<F>(static_cast<U>(std::bit_cast<U>(value) & mask));
}

template <class F>
void truncate_all(std::byte* data, std::uint64_t count, unsigned bits) {
  for (std::uint64_t i = 0; i < count; ++i) {
    F v;
    std::memcpy(&v, data + i * sizeof(F), sizeof(F));
    v = truncate_mantissa(v, bits);
    std::memcpy(data + i * sizeof(F), &v, sizeof(F));
  }
}

void swap_elements(std::span<std::byte> data, std::size_t width) noexcept {
  for (std::size_t at = 0; at + width <= data.size(); at += width) {
    for (std::size_t i = 0; i < width / 2; ++i) std::swap(data[at + i], data[at + width - 1 - i]);
  }
}

}  // namespace

float truncate_mantissa(float value, unsigned bits) noexcept {
  return truncate<float, std::uint32_t>(value, bits, 23);
}

double truncate_mantissa(double value, unsigned bits) noexcept {
  return truncate<double, std::uint64_t>(value, bits, 52);
}

Bytes pack_elements(ByteSpan memory, PhysicalType type, std::uint64_t count, unsigned mantissa_bits) {
  if (memory.size() != count * memory_width(type)) {
    raise(ErrorClass::kConsistency, "element buffer size does not match count");
  }
  Bytes out(encoded_size(type, count));
  if (type == PhysicalType::kBit) {
    pack_bits(std::span(reinterpret_cast<const std::uint8_t*>(memory.data()), memory.size()), out);
    return out;
  }
  std::copy(memory.begin(), memory.end(), out.begin());
  if (mantissa_bits != 0) {
    if (type == PhysicalType::kFloat32) truncate_all<float>(out.data(), count, mantissa_bits);
    if (type == PhysicalType::kFloat64) truncate_all<double>(out.data(), count, mantissa_bits);
  }
  if constexpr (std::endian::native == std::endian::big) swap_elements(out, disk_width(type));
  return out;
}

Bytes pack_page(const Page& page, unsigned mantissa_bits) {
  return pack_elements(page.bytes(), page.type(), page.element_count(), mantissa_bits);
}

void unpack_elements(ByteSpan disk, PhysicalType type, std::uint64_t count, std::span<std::byte> out) {
  if (disk.size() != encoded_size(type, count)) {
    raise(ErrorClass::kCorruption, "page length mismatch",
          "expected " + std::to_string(encoded_size(type, count)) + " bytes, have " + std::to_string(disk.size()));
  }
  if (out.size() != count * memory_width(type)) raise(ErrorClass::kConsistency, "output buffer size mismatch");
  if (type == PhysicalType::kBit) {
    unpack_bits(disk, count, std::span(reinterpret_cast<std::uint8_t*>(out.data()), out.size()));
    return;
  }
  std::copy(disk.begin(), disk.end(), out.begin());
  if constexpr (std::endian::native == std::endian::big) swap_elements(out, disk_width(type));
}

Page unpack_page(ByteSpan disk, PhysicalType type, std::uint32_t count, ColumnId column, std::uint64_t first_element) {
  if (count == 0) raise(ErrorClass::kFormat, "page with zero elements", "column " + std::to_string(column));
  Bytes memory(std::uint64_t{count} * memory_width(type));
  unpack_elements(disk, type, count, memory);
  return Page(column, first_element, count, type, std::move(memory));
}

// ---------------------------------------------------------------------------

PageHandle::PageHandle(const PageHandle& other) : pool_(other.pool_), key_(other.key_), page_(other.page_) {
  if (pool_) pool_->add_ref(key_);
}

PageHandle& PageHandle::operator=(const PageHandle& other) {
  if (this != &other) {
    PageHandle copy(other);
    *this = std::move(copy);
  }
  return *this;
}

PageHandle::PageHandle(PageHandle&& other) noexcept : pool_(other.pool_), key_(other.key_), page_(other.page_) {
  other.pool_ = nullptr;
  other.page_ = nullptr;
}

PageHandle& PageHandle::operator=(PageHandle&& other) noexcept {
  if (this != &other) {
    reset();
    pool_ = other.pool_;
    key_ = other.key_;
    page_ = other.page_;
    other.pool_ = nullptr;
    other.page_ = nullptr;
  }
  return *this;
}

PageHandle::~PageHandle() { reset(); }

void PageHandle::reset() {
  if (pool_) pool_->release(key_);
  pool_ = nullptr;
  page_ = nullptr;
}

PagePool::PagePool(std::uint64_t budget_bytes) : budget_(budget_bytes) {}

PagePool::~PagePool() = default;

PageHandle PagePool::acquire(const PageKey& key, const Loader& loader) {
  std::unique_lock lock(mutex_);
  for (;;) {
    auto it = slots_.find(key);
    if (it == slots_.end()) break;
    if (it->second.loading) {
      loaded_.wait(lock);
      continue;
    }
    auto& slot = it->second;
    if (slot.refs++ == 0) lru_.erase(slot.lru);
    ++stats_.hits;
    ++stats_.live_references;
    return PageHandle(this, key, slot.page.get());
  }
  ++stats_.misses;
  slots_[key].loading = true;
  lock.unlock();
  std::unique_ptr<Page> page;
  try {
    page = std::make_unique<Page>(loader());
  } catch (...) {
    lock.lock();
    slots_.erase(key);
    loaded_.notify_all();
    throw;
  }
  const std::uint64_t bytes = page->bytes().size();
  lock.lock();
  make_room(bytes);
  auto& slot = slots_[key];
  slot.page = std::move(page);
  slot.bytes = bytes;
  slot.refs = 1;
  slot.loading = false;
  ++stats_.resident_pages;
  stats_.resident_bytes += bytes;
  stats_.peak_resident_pages = std::max(stats_.peak_resident_pages, stats_.resident_pages);
  stats_.peak_resident_bytes = std::max(stats_.peak_resident_bytes, stats_.resident_bytes);
  ++stats_.live_references;
  loaded_.notify_all();
  return PageHandle(this, key, slot.page.get());
}

PageHandle PagePool::try_acquire(const PageKey& key) {
  std::lock_guard lock(mutex_);
  auto it = slots_.find(key);
  if (it == slots_.end() || it->second.loading) return {};
  auto& slot = it->second;
  if (slot.refs++ == 0) lru_.erase(slot.lru);
  ++stats_.hits;
  ++stats_.live_references;
  return PageHandle(this, key, slot.page.get());
}

bool PagePool::contains(const PageKey& key) const {
  std::lock_guard lock(mutex_);
  auto it = slots_.find(key);
  return it != slots_.end() && !it->second.loading;
}

void PagePool::clear() {
  std::lock_guard lock(mutex_);
  while (!lru_.empty()) evict_oldest();
}

PagePoolStats PagePool::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

void PagePool::add_ref(const PageKey& key) {
  std::lock_guard lock(mutex_);
  ++slots_.at(key).refs;
  ++stats_.live_references;
}

void PagePool::release(const PageKey& key) {
  std::lock_guard lock(mutex_);
  auto& slot = slots_.at(key);
  --stats_.live_references;
  if (--slot.refs == 0) {
    slot.lru = lru_.insert(lru_.end(), key);
    make_room(0);
  }
}

// Evicts least recently released pages until `incoming` more bytes fit in
// the budget or nothing unreferenced is left. Caller holds the mutex.
void PagePool::make_room(std::uint64_t incoming) {
  while (!lru_.empty() && stats_.resident_bytes + incoming > budget_) evict_oldest();
}

void PagePool::evict_oldest() {
  const auto key = lru_.front();
  lru_.pop_front();
  auto it = slots_.find(key);
  stats_.resident_bytes -= it->second.bytes;
  --stats_.resident_pages;
  ++stats_.evictions;
  slots_.erase(it);
}

}  // namespace colstore
