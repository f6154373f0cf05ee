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


#include <gtest/gtest.h>

#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "colstore/pages.hpp"
#include "test_util.hpp"

namespace colstore {
namespace {

using testing_util::error_class_of;

Page make_page(ColumnId column, std::uint32_t count, std::uint64_t first = 0) {
  Bytes payload(count * sizeof(std::int32_t));
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto v = static_cast<std::int32_t>(first + i);
    std::memcpy(payload.data() + i * sizeof(v), &v, sizeof(v));
  }
  return Page(column, first, count, PhysicalType::kInt32, std::move(payload));
}

TEST(TruncateMantissa, KeepsLeadingBits) {
  EXPECT_EQ(truncate_mantissa(1.75f, 1), 1.5f);
  EXPECT_EQ(truncate_mantissa(1.75f, 2), 1.75f);
  EXPECT_EQ(truncate_mantissa(-3.999, 0), -3.999);
  EXPECT_EQ(truncate_mantissa(0.1f, 23), 0.1f);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(truncate_mantissa(0.1, 10)) & ((1ull << 42) - 1), 0u);
  EXPECT_TRUE(std::isnan(truncate_mantissa(std::numeric_limits<float>::quiet_NaN(), 3)));
  EXPECT_EQ(truncate_mantissa(std::numeric_limits<double>::infinity(), 3), std::numeric_limits<double>::infinity());
}

TEST(PackElements, BitsPackAndUnpack) {
  Bytes memory(11);
  for (std::size_t i = 0; i < memory.size(); ++i) memory[i] = std::byte{static_cast<unsigned char>(i % 3 == 0)};
  const auto disk = pack_elements(memory, PhysicalType::kBit, memory.size());
  ASSERT_EQ(disk.size(), 2u);
  EXPECT_EQ(std::to_integer<unsigned>(disk[0]), 0b01001001u);
  EXPECT_EQ(std::to_integer<unsigned>(disk[1]), 0b00000010u);
  Bytes back(memory.size());
  unpack_elements(disk, PhysicalType::kBit, memory.size(), back);
  EXPECT_EQ(back, memory);
}

TEST(PackElements, NonBitIsIdentity) {
  const auto page = make_page(0, 100);
  EXPECT_EQ(pack_page(page), Bytes(page.bytes().begin(), page.bytes().end()));
}

TEST(PackElements, ReducedMantissaAppliesToFloats) {
  const std::vector<float> values = {1.75f, -2.3f, 1e-3f};
  const auto disk = pack_elements(std::as_bytes(std::span(values)), PhysicalType::kFloat32, values.size(), 1);
  std::vector<float> back(values.size());
  unpack_elements(disk, PhysicalType::kFloat32, values.size(), std::as_writable_bytes(std::span(back)));
  for (std::size_t i = 0; i < values.size(); ++i) EXPECT_EQ(back[i], truncate_mantissa(values[i], 1));
}

TEST(UnpackPage, LengthMismatchAndZeroCount) {
  Bytes disk(10);
  EXPECT_EQ(error_class_of([&] { unpack_page(disk, PhysicalType::kInt32, 3); }), ErrorClass::kCorruption);
  EXPECT_EQ(error_class_of([&] { unpack_page(disk, PhysicalType::kInt32, 0); }), ErrorClass::kFormat);
  const auto page = unpack_page(Bytes(12), PhysicalType::kInt32, 3, 4, 100);
  EXPECT_EQ(page.column(), 4u);
  EXPECT_EQ(page.first_element(), 100u);
  EXPECT_EQ(page.end_element(), 103u);
}

TEST(PagePool, MissThenHit) {
  PagePool pool(1 << 20);
  int loads = 0;
  auto loader = [&] {
    ++loads;
    return make_page(1, 10);
  };
  {
    auto a = pool.acquire({1, 0, 0}, loader);
    auto b = pool.acquire({1, 0, 0}, loader);
    EXPECT_EQ(a.get(), b.get());
    EXPECT_EQ(a->data<std::int32_t>()[9], 9);
  }
  EXPECT_EQ(loads, 1);
  const auto s = pool.stats();
  EXPECT_EQ(s.misses, 1u);
  EXPECT_EQ(s.hits, 1u);
  EXPECT_EQ(s.live_references, 0u);
  EXPECT_TRUE(pool.contains({1, 0, 0}));
}

TEST(PagePool, EvictsLeastRecentlyReleased) {
  // each page is 400 bytes; budget holds two
  PagePool pool(800);
  for (std::uint32_t p = 0; p < 2; ++p) pool.acquire({0, 0, p}, [&] { return make_page(0, 100); });
  // touch page 0 so page 1 becomes the oldest release
  pool.acquire({0, 0, 0}, [&] { return make_page(0, 100); });
  pool.acquire({0, 0, 2}, [&] { return make_page(0, 100); });
  EXPECT_TRUE(pool.contains({0, 0, 0}));
  EXPECT_FALSE(pool.contains({0, 0, 1}));
  EXPECT_TRUE(pool.contains({0, 0, 2}));
  EXPECT_EQ(pool.stats().evictions, 1u);
  EXPECT_LE(pool.stats().resident_bytes, 800u);
}

TEST(PagePool, ReferencedPagesAreNeverEvicted) {
  PagePool pool(400);
  auto held = pool.acquire({0, 0, 0}, [&] { return make_page(0, 100); });
  auto second = pool.acquire({0, 0, 1}, [&] { return make_page(0, 100); });
  // budget exceeded rather than evicting live pages
  EXPECT_EQ(pool.stats().resident_pages, 2u);
  EXPECT_EQ(held->data<std::int32_t>()[5], 5);
  held.reset();
  pool.acquire({0, 0, 2}, [&] { return make_page(0, 100); });
  EXPECT_FALSE(pool.contains({0, 0, 0}));
  EXPECT_TRUE(pool.contains({0, 0, 1}));
}

TEST(PagePool, LoaderFailureLeavesNothingResident) {
  PagePool pool(1 << 20);
  EXPECT_THROW(pool.acquire({0, 0, 0}, []() -> Page { raise(ErrorClass::kIo, "boom"); }), Error);
  EXPECT_FALSE(pool.contains({0, 0, 0}));
  auto h = pool.acquire({0, 0, 0}, [&] { return make_page(0, 4); });
  EXPECT_TRUE(h);
}

TEST(PagePool, ConcurrentAcquireLoadsOnce) {
  PagePool pool(1 << 20);
  std::atomic<int> loads{0};
  std::vector<std::jthread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (std::uint32_t p = 0; p < 50; ++p) {
        auto h = pool.acquire({0, 0, p}, [&] {
          loads.fetch_add(1);
          std::this_thread::yield();
          return make_page(0, 16, p * 16);
        });
        ASSERT_EQ(h->first_element(), p * 16u);
      }
    });
  }
  threads.clear();
  EXPECT_EQ(loads.load(), 50);
  EXPECT_EQ(pool.stats().live_references, 0u);
}

TEST(PagePool, HandleCopiesCountReferences) {
  PagePool pool(1 << 20);
  auto a = pool.acquire({2, 1, 0}, [&] { return make_page(2, 4); });
  auto b = a;
  auto c = std::move(a);
  EXPECT_FALSE(a);
  EXPECT_EQ(pool.stats().live_references, 2u);
  b.reset();
  c = PageHandle();
  EXPECT_EQ(pool.stats().live_references, 0u);
  EXPECT_TRUE(pool.try_acquire({2, 1, 0}));
  EXPECT_FALSE(pool.try_acquire({2, 1, 1}));
  pool.clear();
  EXPECT_EQ(pool.stats().resident_pages, 0u);
}

}  // namespace
}  // namespace colstore
