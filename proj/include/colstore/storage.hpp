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


// Page sinks and sources: compression, container layout and byte-level
// instrumentation.
//
// File layout (offsets relative to the container region):
//   [envelope 64 B][header][cluster 0 pages][cluster 1 pages]...[footer]
// The header is written at creation, each cluster's pages as one
// contiguous region at cluster commit (column-major, pages in element
// order), the footer and the final envelope at dataset commit.

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "colstore/device.hpp"
#include "colstore/format.hpp"
#include "colstore/scheduler.hpp"
#include "colstore/schema.hpp"

namespace colstore {

struct WriteOptions {
  std::uint32_t page_size = 64 * 1024;
  std::uint64_t cluster_size = 32 * 1024 * 1024;
  std::uint8_t codec = 2;  // zstd
  bool page_checksums = true;

  /// Throws kConfig for a page size below 8 bytes or above 1 GiB, a zero
  /// cluster size, or an unknown codec.
  void validate() const;
};

/// Maximum number of elements of `type` in one page of `page_size` bytes.
std::uint32_t page_capacity(PhysicalType type, std::uint32_t page_size) noexcept;

class PageSink {
 public:
  /// Writes the provisional envelope and the header.
  PageSink(Container container, const Schema& schema, std::string dataset_name, const WriteOptions& options);
  PageSink(const PageSink&) = delete;
  PageSink& operator=(const PageSink&) = delete;

  /// Compresses and appends one packed page of the current cluster. Pages
  /// that do not shrink are stored with codec 0. Rejects empty pages.
  PageLocator write_page(ColumnId column, ByteSpan packed, std::uint32_t element_count);
  /// Slices `count` elements in memory layout into pages, packs and writes
  /// them.
  void write_column(ColumnId column, ByteSpan memory, std::uint64_t count);

  /// Closes the current cluster. `column_elements[c]` is the number of
  /// elements column c must hold; a mismatch throws kConsistency naming the
  /// column.
  const ClusterDescriptor& commit_cluster(std::uint64_t entry_count, std::span<const std::uint64_t> column_elements);

  /// Appends a cluster copied verbatim from another dataset: `region` holds
  /// the source cluster's bytes, `source` its descriptor. Page offsets and
  /// first_entry are rebased.
  const ClusterDescriptor& append_region(const ClusterDescriptor& source, ByteSpan region);

  /// Writes footer and final envelope. A second call throws kUsage.
  void commit_dataset();

  bool committed() const noexcept { return committed_; }
  const Footer& footer() const noexcept { return footer_; }
  const Schema& schema() const noexcept { return *schema_; }
  const WriteOptions& options() const noexcept { return options_; }
  /// Bytes written so far relative to the region start.
  std::uint64_t position() const noexcept { return position_; }

 private:
  void write(ByteSpan data);
  std::string column_label(ColumnId column) const;

  Container container_;
  const Schema* schema_;
  WriteOptions options_;
  FileEnvelope envelope_;
  Footer footer_;
  ClusterDescriptor pending_;
  std::uint64_t position_ = 0;
  std::uint64_t cluster_start_ = 0;
  bool committed_ = false;
};

struct ReadCounters {
  std::uint64_t bytes_read = 0;
  std::uint64_t requests = 0;
  std::uint64_t pages_decoded = 0;
};

/// Read access to one committed dataset. All members are safe to call from
/// several threads; counters are atomic.
class PageSource {
 public:
  /// Reads and validates envelope, header and footer. With a non-empty
  /// `dataset_name` the stored name must match (kLookup otherwise).
  static std::shared_ptr<PageSource> open(Container container, std::string_view dataset_name = {});

  const FileEnvelope& envelope() const noexcept { return envelope_; }
  const Header& header() const noexcept { return header_; }
  const Schema& schema() const noexcept { return schema_; }
  const Footer& footer() const noexcept { return footer_; }
  const Container& container() const noexcept { return container_; }
  bool has_page_checksums() const noexcept { return (envelope_.feature_flags & feature::kPageChecksums) != 0; }

  /// Envelope, header and footer bytes.
  std::uint64_t metadata_bytes() const noexcept;
  /// Sum of stored page sizes.
  std::uint64_t payload_bytes() const noexcept;
  /// True if every page is stored with codec 0.
  bool is_uncompressed() const noexcept;

  /// One device request; returns the page in disk layout, decompressed.
  Bytes read_page(const PageLocator& locator);
  /// Verifies the checksum and decompresses stored page bytes.
  Bytes decode_page(const PageLocator& locator, ByteSpan stored) const;
  /// Reads the given pages through the request planner; results in input
  /// order, decompressed.
  std::vector<Bytes> read_vector(std::span<const PageLocator> locators, const SchedulerConfig& config,
                                 StreamStats* stats = nullptr);
  /// One device request for raw region bytes.
  void read_raw(std::uint64_t offset, std::span<std::byte> out);

  /// Zero-copy view of a stored page in a mapping of the device. Requires a
  /// codec-0 page (kUnsupportedMode otherwise); verifies the checksum.
  ByteSpan mapped_page(const PageLocator& locator);
  /// The mapping backing mapped_page, created on first use.
  std::shared_ptr<const Mapping> mapping();

  ReadCounters counters() const noexcept;
  void reset_counters() noexcept;

 private:
  PageSource(Container container) : container_(std::move(container)) {}
  void check_locator(const PageLocator& locator) const;
  void count(std::uint64_t bytes) noexcept;

  Container container_;
  std::uint64_t region_size_ = 0;
  FileEnvelope envelope_;
  Header header_;
  Schema schema_;
  Footer footer_;
  std::mutex map_mutex_;
  std::shared_ptr<const Mapping> mapping_;
  mutable std::atomic<std::uint64_t> bytes_read_{0};
  mutable std::atomic<std::uint64_t> requests_{0};
  mutable std::atomic<std::uint64_t> pages_decoded_{0};
};

}  // namespace colstore
