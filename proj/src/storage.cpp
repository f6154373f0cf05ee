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


#include "colstore/storage.hpp"

#include <algorithm>
#include <limits>

#include "colstore/codec.hpp"
#include "colstore/pages.hpp"

namespace colstore {

void WriteOptions::validate() const {
  if (page_size < 8 || page_size > (1u << 30)) {
    raise(ErrorClass::kConfig, "page size must be between 8 bytes and 1 GiB", std::to_string(page_size));
  }
  if (cluster_size == 0) raise(ErrorClass::kConfig, "cluster size must be positive");
  if (codec >= kCodecCount) raise(ErrorClass::kConfig, "unknown codec id " + std::to_string(codec));
}

std::uint32_t page_capacity(PhysicalType type, std::uint32_t page_size) noexcept {
  if (type == PhysicalType::kBit) {
    const auto bits = std::min<std::uint64_t>(std::uint64_t{page_size} * 8, std::numeric_limits<std::uint32_t>::max());
    return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(bits));
  }
  return std::max<std::uint32_t>(1, page_size / static_cast<std::uint32_t>(disk_width(type)));
}

// ---------------------------------------------------------------------------

PageSink::PageSink(Container container, const Schema& schema, std::string dataset_name, const WriteOptions& options)
    : container_(std::move(container)), schema_(&schema), options_(options) {
  options_.validate();
  if (!container_.device) raise(ErrorClass::kUsage, "page sink needs a device");
  const auto header = serialize_header(schema.to_header(std::move(dataset_name)));
  if (header.size() > std::numeric_limits<std::uint32_t>::max()) raise(ErrorClass::kSchema, "header too large");
  envelope_.feature_flags = options_.page_checksums ? feature::kPageChecksums : 0;
  envelope_.header_locator = {kEnvelopeSize, static_cast<std::uint32_t>(header.size()),
                              static_cast<std::uint32_t>(header.size()), 0};
  // Zeroed until commit_dataset.
  const Bytes placeholder(kEnvelopeSize);
  write(placeholder);
  write(header);
  cluster_start_ = position_;
  pending_.pages.resize(schema.columns().size());
}

void PageSink::write(ByteSpan data) {
  container_.device->write_at(container_.region_offset + position_, data);
  position_ += data.size();
}

std::string PageSink::column_label(ColumnId column) const {
  const auto& c = schema_->columns().at(column);
  return "column " + std::to_string(column) + " (" + std::string(column_role_name(c.role)) + " of '" +
         schema_->path_of(c.owner_field) + "')";
}

PageLocator PageSink::write_page(ColumnId column, ByteSpan packed, std::uint32_t element_count) {
  if (committed_) raise(ErrorClass::kUsage, "dataset already committed");
  if (column >= pending_.pages.size()) raise(ErrorClass::kUsage, "no such column", std::to_string(column));
  if (packed.empty() || element_count == 0) raise(ErrorClass::kUsage, "empty page rejected", column_label(column));
  const auto type = schema_->columns()[column].type;
  if (packed.size() != encoded_size(type, element_count)) {
    raise(ErrorClass::kConsistency, "packed page size does not match element count", column_label(column));
  }
  if (packed.size() > std::numeric_limits<std::uint32_t>::max()) raise(ErrorClass::kUsage, "page too large");
  PageLocator loc;
  loc.column_id = column;
  loc.element_count = element_count;
  loc.range.offset = position_;
  loc.range.uncompressed_size = static_cast<std::uint32_t>(packed.size());
  Bytes compressed;
  ByteSpan stored = packed;
  if (options_.codec != 0) {
    compressed = compress(packed, options_.codec);
    if (compressed.size() < packed.size()) {
      stored = compressed;
      loc.range.codec_id = options_.codec;
    }
  }
  loc.range.compressed_size = static_cast<std::uint32_t>(stored.size());
  if (options_.page_checksums) loc.checksum = crc32(stored);
  write(stored);
  pending_.pages[column].push_back(loc);
  return loc;
}

void PageSink::write_column(ColumnId column, ByteSpan memory, std::uint64_t count) {
  const auto& desc = schema_->columns().at(column);
  const auto width = memory_width(desc.type);
  const auto capacity = page_capacity(desc.type, options_.page_size);
  for (std::uint64_t first = 0; first < count; first += capacity) {
    const auto n = static_cast<std::uint32_t>(std::min<std::uint64_t>(capacity, count - first));
    const auto packed = pack_elements(memory.subspan(first * width, std::uint64_t{n} * width), desc.type, n,
                                      desc.mantissa_bits);
    write_page(column, packed, n);
  }
}

const ClusterDescriptor& PageSink::commit_cluster(std::uint64_t entry_count,
                                                  std::span<const std::uint64_t> column_elements) {
  if (committed_) raise(ErrorClass::kUsage, "dataset already committed");
  if (column_elements.size() != pending_.pages.size()) {
    raise(ErrorClass::kConsistency, "column count mismatch at cluster commit");
  }
  for (ColumnId c = 0; c < pending_.pages.size(); ++c) {
    std::uint64_t have = 0;
    for (const auto& p : pending_.pages[c]) have += p.element_count;
    if (have != column_elements[c]) {
      raise(ErrorClass::kConsistency,
            "column holds " + std::to_string(have) + " elements, expected " + std::to_string(column_elements[c]),
            column_label(c));
    }
  }
  pending_.first_entry = footer_.total_entries;
  pending_.entry_count = entry_count;
  pending_.region_offset = cluster_start_;
  pending_.region_size = position_ - cluster_start_;
  footer_.clusters.push_back(std::move(pending_));
  footer_.total_entries += entry_count;
  pending_ = {};
  pending_.pages.resize(schema_->columns().size());
  cluster_start_ = position_;
  return footer_.clusters.back();
}

const ClusterDescriptor& PageSink::append_region(const ClusterDescriptor& source, ByteSpan region) {
  if (committed_) raise(ErrorClass::kUsage, "dataset already committed");
  if (position_ != cluster_start_) raise(ErrorClass::kUsage, "cannot append a region into an open cluster");
  if (region.size() != source.region_size) raise(ErrorClass::kConsistency, "region size mismatch");
  if (source.pages.size() != schema_->columns().size()) {
    raise(ErrorClass::kConsistency, "cluster page table does not match column count");
  }
  ClusterDescriptor c = source;
  c.first_entry = footer_.total_entries;
  c.region_offset = position_;
  for (auto& column : c.pages) {
    for (auto& p : column) p.range.offset = p.range.offset - source.region_offset + position_;
  }
  write(region);
  footer_.clusters.push_back(std::move(c));
  footer_.total_entries += source.entry_count;
  cluster_start_ = position_;
  return footer_.clusters.back();
}

void PageSink::commit_dataset() {
  if (committed_) raise(ErrorClass::kUsage, "dataset already committed");
  if (position_ != cluster_start_) raise(ErrorClass::kUsage, "uncommitted cluster pages at dataset commit");
  const auto footer = serialize_footer(footer_, static_cast<std::uint32_t>(schema_->columns().size()));
  if (footer.size() > std::numeric_limits<std::uint32_t>::max()) raise(ErrorClass::kFormat, "footer too large");
  envelope_.footer_locator = {position_, static_cast<std::uint32_t>(footer.size()),
                              static_cast<std::uint32_t>(footer.size()), 0};
  write(footer);
  container_.device->write_at(container_.region_offset, serialize_envelope(envelope_));
  container_.device->sync();
  committed_ = true;
}

// ---------------------------------------------------------------------------

std::shared_ptr<PageSource> PageSource::open(Container container, std::string_view dataset_name) {
  if (!container.device) raise(ErrorClass::kUsage, "page source needs a device");
  std::shared_ptr<PageSource> s(new PageSource(std::move(container)));
  const auto device_size = s->container_.device->size();
  if (device_size < s->container_.region_offset) {
    raise(ErrorClass::kTruncation, "region offset beyond end of device",
          std::to_string(s->container_.region_offset) + " > " + std::to_string(device_size));
  }
  s->region_size_ = device_size - s->container_.region_offset;
  if (s->region_size_ < kEnvelopeSize) {
    raise(ErrorClass::kTruncation, "file shorter than the envelope", std::to_string(s->region_size_) + " bytes");
  }
  Bytes envelope(kEnvelopeSize);
  s->read_raw(0, envelope);
  s->envelope_ = deserialize_envelope(envelope);
  auto read_record = [&](const ByteRange& r, std::string_view what) {
    if (r.end() > s->region_size_) {
      raise(ErrorClass::kTruncation, std::string(what) + " extends past end of file",
            "offset " + std::to_string(r.offset) + " size " + std::to_string(r.compressed_size));
    }
    Bytes bytes(r.compressed_size);
    s->read_raw(r.offset, bytes);
    return bytes;
  };
  try {
    s->header_ = deserialize_header(read_record(s->envelope_.header_locator, "header"));
    s->schema_ = Schema::from_header(s->header_);
  } catch (const Error&) {
    raise_nested(ErrorClass::kFormat, "invalid header", "offset " + std::to_string(s->envelope_.header_locator.offset));
  }
  try {
    s->footer_ = deserialize_footer(read_record(s->envelope_.footer_locator, "footer"));
    check_footer(s->footer_, s->schema_.columns());
  } catch (const Error&) {
    raise_nested(ErrorClass::kFormat, "invalid footer", "offset " + std::to_string(s->envelope_.footer_locator.offset));
  }
  if (!s->footer_.clusters.empty() && s->footer_.clusters.back().region_offset + s->footer_.clusters.back().region_size >
                                          s->envelope_.footer_locator.offset) {
    raise(ErrorClass::kFormat, "cluster data overlaps the footer");
  }
  if (!dataset_name.empty() && dataset_name != s->header_.dataset_name) {
    raise(ErrorClass::kLookup, "dataset '" + std::string(dataset_name) + "' not found",
          "file holds '" + s->header_.dataset_name + "'");
  }
  return s;
}

std::uint64_t PageSource::metadata_bytes() const noexcept {
  return kEnvelopeSize + envelope_.header_locator.compressed_size + envelope_.footer_locator.compressed_size;
}

std::uint64_t PageSource::payload_bytes() const noexcept {
  std::uint64_t total = 0;
  for (const auto& c : footer_.clusters) {
    for (const auto& col : c.pages) {
      for (const auto& p : col) total += p.range.compressed_size;
    }
  }
  return total;
}

bool PageSource::is_uncompressed() const noexcept {
  for (const auto& c : footer_.clusters) {
    for (const auto& col : c.pages) {
      for (const auto& p : col) {
        if (p.range.codec_id != 0) return false;
      }
    }
  }
  return true;
}

void PageSource::count(std::uint64_t bytes) noexcept {
  bytes_read_.fetch_add(bytes, std::memory_order_relaxed);
  requests_.fetch_add(1, std::memory_order_relaxed);
}

void PageSource::read_raw(std::uint64_t offset, std::span<std::byte> out) {
  if (offset > region_size_ || out.size() > region_size_ - offset) {
    raise(ErrorClass::kTruncation, "read past end of dataset region",
          "offset " + std::to_string(offset) + " size " + std::to_string(out.size()));
  }
  count(out.size());
  container_.device->read_at(container_.region_offset + offset, out);
}

void PageSource::check_locator(const PageLocator& loc) const {
  if (loc.range.end() > region_size_) {
    raise(ErrorClass::kTruncation, "page extends past end of file",
          "column " + std::to_string(loc.column_id) + " offset " + std::to_string(loc.range.offset));
  }
}

Bytes PageSource::decode_page(const PageLocator& loc, ByteSpan stored) const {
  const auto where = [&] {
    return "column " + std::to_string(loc.column_id) + " page at offset " + std::to_string(loc.range.offset);
  };
  if (stored.size() != loc.range.compressed_size) raise(ErrorClass::kCorruption, "short page read", where());
  if (has_page_checksums() && crc32(stored) != loc.checksum) raise(ErrorClass::kCorruption, "page checksum mismatch", where());
  Bytes out(loc.range.uncompressed_size);
  try {
    decompress(stored, loc.range.codec_id, out);
  } catch (const Error&) {
    raise_nested(ErrorClass::kCorruption, "cannot decode page", where());
  }
  pages_decoded_.fetch_add(1, std::memory_order_relaxed);
  return out;
}

Bytes PageSource::read_page(const PageLocator& loc) {
  check_locator(loc);
  Bytes stored(loc.range.compressed_size);
  read_raw(loc.range.offset, stored);
  return decode_page(loc, stored);
}

std::vector<Bytes> PageSource::read_vector(std::span<const PageLocator> locators, const SchedulerConfig& config,
                                           StreamStats* stats) {
  std::vector<ByteRange> ranges;
  ranges.reserve(locators.size());
  for (const auto& loc : locators) {
    check_locator(loc);
    ranges.push_back(loc.range);
  }
  const auto plan = plan_requests(ranges, config);
  std::vector<Bytes> stored(locators.size());
  for (std::size_t i = 0; i < locators.size(); ++i) stored[i].resize(locators[i].range.compressed_size);
  execute_streams(
      plan, config.stream_count,
      [&](std::size_t q) {
        const auto& req = plan[q];
        Bytes buffer(req.length);
        read_raw(req.offset, buffer);
        for (const auto& t : req.targets) {
          std::copy_n(buffer.begin() + static_cast<std::ptrdiff_t>(t.request_offset), t.length,
                      stored[t.locator].begin() + static_cast<std::ptrdiff_t>(t.locator_offset));
        }
      },
      stats);
  std::vector<Bytes> out(locators.size());
  for (std::size_t i = 0; i < locators.size(); ++i) out[i] = decode_page(locators[i], stored[i]);
  return out;
}

std::shared_ptr<const Mapping> PageSource::mapping() {
  std::lock_guard lock(map_mutex_);
  if (!mapping_) mapping_ = container_.device->map();
  return mapping_;
}

ByteSpan PageSource::mapped_page(const PageLocator& loc) {
  if (loc.range.codec_id != 0) {
    raise(ErrorClass::kUnsupportedMode, "mapped access requires uncompressed pages",
          "column " + std::to_string(loc.column_id) + " page uses codec " + std::string(codec_name(loc.range.codec_id)));
  }
  check_locator(loc);
  const auto m = mapping();
  const auto base = container_.region_offset + loc.range.offset;
  if (base + loc.range.compressed_size > m->bytes().size()) raise(ErrorClass::kTruncation, "page outside mapping");
  const auto view = m->bytes().subspan(base, loc.range.compressed_size);
  if (has_page_checksums() && crc32(view) != loc.checksum) {
    raise(ErrorClass::kCorruption, "page checksum mismatch",
          "column " + std::to_string(loc.column_id) + " page at offset " + std::to_string(loc.range.offset));
  }
  pages_decoded_.fetch_add(1, std::memory_order_relaxed);
  return view;
}

ReadCounters PageSource::counters() const noexcept {
  return {bytes_read_.load(), requests_.load(), pages_decoded_.load()};
}

void PageSource::reset_counters() noexcept {
  bytes_read_ = 0;
  requests_ = 0;
  pages_decoded_ = 0;
}

}  // namespace colstore
