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


#pragma once

#include <memory>
#include <span>
#include <string>

#include "colstore/model.hpp"
#include "colstore/shredding.hpp"
#include "colstore/storage.hpp"

namespace colstore {

/// Single-threaded dataset writer. Entries are buffered per column and
/// written as one cluster whenever the buffered encoded size reaches the
/// cluster size.
class Writer {
 public:
  /// Freezes `model`. Throws kSchema for an invalid model.
  static std::unique_ptr<Writer> create(DatasetModel& model, std::string dataset_name, Container target,
                                        WriteOptions options = {});
  /// Creates `path`; an existing file is an error unless `overwrite`.
  static std::unique_ptr<Writer> create(DatasetModel& model, std::string dataset_name, const std::string& path,
                                        WriteOptions options = {}, bool overwrite = false);

  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;
  /// Commits if commit() has not been called; errors are swallowed.
  ~Writer();

  Entry create_entry() const { return model_.create_entry(); }
  /// Appends one entry, all or nothing: a value of the wrong shape throws
  /// kType and leaves the dataset unchanged. Returns the entry index.
  EntryIndex fill(const Entry& entry) { return fill(entry.values()); }
  EntryIndex fill(std::span<const Value> values);

  /// Writes buffered entries as a cluster (no-op when none are buffered).
  void flush_cluster();
  /// Flushes and finalizes the file. Further fills throw kUsage.
  void commit();

  std::uint64_t entry_count() const noexcept { return entries_; }
  std::size_t cluster_count() const noexcept { return sink_->footer().clusters.size(); }
  const Schema& schema() const noexcept { return schema_; }
  const DatasetModel& model() const noexcept { return model_; }

 private:
  Writer(const DatasetModel& model, std::string dataset_name, Container target, const WriteOptions& options);

  DatasetModel model_;
  Schema schema_;
  std::unique_ptr<PageSink> sink_;
  ColumnWriteBuffers buffers_;
  std::uint64_t entries_ = 0;
  std::uint64_t cluster_entries_ = 0;
  std::uint64_t buffered_bytes_ = 0;
};

}  // namespace colstore
