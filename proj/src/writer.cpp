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


#include "colstore/writer.hpp"

namespace colstore {

Writer::Writer(const DatasetModel& model, std::string dataset_name, Container target, const WriteOptions& options)
    : model_(model),
      schema_(model.schema()),
      sink_(std::make_unique<PageSink>(std::move(target), schema_, std::move(dataset_name), options)),
      buffers_(schema_) {}

std::unique_ptr<Writer> Writer::create(DatasetModel& model, std::string dataset_name, Container target,
                                       WriteOptions options) {
  if (model.fields().empty()) raise(ErrorClass::kSchema, "model has no fields");
  options.validate();
  model.freeze();
  return std::unique_ptr<Writer>(new Writer(model, std::move(dataset_name), std::move(target), options));
}

std::unique_ptr<Writer> Writer::create(DatasetModel& model, std::string dataset_name, const std::string& path,
                                       WriteOptions options, bool overwrite) {
  if (model.fields().empty()) raise(ErrorClass::kSchema, "model has no fields");
  options.validate();
  static_cast<void>(model.schema());  // validate before creating the file
  auto device = FileDevice::open(path, overwrite ? FileDevice::Mode::kOverwrite : FileDevice::Mode::kCreate);
  return create(model, std::move(dataset_name), Container::bare(std::move(device)), options);
}

Writer::~Writer() {
  if (!sink_->committed()) {
    try {
      commit();
    } catch (...) {
    }
  }
}

EntryIndex Writer::fill(std::span<const Value> values) {
  if (sink_->committed()) raise(ErrorClass::kUsage, "dataset already committed");
  const auto top = schema_.top_level();
  if (values.size() != top.size()) {
    raise(ErrorClass::kType, "entry has " + std::to_string(values.size()) + " values, model has " +
                                 std::to_string(top.size()) + " fields");
  }
  for (std::size_t i = 0; i < top.size(); ++i) check_value(schema_, top[i], values[i]);
  for (std::size_t i = 0; i < top.size(); ++i) append_value(schema_, top[i], values[i], buffers_);
  buffers_.count_value(0);
  buffered_bytes_ = buffers_.encoded_bytes();
  ++cluster_entries_;
  if (buffered_bytes_ >= sink_->options().cluster_size) flush_cluster();
  return entries_++;
}

void Writer::flush_cluster() {
  if (cluster_entries_ == 0) return;
  std::vector<std::uint64_t> counts(schema_.columns().size());
  for (ColumnId c = 0; c < counts.size(); ++c) {
    counts[c] = buffers_.element_count(c);
    sink_->write_column(c, buffers_.data(c), counts[c]);
  }
  sink_->commit_cluster(cluster_entries_, counts);
  buffers_.clear();
  cluster_entries_ = 0;
  buffered_bytes_ = 0;
}

void Writer::commit() {
  if (sink_->committed()) raise(ErrorClass::kUsage, "dataset already committed");
  flush_cluster();
  sink_->commit_dataset();
}

}  // namespace colstore
