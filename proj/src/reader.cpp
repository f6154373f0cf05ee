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


#include "colstore/reader.hpp"

#include <algorithm>

namespace colstore {

void PoolReadState::set_cluster(std::uint32_t cluster) {
  if (cluster == cluster_) return;
  cluster_ = cluster;
  cache_.clear();
  reset_variant_cache();
}

std::uint64_t PoolReadState::element_count(ColumnId column) { return pool_->column_elements(cluster_, column); }

const Page& PoolReadState::page(ColumnId column, std::uint64_t element) {
  if (column >= cache_.size()) cache_.resize(column + 1);
  auto& h = cache_[column];
  if (!h || element < h->first_element() || element >= h->end_element()) h = pool_->acquire(column, cluster_, element);
  return *h;
}

void PoolReadState::read(ColumnId column, std::uint64_t first, std::uint64_t count, std::span<std::byte> out) {
  const auto width = memory_width(pool_->source().schema().columns()[column].type);
  if (out.size() < count * width) raise(ErrorClass::kConsistency, "read buffer too small");
  std::size_t at = 0;
  while (count > 0) {
    const auto& p = page(column, first);
    const auto n = std::min<std::uint64_t>(count, p.end_element() - first);
    std::memcpy(out.data() + at, p.bytes().data() + (first - p.first_element()) * width, n * width);
    at += n * width;
    first += n;
    count -= n;
  }
}

const Value& ValueView::operator()(EntryIndex entry) {
  const auto cluster = pool_->cluster_of(entry);
  state_.set_cluster(cluster);
  read_value_into(*schema_, field_, entry - pool_->cluster_first_entry(cluster), state_, value_);
  return value_;
}

EntryRange::iterator::iterator(ClusterPool* pool, EntryIndex index, EntryIndex end)
    : pool_(pool), index_(index), end_(end) {
  if (pool_ && index_ < end_) enter();
}

void EntryRange::iterator::enter() {
  const auto cluster = pool_->cluster_of(index_);
  boundary_ = cluster + 1 < pool_->cluster_count() ? pool_->cluster_first_entry(cluster + 1) : end_;
  pool_->enter_cluster(cluster);
}

EntryRange::iterator& EntryRange::iterator::operator++() {
  ++index_;
  if (pool_ && index_ == boundary_ && index_ < end_) enter();
  return *this;
}

namespace {

// First mismatch between a model field and the stored field, as
// "path: expected X, found Y"; empty when they agree.
std::string compare_specs(const FieldSpec& want, const FieldSpec& have, const std::string& path) {
  if (want.type() != have.type() || want.children().size() != have.children().size()) {
    auto describe = [](const FieldSpec& s) {
      auto text = s.type().to_string();
      if (!s.children().empty()) text += " with " + std::to_string(s.children().size()) + " children";
      return text;
    };
    return path + "': expected " + describe(want) + ", found " + describe(have);
  }
  for (std::size_t i = 0; i < want.children().size(); ++i) {
    const auto& w = want.children()[i];
    const auto& h = have.children()[i];
    if (w.name() != h.name()) return path + "': expected member '" + w.name() + "', found '" + h.name() + "'";
    auto diff = compare_specs(w, h, path + "." + w.name());
    if (!diff.empty()) return diff;
  }
  return {};
}

}  // namespace

Reader::Reader(std::shared_ptr<PageSource> source, const DatasetModel* model, ReaderOptions options)
    : pool_(std::make_unique<ClusterPool>(std::move(source), options)), state_(*pool_) {
  const auto& s = schema();
  if (model) {
    for (const auto& spec : model->fields()) {
      const auto id = s.find(spec.name());
      if (!id || s.field(*id).parent_id != FieldId{0}) {
        raise(ErrorClass::kType, "model field not found on disk", "field '" + spec.name() + "'");
      }
      const auto diff = compare_specs(spec, spec_of(s, *id), spec.name());
      if (!diff.empty()) raise(ErrorClass::kType, "on-disk type does not match the model", "field '" + diff);
      model_fields_.push_back(*id);
    }
    model_ = *model;
  } else {
    model_ = DatasetModel::from_schema(s);
    model_fields_.assign(s.top_level().begin(), s.top_level().end());
  }
  model_.freeze();
}

std::unique_ptr<Reader> Reader::open(Container container, std::string_view dataset_name, const DatasetModel* model,
                                     ReaderOptions options) {
  return std::unique_ptr<Reader>(new Reader(PageSource::open(std::move(container), dataset_name), model, options));
}

std::unique_ptr<Reader> Reader::open(const std::string& path, std::string_view dataset_name, const DatasetModel* model,
                                     ReaderOptions options) {
  return open(Container::open_file(path), dataset_name, model, options);
}

std::string Reader::describe_type(FieldId id) const {
  const auto& f = schema().field(id);
  if (f.type.kind == FieldKind::kCollection) return "collection of " + schema().field(f.children.front()).type.to_string();
  return f.type.to_string();
}

FieldId Reader::bind(std::string_view path, std::optional<FieldType> expected) {
  const auto& s = schema();
  const auto id = s.lookup(path);
  if (!s.is_entry_indexed(id)) {
    raise(ErrorClass::kUsage, "views bind fields with one value per entry",
          "field '" + s.path_of(id) + "' is nested in a collection or variant");
  }
  if (expected && s.field(id).type != *expected) {
    raise(ErrorClass::kType, "view type does not match the on-disk type",
          "field '" + s.path_of(id) + "': expected " + expected->to_string() + ", found " + describe_type(id));
  }
  const auto cols = s.subtree_columns(id);
  pool_->activate(cols);
  return id;
}

ValueView Reader::value_view(std::string_view path) {
  const auto id = bind(path, std::nullopt);
  return ValueView(*pool_, schema(), id, schema().path_of(id));
}

Entry Reader::create_entry() {
  if (!model_active_) {
    std::vector<ColumnId> cols;
    for (auto id : model_fields_) {
      const auto sub = schema().subtree_columns(id);
      cols.insert(cols.end(), sub.begin(), sub.end());
    }
    pool_->activate(cols);
    model_active_ = true;
  }
  return model_.create_entry();
}

void Reader::load_entry(EntryIndex entry, Entry& holder) {
  if (entry >= entry_count()) {
    raise(ErrorClass::kBounds, "entry out of range",
          "entry " + std::to_string(entry) + " of " + std::to_string(entry_count()));
  }
  if (holder.size() != model_fields_.size()) raise(ErrorClass::kUsage, "entry holder does not belong to this reader");
  if (!model_active_) create_entry();
  const auto cluster = pool_->cluster_of(entry);
  state_.set_cluster(cluster);
  const auto local = entry - pool_->cluster_first_entry(cluster);
  for (std::size_t i = 0; i < model_fields_.size(); ++i) {
    read_value_into(schema(), model_fields_[i], local, state_, holder.at(i));
  }
}

EntryRange Reader::entries(EntryIndex begin, EntryIndex end) {
  if (begin > end || end > entry_count()) {
    raise(ErrorClass::kBounds, "invalid entry range",
          "[" + std::to_string(begin) + ", " + std::to_string(end) + ") of " + std::to_string(entry_count()));
  }
  return {*pool_, begin, end};
}

}  // namespace colstore
