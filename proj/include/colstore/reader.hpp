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


// Dataset reader: typed views (values served from resident pages),
// dynamically typed views, entry loading and entry-range iteration.
//
// Views and entries hold page references; they must not outlive the reader.
// A reader and its views are used by one thread at a time.

#pragma once

#include <concepts>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "colstore/cluster_pool.hpp"
#include "colstore/model.hpp"
#include "colstore/shredding.hpp"

namespace colstore {

using ReaderOptions = PoolOptions;

/// Column access through a cluster pool, bound to one cluster at a time.
class PoolReadState final : public ColumnReadState {
 public:
  explicit PoolReadState(ClusterPool& pool) : pool_(&pool) {}

  void set_cluster(std::uint32_t cluster);
  std::uint32_t cluster() const noexcept { return cluster_; }

  std::uint64_t element_count(ColumnId column) override;
  void read(ColumnId column, std::uint64_t first, std::uint64_t count, std::span<std::byte> out) override;
  /// Resident page holding cluster-local `element`; cached per column.
  const Page& page(ColumnId column, std::uint64_t element);

 private:
  ClusterPool* pool_;
  std::uint32_t cluster_ = std::numeric_limits<std::uint32_t>::max();
  std::vector<PageHandle> cache_;
};

template <class T>
concept ViewLeaf = std::same_as<T, bool> || std::same_as<T, float> || std::same_as<T, double> ||
                   (std::integral<T> && !std::same_as<T, char> && sizeof(T) <= 8);

template <ViewLeaf T>
FieldType field_type_of() {
  if constexpr (std::is_same_v<T, bool>) {
    return FieldType::boolean();
  } else if constexpr (std::is_floating_point_v<T>) {
    return FieldType::floating(sizeof(T) * 8);
  } else {
    return FieldType::integer(sizeof(T) * 8, std::is_signed_v<T>);
  }
}

/// Entry-indexed leaf field of type T. Values are read directly from the
/// resident page; the page stays referenced until the view moves on.
template <ViewLeaf T>
class View {
 public:
  T operator()(EntryIndex entry) {
    if (entry < begin_ || entry >= end_) seek(entry);
    const auto i = entry - begin_;
    if constexpr (std::is_same_v<T, bool>) {
      return page_->template data<std::uint8_t>()[i] != 0;
    } else {
      return page_->template data<T>()[i];
    }
  }
  const std::string& path() const noexcept { return path_; }

 private:
  friend class Reader;
  View(ClusterPool& pool, ColumnId column, std::string path) : pool_(&pool), column_(column), path_(std::move(path)) {}

  void seek(EntryIndex entry) {
    const auto cluster = pool_->cluster_of(entry);
    const auto first = pool_->cluster_first_entry(cluster);
    page_ = pool_->acquire(column_, cluster, entry - first);
    begin_ = first + page_->first_element();
    end_ = begin_ + page_->element_count();
  }

  ClusterPool* pool_;
  ColumnId column_;
  std::string path_;
  PageHandle page_;
  EntryIndex begin_ = 1;
  EntryIndex end_ = 0;
};

/// Entry-indexed collection of a non-boolean leaf type. The returned span
/// points into the resident page when the items lie in one page, otherwise
/// into a view-owned buffer; it is valid until the next call.
template <ViewLeaf T>
  requires(!std::same_as<T, bool>)
class CollectionView {
 public:
  std::span<const T> operator()(EntryIndex entry) {
    const auto [begin, end] = range(entry);
    if (begin == end) return {};
    const auto& page = state_.page(items_, begin);
    if (end <= page.end_element()) return {page.template data<T>() + (begin - page.first_element()), end - begin};
    scratch_.resize(end - begin);
    state_.read(items_, begin, end - begin, std::as_writable_bytes(std::span(scratch_)));
    return scratch_;
  }
  std::uint64_t size(EntryIndex entry) {
    const auto [begin, end] = range(entry);
    return end - begin;
  }
  const std::string& path() const noexcept { return path_; }

 private:
  friend class Reader;
  CollectionView(ClusterPool& pool, ColumnId offsets, ColumnId items, std::string path)
      : pool_(&pool), offsets_(offsets), items_(items), path_(std::move(path)), state_(pool) {}

  std::pair<std::uint64_t, std::uint64_t> range(EntryIndex entry) {
    const auto cluster = pool_->cluster_of(entry);
    state_.set_cluster(cluster);
    const auto local = entry - pool_->cluster_first_entry(cluster);
    const auto end = state_.read_one<std::uint64_t>(offsets_, local);
    const auto begin = local == 0 ? 0 : state_.read_one<std::uint64_t>(offsets_, local - 1);
    if (begin > end || end > state_.element_count(items_)) {
      raise(ErrorClass::kCorruption, "inconsistent offset column",
            "field '" + path_ + "' entry " + std::to_string(entry));
    }
    return {begin, end};
  }

  ClusterPool* pool_;
  ColumnId offsets_;
  ColumnId items_;
  std::string path_;
  PoolReadState state_;
  std::vector<T> scratch_;
};

/// Any entry-indexed field as a dynamically typed value. The returned
/// reference is valid until the next call.
class ValueView {
 public:
  const Value& operator()(EntryIndex entry);
  const std::string& path() const noexcept { return path_; }

 private:
  friend class Reader;
  ValueView(ClusterPool& pool, const Schema& schema, FieldId field, std::string path)
      : pool_(&pool), schema_(&schema), field_(field), path_(std::move(path)), state_(pool) {}

  ClusterPool* pool_;
  const Schema* schema_;
  FieldId field_;
  std::string path_;
  PoolReadState state_;
  Value value_;
};

class Reader;

/// Half-open range of entry indices. Advancing into a new cluster notifies
/// the cluster pool, which drives readahead.
class EntryRange {
 public:
  class iterator {
   public:
    using value_type = EntryIndex;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    EntryIndex operator*() const noexcept { return index_; }
    iterator& operator++();
    iterator operator++(int) {
      auto copy = *this;
      ++*this;
      return copy;
    }
    bool operator==(const iterator& other) const noexcept { return index_ == other.index_; }

   private:
    friend class EntryRange;
    iterator(ClusterPool* pool, EntryIndex index, EntryIndex end);
    void enter();

    ClusterPool* pool_ = nullptr;
    EntryIndex index_ = 0;
    EntryIndex end_ = 0;
    EntryIndex boundary_ = 0;
  };

  EntryRange(ClusterPool& pool, EntryIndex begin, EntryIndex end) : pool_(&pool), begin_(begin), end_(end) {}
  iterator begin() const { return iterator(pool_, begin_, end_); }
  iterator end() const { return iterator(nullptr, end_, end_); }
  std::uint64_t size() const noexcept { return end_ - begin_; }

 private:
  ClusterPool* pool_;
  EntryIndex begin_;
  EntryIndex end_;
};

class Reader {
 public:
  /// Opens a dataset. With `model`, every model field must exist on disk
  /// with the same type (kType names the field, expected and found types)
  /// and only model fields are loaded by load_entry.
  static std::unique_ptr<Reader> open(Container container, std::string_view dataset_name = {},
                                      const DatasetModel* model = nullptr, ReaderOptions options = {});
  static std::unique_ptr<Reader> open(const std::string& path, std::string_view dataset_name = {},
                                      const DatasetModel* model = nullptr, ReaderOptions options = {});

  const Schema& schema() const noexcept { return pool_->source().schema(); }
  const DatasetModel& model() const noexcept { return model_; }
  const std::string& dataset_name() const noexcept { return pool_->source().header().dataset_name; }
  std::uint64_t entry_count() const noexcept { return pool_->source().footer().total_entries; }

  template <ViewLeaf T>
  View<T> view(std::string_view path) {
    const auto id = bind(path, field_type_of<T>());
    return View<T>(*pool_, schema().columns_of(id).front(), schema().path_of(id));
  }
  template <ViewLeaf T>
    requires(!std::same_as<T, bool>)
  CollectionView<T> collection_view(std::string_view path) {
    const auto id = bind(path, std::nullopt);
    const auto& f = schema().field(id);
    if (f.type.kind != FieldKind::kCollection || schema().field(f.children.front()).type != field_type_of<T>()) {
      raise(ErrorClass::kType, "collection view type mismatch",
            "field '" + schema().path_of(id) + "': expected collection of " + field_type_of<T>().to_string() +
                ", found " + describe_type(id));
    }
    return CollectionView<T>(*pool_, schema().columns_of(id).front(), schema().columns_of(f.children.front()).front(),
                             schema().path_of(id));
  }
  ValueView value_view(std::string_view path);

  /// Holder for the model's fields; activates their columns for prefetch.
  Entry create_entry();
  /// Populates `holder` (from create_entry) with entry `entry`. Throws
  /// kBounds past the last entry.
  void load_entry(EntryIndex entry, Entry& holder);

  EntryRange entries() { return {*pool_, 0, entry_count()}; }
  EntryRange entries(EntryIndex begin, EntryIndex end);

  ClusterPool& cluster_pool() noexcept { return *pool_; }
  PageSource& source() noexcept { return pool_->source(); }
  ReadCounters counters() const noexcept { return pool_->source().counters(); }

 private:
  Reader(std::shared_ptr<PageSource> source, const DatasetModel* model, ReaderOptions options);

  /// Looks up an entry-indexed field, checks its type when given, and
  /// activates its columns.
  FieldId bind(std::string_view path, std::optional<FieldType> expected);
  std::string describe_type(FieldId id) const;

  std::unique_ptr<ClusterPool> pool_;
  DatasetModel model_;
  std::vector<FieldId> model_fields_;
  PoolReadState state_;
  bool model_active_ = false;
};

}  // namespace colstore
