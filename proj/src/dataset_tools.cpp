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


#include "colstore/dataset_tools.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <optional>

#include "colstore/pages.hpp"

namespace colstore {

void fast_merge(std::span<const Container> inputs, Container output, std::string dataset_name) {
  if (inputs.empty()) raise(ErrorClass::kUsage, "merge needs at least one input");
  std::vector<std::shared_ptr<PageSource>> sources;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      sources.push_back(PageSource::open(inputs[i]));
    } catch (const Error&) {
      raise_nested(ErrorClass::kMerge, "cannot open merge input", "input " + std::to_string(i));
    }
  }
  const auto& first = *sources.front();
  for (std::size_t i = 1; i < sources.size(); ++i) {
    if (!sources[i]->schema().structurally_equal(first.schema())) {
      raise(ErrorClass::kMerge, "schemas differ",
            "input " + std::to_string(i) + " at field '" + first.schema().first_difference(sources[i]->schema()) + "'");
    }
    if (sources[i]->envelope().feature_flags != first.envelope().feature_flags) {
      raise(ErrorClass::kMerge, "feature flags differ", "input " + std::to_string(i));
    }
  }
  WriteOptions options;
  options.codec = 0;
  options.page_checksums = first.has_page_checksums();
  PageSink sink(std::move(output), first.schema(), dataset_name.empty() ? first.header().dataset_name : dataset_name,
                options);
  for (const auto& source : sources) {
    for (const auto& cluster : source->footer().clusters) {
      Bytes region(cluster.region_size);
      source->read_raw(cluster.region_offset, region);
      sink.append_region(cluster, region);
    }
  }
  sink.commit_dataset();
}

void fast_merge(std::span<const std::string> input_paths, const std::string& output_path, bool overwrite) {
  std::vector<Container> inputs;
  for (const auto& p : input_paths) inputs.push_back(Container::open_file(p));
  auto device = FileDevice::open(output_path, overwrite ? FileDevice::Mode::kOverwrite : FileDevice::Mode::kCreate);
  try {
    fast_merge(inputs, Container::bare(std::move(device)));
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(output_path, ec);
    throw;
  }
}

namespace {

constexpr std::uint64_t kUnknown = std::numeric_limits<std::uint64_t>::max();

class ClusterCheck {
 public:
  ClusterCheck(PageSource& source, std::size_t index, ValidationReport& report)
      : source_(source), schema_(source.schema()), cluster_(source.footer().clusters[index]), report_(report),
        where_("cluster " + std::to_string(index)) {}

  void run() {
    const auto& columns = schema_.columns();
    counts_.assign(columns.size(), 0);
    for (ColumnId c = 0; c < columns.size(); ++c) counts_[c] = cluster_.element_count(c);
    for (ColumnId c = 0; c < columns.size(); ++c) {
      if (columns[c].role == ColumnRole::kOffset) check_offsets(c);
      if (columns[c].role == ColumnRole::kVariantTag) check_tags(c);
    }
    for (auto id : schema_.top_level()) {
      const auto n = values_of(id);
      if (n != kUnknown && n != cluster_.entry_count) {
        problem("field '" + schema_.path_of(id) + "' holds " + std::to_string(n) + " values, cluster has " +
                std::to_string(cluster_.entry_count) + " entries");
      }
    }
  }

 private:
  void problem(std::string text) { report_.problems.push_back(where_ + ": " + std::move(text)); }

  template <class T>
  std::optional<std::vector<T>> decode(ColumnId column) {
    std::vector<T> out(counts_[column]);
    std::uint64_t at = 0;
    for (const auto& loc : cluster_.pages[column]) {
      try {
        const auto disk = source_.read_page(loc);
        unpack_elements(disk, schema_.columns()[column].type, loc.element_count,
                        std::as_writable_bytes(std::span(out).subspan(at, loc.element_count)));
      } catch (const Error& e) {
        problem("column " + std::to_string(column) + ": " + describe(e));
        return std::nullopt;
      }
      at += loc.element_count;
    }
    report_.elements_checked += out.size();
    return out;
  }

  // Logical values of a field in this cluster, from the first column found
  // in its subtree.
  std::uint64_t values_of(FieldId id) const {
    const auto& f = schema_.field(id);
    const auto own = schema_.columns_of(id);
    if (!own.empty()) return counts_[own.front()];
    if (f.type.kind == FieldKind::kFixedArray) {
      const auto n = values_of(f.children.front());
      if (n == kUnknown || f.type.array_length == 0) return kUnknown;
      return n / f.type.array_length;
    }
    for (auto c : f.children) {
      const auto n = values_of(c);
      if (n != kUnknown) return n;
    }
    return kUnknown;
  }

  void check_offsets(ColumnId column) {
    ++report_.offset_columns_checked;
    const auto owner = schema_.columns()[column].owner_field;
    const auto& f = schema_.field(owner);
    const auto child_count = f.type.kind == FieldKind::kString ? counts_[schema_.columns_of(owner)[1]]
                                                                : values_of(f.children.front());
    const auto offsets = decode<std::uint64_t>(column);
    if (!offsets) return;
    const auto label = "offset column of '" + schema_.path_of(owner) + "'";
    for (std::size_t i = 1; i < offsets->size(); ++i) {
      if ((*offsets)[i] < (*offsets)[i - 1]) {
        problem(label + " decreases at element " + std::to_string(i));
        return;
      }
    }
    const auto last = offsets->empty() ? 0 : offsets->back();
    if (child_count != kUnknown && last != child_count) {
      problem(label + " ends at " + std::to_string(last) + ", child holds " + std::to_string(child_count) + " elements");
    }
  }

  void check_tags(ColumnId column) {
    const auto owner = schema_.columns()[column].owner_field;
    const auto& f = schema_.field(owner);
    const auto tags = decode<std::uint32_t>(column);
    if (!tags) return;
    std::vector<std::uint64_t> per_alt(f.children.size(), 0);
    for (std::size_t i = 0; i < tags->size(); ++i) {
      const auto t = (*tags)[i];
      if (t == 0 || t > f.children.size()) {
        problem("tag column of '" + schema_.path_of(owner) + "' holds invalid tag " + std::to_string(t) +
                " at element " + std::to_string(i));
        return;
      }
      ++per_alt[t - 1];
    }
    for (std::size_t a = 0; a < per_alt.size(); ++a) {
      const auto n = values_of(f.children[a]);
      if (n != kUnknown && n != per_alt[a]) {
        problem("alternative " + std::to_string(a) + " of '" + schema_.path_of(owner) + "' holds " + std::to_string(n) +
                " values, tags select it " + std::to_string(per_alt[a]) + " times");
      }
    }
  }

  PageSource& source_;
  const Schema& schema_;
  const ClusterDescriptor& cluster_;
  ValidationReport& report_;
  std::string where_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace

ValidationReport validate_dataset(Container container) {
  ValidationReport report;
  std::shared_ptr<PageSource> source;
  try {
    source = PageSource::open(std::move(container));
  } catch (const Error& e) {
    report.problems.push_back(describe(e));
    return report;
  }
  for (std::size_t i = 0; i < source->footer().clusters.size(); ++i) {
    ClusterCheck(*source, i, report).run();
    ++report.clusters;
  }
  return report;
}

}  // namespace colstore
