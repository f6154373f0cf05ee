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

#include <filesystem>
#include <set>

#include "colstore/reader.hpp"
#include "colstore/writer.hpp"
#include "datasets.hpp"
#include "sample_schemas.hpp"
#include "test_util.hpp"

namespace colstore {
namespace {

using testing_datasets::simple_entry;
using testing_datasets::simple_fields;
using testing_datasets::write_simple;
using testing_util::error_class_of;
using testing_util::error_text_of;
using testing_util::TempDir;

constexpr std::uint64_t kEntries = 3000;

std::unique_ptr<Reader> open_simple(std::uint64_t entries = kEntries, ReaderOptions options = {}) {
  auto c = Container::memory();
  write_simple(c, entries);
  return Reader::open(c, "simple", nullptr, options);
}

TEST(Writer, SmallClusterSizeGivesSeveralClusters) {
  auto reader = open_simple();
  EXPECT_EQ(reader->entry_count(), kEntries);
  EXPECT_GT(reader->cluster_pool().cluster_count(), 3u);
  EXPECT_EQ(reader->dataset_name(), "simple");
}

TEST(Writer, FillIsAllOrNothing) {
  auto c = Container::memory();
  DatasetModel model(simple_fields());
  auto writer = Writer::create(model, "simple", c, testing_datasets::small_options());
  writer->fill(simple_entry(0));
  auto bad = simple_entry(1);
  bad[2] = Value::list({Value(1.5f), Value(std::int32_t{2})});  // second item has the wrong type
  EXPECT_EQ(error_class_of([&] { writer->fill(bad); }), ErrorClass::kType);
  EXPECT_EQ(error_class_of([&] { writer->fill(std::vector<Value>{Value(1)}); }), ErrorClass::kType);
  EXPECT_EQ(writer->entry_count(), 1u);
  writer->fill(simple_entry(1));
  writer->commit();
  auto reader = Reader::open(c);
  auto entry = reader->create_entry();
  for (EntryIndex i = 0; i < 2; ++i) {
    reader->load_entry(i, entry);
    EXPECT_EQ(std::vector<Value>(entry.values().begin(), entry.values().end()), simple_entry(i));
  }
}

TEST(Writer, TypeErrorNamesField) {
  DatasetModel model(simple_fields());
  auto writer = Writer::create(model, "simple", Container::memory());
  auto bad = simple_entry(3);
  bad[0] = Value("text");
  const auto text = error_text_of([&] { writer->fill(bad); });
  EXPECT_NE(text.find("'x'"), std::string::npos) << text;
}

TEST(Writer, UsageAfterCommit) {
  DatasetModel model(simple_fields());
  auto writer = Writer::create(model, "simple", Container::memory());
  writer->commit();
  EXPECT_EQ(error_class_of([&] { writer->fill(simple_entry(0)); }), ErrorClass::kUsage);
  EXPECT_EQ(error_class_of([&] { writer->commit(); }), ErrorClass::kUsage);
}

TEST(Writer, ModelIsFrozenByWriter) {
  DatasetModel model(simple_fields());
  auto writer = Writer::create(model, "simple", Container::memory());
  EXPECT_TRUE(model.frozen());
  EXPECT_EQ(error_class_of([&] { model.make_field<float>("late"); }), ErrorClass::kUsage);
}

TEST(Writer, InvalidModelRejectedBeforeCreatingFile) {
  TempDir dir;
  DatasetModel empty;
  EXPECT_EQ(error_class_of([&] { Writer::create(empty, "e", dir.file("e.cs")); }), ErrorClass::kSchema);
  EXPECT_FALSE(std::filesystem::exists(dir.file("e.cs")));
  DatasetModel dup;
  dup.make_field<int>("a");
  EXPECT_EQ(error_class_of([&] { dup.make_field<float>("a"); }), ErrorClass::kSchema);
}

TEST(Writer, ExistingFileNeedsOverwrite) {
  TempDir dir;
  const auto path = dir.file("d.cs");
  {
    DatasetModel model(simple_fields());
    Writer::create(model, "simple", path)->commit();
  }
  DatasetModel model(simple_fields());
  EXPECT_EQ(error_class_of([&] { Writer::create(model, "simple", path); }), ErrorClass::kUsage);
  DatasetModel again(simple_fields());
  auto w = Writer::create(again, "simple", path, {}, true);
  w->fill(simple_entry(7));
  w->commit();
  EXPECT_EQ(Reader::open(path)->entry_count(), 1u);
}

TEST(Writer, DestructorCommits) {
  auto c = Container::memory();
  {
    DatasetModel model(simple_fields());
    auto w = Writer::create(model, "simple", c);
    for (int i = 0; i < 10; ++i) w->fill(simple_entry(i));
  }
  EXPECT_EQ(Reader::open(c)->entry_count(), 10u);
}

TEST(Writer, EmptyDatasetReads) {
  auto reader = open_simple(0);
  EXPECT_EQ(reader->entry_count(), 0u);
  EXPECT_EQ(reader->cluster_pool().cluster_count(), 0u);
  std::uint64_t n = 0;
  for ([[maybe_unused]] auto e : reader->entries()) ++n;
  EXPECT_EQ(n, 0u);
  auto entry = reader->create_entry();
  EXPECT_EQ(error_class_of([&] { reader->load_entry(0, entry); }), ErrorClass::kBounds);
}

TEST(Entry, NamedAccess) {
  DatasetModel model(simple_fields());
  auto entry = model.create_entry();
  entry["x"] = Value(std::int32_t{4});
  EXPECT_EQ(entry.at(0), Value(std::int32_t{4}));
  EXPECT_EQ(error_class_of([&] { entry["nope"]; }), ErrorClass::kLookup);
  EXPECT_EQ(entry.names(), (std::vector<std::string>{"x", "flag", "v"}));
}

TEST(Reader, TypedViewsMatchWrittenValues) {
  auto reader = open_simple();
  auto x = reader->view<std::int32_t>("x");
  auto flag = reader->view<bool>("flag");
  auto v = reader->collection_view<float>("v");
  for (auto i : reader->entries()) {
    const auto expected = simple_entry(i);
    ASSERT_EQ(x(i), expected[0].as<std::int64_t>());
    ASSERT_EQ(flag(i), expected[1].as<bool>());
    const auto items = v(i);
    ASSERT_EQ(items.size(), expected[2].items().size());
    ASSERT_EQ(v.size(i), items.size());
    for (std::size_t k = 0; k < items.size(); ++k) ASSERT_EQ(items[k], expected[2].items()[k].as<float>());
  }
}

TEST(Reader, ViewsWorkInAnyOrder) {
  auto reader = open_simple();
  auto x = reader->view<std::int32_t>("x");
  auto v = reader->value_view("v");
  for (EntryIndex i = kEntries; i-- > 0;) {
    ASSERT_EQ(x(i), static_cast<std::int32_t>(i * 3));
    ASSERT_EQ(v(i), simple_entry(i)[2]);
  }
}

TEST(Reader, LoadEntryMatchesWrittenValues) {
  auto reader = open_simple();
  auto entry = reader->create_entry();
  for (auto i : reader->entries()) {
    reader->load_entry(i, entry);
    ASSERT_EQ(std::vector<Value>(entry.values().begin(), entry.values().end()), simple_entry(i));
  }
  EXPECT_EQ(error_class_of([&] { reader->load_entry(kEntries, entry); }), ErrorClass::kBounds);
}

TEST(Reader, ViewTypeMismatchNamesBothTypes) {
  auto reader = open_simple();
  try {
    reader->view<float>("x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.error_class(), ErrorClass::kType);
    EXPECT_EQ(e.context(), "field 'x': expected float32, found int32");
  }
  EXPECT_EQ(error_class_of([&] { reader->collection_view<double>("v"); }), ErrorClass::kType);
  EXPECT_EQ(error_class_of([&] { reader->view<std::int32_t>("nope"); }), ErrorClass::kLookup);
}

TEST(Reader, NestedFieldsCannotBeViewed) {
  auto reader = open_simple();
  EXPECT_EQ(error_class_of([&] { reader->view<float>("v._0"); }), ErrorClass::kUsage);
}

TEST(Reader, ImposedModelSelectsAndChecksFields) {
  auto c = Container::memory();
  write_simple(c, 100);
  DatasetModel subset;
  subset.add(FieldSpec::collection("v", FieldSpec::of<float>("_0")));
  subset.make_field<std::int32_t>("x");
  auto reader = Reader::open(c, {}, &subset);
  auto entry = reader->create_entry();
  reader->load_entry(42, entry);
  ASSERT_EQ(entry.size(), 2u);
  EXPECT_EQ(entry["x"], simple_entry(42)[0]);
  EXPECT_EQ(entry["v"], simple_entry(42)[2]);

  DatasetModel wrong;
  wrong.make_field<std::int64_t>("x");
  try {
    Reader::open(c, {}, &wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.error_class(), ErrorClass::kType);
    EXPECT_EQ(e.context(), "field 'x': expected int64, found int32");
  }
  DatasetModel missing;
  missing.make_field<float>("y");
  EXPECT_EQ(error_class_of([&] { Reader::open(c, {}, &missing); }), ErrorClass::kType);
}

TEST(Reader, EntryRangeDrivesReadahead) {
  ReaderOptions o;
  o.scheduler.readahead_clusters = 1;
  auto reader = open_simple(kEntries, o);
  auto x = reader->view<std::int32_t>("x");
  std::uint64_t sum = 0;
  for (auto i : reader->entries()) sum += static_cast<std::uint64_t>(x(i));
  EXPECT_EQ(sum, 3 * kEntries * (kEntries - 1) / 2);
  std::set<std::uint32_t> scheduled;
  for (const auto& e : reader->cluster_pool().events()) {
    if (e.kind == PrefetchEvent::Kind::kScheduled) scheduled.insert(e.cluster);
  }
  EXPECT_EQ(scheduled.size(), reader->cluster_pool().cluster_count());
}

TEST(Reader, SubRangeIteration) {
  auto reader = open_simple();
  std::vector<EntryIndex> seen;
  for (auto i : reader->entries(10, 15)) seen.push_back(i);
  EXPECT_EQ(seen, (std::vector<EntryIndex>{10, 11, 12, 13, 14}));
  EXPECT_EQ(error_class_of([&] { reader->entries(5, kEntries + 1); }), ErrorClass::kBounds);
}

TEST(Reader, NestedSchemaRoundTrip) {
  auto c = Container::memory();
  DatasetModel model(std::vector<FieldSpec>{FieldSpec::of<std::int32_t>("id"), testing_schemas::event_schema()[1]});
  std::vector<std::vector<Value>> written;
  {
    auto w = Writer::create(model, "events", c, testing_datasets::small_options());
    for (int i = 0; i < 500; ++i) {
      Value::List particles;
      for (int p = 0; p < i % 4; ++p) {
        Value::List ids;
        for (int k = 0; k < (i + p) % 3; ++k) ids.emplace_back(std::int32_t{i * 10 + k});
        particles.push_back(Value::list({Value(static_cast<float>(p) + 0.25f), Value(std::move(ids))}));
      }
      written.push_back({Value(std::int32_t{i}), Value(std::move(particles))});
      w->fill(written.back());
    }
  }
  auto reader = Reader::open(c, "events");
  auto entry = reader->create_entry();
  auto particles = reader->value_view("particles");
  for (auto i : reader->entries()) {
    reader->load_entry(i, entry);
    ASSERT_EQ(std::vector<Value>(entry.values().begin(), entry.values().end()), written[i]);
    ASSERT_EQ(particles(i), written[i][1]);
  }
}

}  // namespace
}  // namespace colstore
