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

#include "colstore/dataset_tools.hpp"
#include "colstore/reader.hpp"
#include "datasets.hpp"
#include "random_schema.hpp"
#include "test_util.hpp"

namespace colstore {
namespace {

using testing_datasets::simple_entry;
using testing_datasets::simple_fields;
using testing_datasets::write_simple;
using testing_util::error_class_of;
using testing_util::TempDir;

std::vector<std::vector<Value>> all_entries(Reader& reader) {
  std::vector<std::vector<Value>> out;
  auto entry = reader.create_entry();
  for (auto i : reader.entries()) {
    reader.load_entry(i, entry);
    out.emplace_back(entry.values().begin(), entry.values().end());
  }
  return out;
}

Bytes region_bytes(const Container& c, std::uint64_t offset, std::uint64_t size) {
  Bytes out(size);
  c.device->read_at(c.region_offset + offset, out);
  return out;
}

TEST(FastMerge, EntriesConcatenateAndRegionsAreCopiedVerbatim) {
  auto a = Container::memory();
  auto b = Container::memory();
  write_simple(a, 2000);
  DatasetModel model(simple_fields());
  {
    auto w = Writer::create(model, "simple", b, testing_datasets::small_options());
    for (int i = 5000; i < 6500; ++i) w->fill(simple_entry(i));
  }
  auto out = Container::memory();
  const std::vector<Container> inputs = {a, b};
  fast_merge(inputs, out);

  auto ra = Reader::open(a);
  auto rb = Reader::open(b);
  auto rm = Reader::open(out);
  auto expected = all_entries(*ra);
  const auto tail = all_entries(*rb);
  expected.insert(expected.end(), tail.begin(), tail.end());
  EXPECT_EQ(all_entries(*rm), expected);
  EXPECT_EQ(rm->dataset_name(), "simple");

  const auto& merged = rm->source().footer().clusters;
  std::size_t k = 0;
  for (const auto* src : {&ra->source(), &rb->source()}) {
    for (const auto& cl : src->footer().clusters) {
      ASSERT_LT(k, merged.size());
      EXPECT_EQ(region_bytes(src->container(), cl.region_offset, cl.region_size),
                region_bytes(out, merged[k].region_offset, merged[k].region_size))
          << "cluster " << k;
      EXPECT_EQ(merged[k].entry_count, cl.entry_count);
      ++k;
    }
  }
  EXPECT_EQ(k, merged.size());
  EXPECT_TRUE(validate_dataset(out).ok());
}

TEST(FastMerge, EmptyInputsContributeNothing) {
  auto a = Container::memory();
  auto empty = Container::memory();
  write_simple(a, 100);
  write_simple(empty, 0);
  auto out = Container::memory();
  const std::vector<Container> inputs = {empty, a, empty};
  fast_merge(inputs, out, "renamed");
  auto r = Reader::open(out, "renamed");
  EXPECT_EQ(r->entry_count(), 100u);
}

TEST(FastMerge, SchemaMismatchNamesField) {
  auto a = Container::memory();
  write_simple(a, 10);
  auto b = Container::memory();
  DatasetModel other(std::vector<FieldSpec>{FieldSpec::of<std::int32_t>("x"), FieldSpec::of<bool>("flag"),
                                            FieldSpec::collection("v", FieldSpec::of<double>("_0"))});
  Writer::create(other, "simple", b)->commit();
  const std::vector<Container> inputs = {a, b};
  try {
    fast_merge(inputs, Container::memory());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.error_class(), ErrorClass::kMerge);
    EXPECT_NE(e.context().find("'v._0'"), std::string::npos) << e.context();
  }
}

TEST(FastMerge, FeatureFlagsMustMatch) {
  auto a = Container::memory();
  auto b = Container::memory();
  write_simple(a, 10);
  auto o = testing_datasets::small_options();
  o.page_checksums = false;
  write_simple(b, 10, o);
  const std::vector<Container> inputs = {a, b};
  EXPECT_EQ(error_class_of([&] { fast_merge(inputs, Container::memory()); }), ErrorClass::kMerge);
}

TEST(FastMerge, FilesAndFailureCleanup) {
  TempDir dir;
  for (const auto* name : {"a.cs", "b.cs"}) {
    write_simple(Container::bare(FileDevice::open(dir.file(name), FileDevice::Mode::kCreate)), 300);
  }
  const std::vector<std::string> paths = {dir.file("a.cs"), dir.file("b.cs")};
  fast_merge(paths, dir.file("m.cs"));
  EXPECT_EQ(Reader::open(dir.file("m.cs"))->entry_count(), 600u);
  EXPECT_EQ(error_class_of([&] { fast_merge(paths, dir.file("m.cs")); }), ErrorClass::kUsage);
  const std::vector<std::string> bad = {dir.file("a.cs"), dir.file("missing.cs")};
  EXPECT_THROW(fast_merge(bad, dir.file("n.cs")), Error);
  EXPECT_FALSE(std::filesystem::exists(dir.file("n.cs")));
}

TEST(Validate, GoodFilesPass) {
  testing_random::Generator gen(77);
  for (int round = 0; round < 10; ++round) {
    const auto specs = gen.schema();
    DatasetModel model(specs);
    auto c = Container::memory();
    {
      auto w = Writer::create(model, "r", c, testing_datasets::small_options());
      for (int i = 0; i < 60; ++i) w->fill(gen.entry(specs));
    }
    const auto report = validate_dataset(c);
    EXPECT_TRUE(report.ok()) << report.problems.front();
    EXPECT_GE(report.clusters, 1u);
  }
}

// Writes one cluster of a collection<int32> field with the given raw
// offset column and child count.
Container with_offsets(const std::vector<std::uint64_t>& offsets, std::uint64_t children) {
  const auto schema = Schema::from_specs(std::vector<FieldSpec>{FieldSpec::collection("c", FieldSpec::of<std::int32_t>("_0"))});
  auto c = Container::memory();
  PageSink sink(c, schema, "bad", {});
  sink.write_column(0, std::as_bytes(std::span(offsets)), offsets.size());
  std::vector<std::int32_t> items(children, 1);
  if (children > 0) sink.write_column(1, std::as_bytes(std::span(items)), children);
  const std::vector<std::uint64_t> counts = {offsets.size(), children};
  sink.commit_cluster(offsets.size(), counts);
  sink.commit_dataset();
  return c;
}

TEST(Validate, DetectsOffsetViolations) {
  EXPECT_TRUE(validate_dataset(with_offsets({1, 3, 3, 6}, 6)).ok());

  const auto decreasing = validate_dataset(with_offsets({2, 1, 6}, 6));
  ASSERT_FALSE(decreasing.ok());
  EXPECT_NE(decreasing.problems.front().find("cluster 0"), std::string::npos);

  const auto short_end = validate_dataset(with_offsets({1, 2, 5}, 6));
  EXPECT_FALSE(short_end.ok());

  const auto past_end = validate_dataset(with_offsets({1, 2, 7}, 6));
  EXPECT_FALSE(past_end.ok());
}

TEST(Validate, DetectsVariantTagViolations) {
  const auto schema = Schema::from_specs(std::vector<FieldSpec>{
      FieldSpec::variant("u", {FieldSpec::of<std::int32_t>("a"), FieldSpec::of<float>("b")})});
  auto build = [&](std::vector<std::uint32_t> tags, std::uint64_t na, std::uint64_t nb) {
    auto c = Container::memory();
    PageSink sink(c, schema, "v", {});
    sink.write_column(0, std::as_bytes(std::span(tags)), tags.size());
    std::vector<std::int32_t> a(na);
    std::vector<float> b(nb);
    if (na) sink.write_column(1, std::as_bytes(std::span(a)), na);
    if (nb) sink.write_column(2, std::as_bytes(std::span(b)), nb);
    const std::vector<std::uint64_t> counts = {tags.size(), na, nb};
    sink.commit_cluster(tags.size(), counts);
    sink.commit_dataset();
    return validate_dataset(c);
  };
  EXPECT_TRUE(build({1, 2, 1}, 2, 1).ok());
  EXPECT_FALSE(build({1, 0, 1}, 2, 0).ok());
  EXPECT_FALSE(build({1, 3, 1}, 2, 0).ok());
  EXPECT_FALSE(build({1, 2, 1}, 1, 1).ok());
}

TEST(Validate, DetectsEntryCountMismatch) {
  const auto schema = Schema::from_specs(std::vector<FieldSpec>{FieldSpec::of<std::int32_t>("x")});
  auto c = Container::memory();
  PageSink sink(c, schema, "m", {});
  std::vector<std::int32_t> x(5);
  sink.write_column(0, std::as_bytes(std::span(x)), 5);
  const std::vector<std::uint64_t> counts = {5};
  sink.commit_cluster(6, counts);
  sink.commit_dataset();
  const auto report = validate_dataset(c);
  ASSERT_FALSE(report.ok());
  EXPECT_NE(report.problems.front().find("field 'x' holds 5 values"), std::string::npos) << report.problems.front();
}

TEST(Validate, UnreadablePagesAreReported) {
  auto device = std::make_shared<MemoryDevice>();
  write_simple(Container::bare(device), 200);
  auto source = PageSource::open(Container::bare(device));
  const auto& loc = source->footer().clusters[0].pages[2][0];  // offset column of v
  auto bytes = device->contents();
  bytes[loc.range.offset] ^= std::byte{1};
  const auto report = validate_dataset(Container::bare(std::make_shared<MemoryDevice>(bytes)));
  ASSERT_FALSE(report.ok());
  EXPECT_NE(report.problems.front().find("checksum"), std::string::npos) << report.problems.front();
}

}  // namespace
}  // namespace colstore
