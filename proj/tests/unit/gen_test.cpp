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

#include <set>

#include "colstore/gen.hpp"
#include "colstore/reader.hpp"
#include "test_util.hpp"

namespace colstore {
namespace {

using testing_util::error_class_of;

TEST(Gen, ShapesMatchDeclaredCounts) {
  struct Want {
    SampleShape shape;
    std::size_t fields;
    std::size_t read;
    std::uint64_t entries;
  };
  for (const auto& w : {Want{SampleShape::kLhcb, 26, 18, 85000}, Want{SampleShape::kH1, 152, 16, 28000},
                        Want{SampleShape::kCms, 1479, 6, 16000}}) {
    const auto fields = shape_fields(w.shape);
    EXPECT_EQ(fields.size(), w.fields);
    EXPECT_EQ(shape_info(w.shape).field_count, w.fields);
    EXPECT_EQ(shape_entries(w.shape, 0.01), w.entries);
    std::set<std::string> names;
    for (const auto& f : fields) names.insert(f.name());
    EXPECT_EQ(names.size(), fields.size());
    const auto read = shape_read_fields(w.shape);
    EXPECT_EQ(read.size(), w.read);
    for (const auto& r : read) EXPECT_TRUE(names.count(r)) << r;
    EXPECT_NO_THROW(Schema::from_specs(fields));
  }
}

TEST(Gen, LhcbIsFlat) {
  for (const auto& f : shape_fields(SampleShape::kLhcb)) EXPECT_TRUE(f.type().is_leaf()) << f.name();
}

TEST(Gen, CollectionShapesHaveOneLevelCollections) {
  for (auto shape : {SampleShape::kH1, SampleShape::kCms}) {
    std::size_t collections = 0;
    for (const auto& f : shape_fields(shape)) {
      if (f.type().kind == FieldKind::kCollection) {
        ++collections;
        EXPECT_TRUE(f.children().front().type().is_leaf());
      } else {
        EXPECT_TRUE(f.type().is_leaf());
      }
    }
    EXPECT_GT(collections, 0u);
  }
}

TEST(Gen, ParseShape) {
  EXPECT_EQ(parse_shape("cms-like"), SampleShape::kCms);
  EXPECT_EQ(parse_shape("h1"), SampleShape::kH1);
  EXPECT_EQ(error_class_of([] { parse_shape("atlas"); }), ErrorClass::kConfig);
  EXPECT_EQ(error_class_of([] { shape_entries(SampleShape::kH1, 0); }), ErrorClass::kConfig);
}

TEST(Gen, DeterministicBytes) {
  for (auto shape : {SampleShape::kLhcb, SampleShape::kH1, SampleShape::kCms}) {
    GenerateOptions o;
    o.scale = 0.0002;
    auto a = std::make_shared<MemoryDevice>();
    auto b = std::make_shared<MemoryDevice>();
    generate(shape, o, Container::bare(a));
    generate(shape, o, Container::bare(b));
    EXPECT_EQ(a->contents(), b->contents()) << shape_info(shape).name;
    o.seed = 2;
    auto c = std::make_shared<MemoryDevice>();
    generate(shape, o, Container::bare(c));
    EXPECT_NE(a->contents(), c->contents());
  }
}

TEST(Gen, CountersMatchCollectionSizes) {
  GenerateOptions o;
  o.scale = 0.001;
  auto c = Container::memory();
  const auto n = generate(SampleShape::kCms, o, c);
  auto reader = Reader::open(c, "Events");
  EXPECT_EQ(reader->entry_count(), n);
  auto count = reader->view<std::uint32_t>("nMuon");
  auto pt = reader->collection_view<float>("Muon_pt");
  auto charge = reader->collection_view<std::int32_t>("Muon_charge");
  std::uint64_t muons = 0;
  for (auto i : reader->entries()) {
    ASSERT_EQ(pt.size(i), count(i));
    ASSERT_EQ(charge.size(i), count(i));
    for (auto q : charge(i)) ASSERT_TRUE(q == -1 || q == 1 || q == 0) << q;
    muons += count(i);
  }
  EXPECT_GT(muons, 0u);
}

}  // namespace
}  // namespace colstore
