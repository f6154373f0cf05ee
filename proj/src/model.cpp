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


#include "colstore/model.hpp"

#include <algorithm>

#include "colstore/error.hpp"

namespace colstore {

Entry::Entry(std::shared_ptr<const std::vector<std::string>> names)
    : names_(std::move(names)), values_(names_->size()) {}

std::size_t Entry::index_of(std::string_view name) const {
  const auto it = std::find(names_->begin(), names_->end(), name);
  if (it == names_->end()) raise(ErrorClass::kLookup, "entry has no field '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names_->begin());
}

Value& Entry::operator[](std::string_view name) { return values_[index_of(name)]; }

const Value& Entry::operator[](std::string_view name) const { return values_[index_of(name)]; }

DatasetModel::DatasetModel(std::vector<FieldSpec> fields) {
  for (auto& f : fields) add(std::move(f));
}

FieldSpec spec_of(const Schema& schema, FieldId id) {
  const auto& f = schema.field(id);
  std::vector<FieldSpec> children;
  for (auto c : f.children) children.push_back(spec_of(schema, c));
  FieldSpec spec = [&] {
    switch (f.type.kind) {
      case FieldKind::kString: return FieldSpec::string(f.name);
      case FieldKind::kCollection: return FieldSpec::collection(f.name, std::move(children.front()));
      case FieldKind::kFixedArray: return FieldSpec::array(f.name, f.type.array_length, std::move(children.front()));
      case FieldKind::kRecord: return FieldSpec::record(f.name, std::move(children));
      case FieldKind::kVariant: return FieldSpec::variant(f.name, std::move(children));
      default: return FieldSpec::leaf(f.name, f.type);
    }
  }();
  if (f.type.is_leaf()) {
    const auto cols = schema.columns_of(id);
    if (!cols.empty() && schema.columns()[cols.front()].mantissa_bits != 0) {
      spec.with_mantissa_bits(schema.columns()[cols.front()].mantissa_bits);
    }
  }
  return spec;
}

DatasetModel DatasetModel::from_schema(const Schema& schema) {
  DatasetModel m;
  for (auto id : schema.top_level()) m.add(spec_of(schema, id));
  return m;
}

DatasetModel DatasetModel::select(const Schema& schema, std::span<const std::string> names) {
  DatasetModel m;
  for (const auto& name : names) {
    const auto id = schema.lookup(name);
    if (schema.field(id).parent_id != FieldId{0}) {
      raise(ErrorClass::kLookup, "'" + name + "' is not a top-level field");
    }
    m.add(spec_of(schema, id));
  }
  return m;
}

DatasetModel& DatasetModel::add(FieldSpec field) {
  if (frozen_) raise(ErrorClass::kUsage, "model is frozen", "cannot add field '" + field.name() + "'");
  if (index_of(field.name())) raise(ErrorClass::kSchema, "duplicate field name", "'" + field.name() + "'");
  fields_.push_back(std::move(field));
  return *this;
}

std::optional<std::size_t> DatasetModel::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (fields_[i].name() == name) return i;
  }
  return std::nullopt;
}

Schema DatasetModel::schema() const { return Schema::from_specs(fields_); }

Entry DatasetModel::create_entry() const {
  auto names = std::make_shared<std::vector<std::string>>();
  for (const auto& f : fields_) names->push_back(f.name());
  return Entry(std::move(names));
}

}  // namespace colstore
