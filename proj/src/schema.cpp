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

#include "colstore/schema.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "colstore/error.hpp"

namespace colstore {

namespace {

std::string join_violations(const std::vector<SchemaViolation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    if (v.field) out += "field " + std::to_string(*v.field) + ": ";
    out += v.message;
  }
  return out;
}

bool valid_int_width(std::uint8_t bits) { return bits == 8 || bits == 16 || bits == 32 || bits == 64; }

std::string rename_index(std::size_t i) { return "_" + std::to_string(i); }

void build_preorder(const FieldSpec& spec, std::optional<FieldId> parent, std::vector<FieldDescriptor>& fields,
                    std::vector<std::uint8_t>& mantissa) {
  const auto id = static_cast<FieldId>(fields.size());
  FieldDescriptor d;
  d.field_id = id;
  d.name = spec.name();
  d.type = spec.type();
  d.parent_id = parent;
  fields.push_back(std::move(d));
  mantissa.push_back(spec.mantissa_bits());
  if (parent) fields[*parent].children.push_back(id);
  for (const auto& child : spec.children()) build_preorder(child, id, fields, mantissa);
}

void map_recursive(const FieldDescriptor& f, std::span<const FieldDescriptor> tree, std::vector<ColumnDescriptor>& out,
                   ColumnId& next, const std::string& path) {
  auto add = [&](ColumnRole role, PhysicalType type) {
    ColumnDescriptor c;
    c.column_id = next++;
    c.owner_field = f.field_id;
    c.role = role;
    c.type = type;
    out.push_back(c);
  };
  auto expect_children = [&](std::size_t lo, std::size_t hi) {
    if (f.children.size() < lo || f.children.size() > hi) {
      raise(ErrorClass::kSchema, std::string(field_kind_name(f.type.kind)) + " field with " +
                                     std::to_string(f.children.size()) + " children", path);
    }
  };
  switch (f.type.kind) {
    case FieldKind::kBool:
    case FieldKind::kInt:
    case FieldKind::kFloat:
      expect_children(0, 0);
      add(ColumnRole::kValue, leaf_physical_type(f.type));
      break;
    case FieldKind::kString:
      expect_children(0, 0);
      add(ColumnRole::kOffset, PhysicalType::kIndex64);
      add(ColumnRole::kCharData, PhysicalType::kByte);
      break;
    case FieldKind::kCollection:
      expect_children(1, 1);
      add(ColumnRole::kOffset, PhysicalType::kIndex64);
      break;
    case FieldKind::kFixedArray:
      expect_children(1, 1);
      if (f.type.array_length == 0) raise(ErrorClass::kSchema, "fixed array of length 0", path);
      break;
    case FieldKind::kRecord:
      break;
    case FieldKind::kVariant:
      expect_children(1, SIZE_MAX);
      add(ColumnRole::kVariantTag, PhysicalType::kUInt32);
      break;
  }
  for (auto child_id : f.children) {
    if (child_id >= tree.size() || tree[child_id].field_id != child_id) {
      raise(ErrorClass::kSchema, "field ids must index the tree", path);
    }
    const auto& child = tree[child_id];
    map_recursive(child, tree, out, next, path.empty() ? child.name : path + "." + child.name);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

FieldSpec FieldSpec::leaf(std::string name, FieldType type) { return FieldSpec(std::move(name), type); }

FieldSpec FieldSpec::string(std::string name) { return FieldSpec(std::move(name), FieldType::string()); }

FieldSpec FieldSpec::collection(std::string name, FieldSpec item) {
  item.name_ = "_0";
  return FieldSpec(std::move(name), FieldType::collection(), {std::move(item)});
}

FieldSpec FieldSpec::array(std::string name, std::uint64_t length, FieldSpec item) {
  item.name_ = "_0";
  return FieldSpec(std::move(name), FieldType::fixed_array(length), {std::move(item)});
}

FieldSpec FieldSpec::record(std::string name, std::vector<FieldSpec> members) {
  return FieldSpec(std::move(name), FieldType::record(), std::move(members));
}

FieldSpec FieldSpec::variant(std::string name, std::vector<FieldSpec> alternatives) {
  for (std::size_t i = 0; i < alternatives.size(); ++i) alternatives[i].name_ = rename_index(i);
  return FieldSpec(std::move(name), FieldType::variant(), std::move(alternatives));
}

PhysicalType leaf_physical_type(const FieldType& type) {
  switch (type.kind) {
    case FieldKind::kBool: return PhysicalType::kBit;
    case FieldKind::kFloat:
      if (type.width_bits == 32) return PhysicalType::kFloat32;
      if (type.width_bits == 64) return PhysicalType::kFloat64;
      break;
    case FieldKind::kInt:
      switch (type.width_bits) {
        case 8: return type.is_signed ? PhysicalType::kInt8 : PhysicalType::kUInt8;
        case 16: return type.is_signed ? PhysicalType::kInt16 : PhysicalType::kUInt16;
        case 32: return type.is_signed ? PhysicalType::kInt32 : PhysicalType::kUInt32;
        case 64: return type.is_signed ? PhysicalType::kInt64 : PhysicalType::kUInt64;
        default: break;
      }
      break;
    default: break;
  }
  raise(ErrorClass::kSchema, "no physical type for " + type.to_string());
}

std::vector<SchemaViolation> validate_schema(std::span<const FieldDescriptor> fields) {
  std::vector<SchemaViolation> out;
  auto violation = [&](std::optional<FieldId> id, std::string msg) { out.push_back({id, std::move(msg)}); };

  std::unordered_map<FieldId, std::size_t> by_id;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (!by_id.emplace(fields[i].field_id, i).second) violation(fields[i].field_id, "duplicate field id");
  }

  std::size_t roots = 0;
  for (const auto& f : fields) {
    if (!f.parent_id) {
      ++roots;
      if (f.type.kind != FieldKind::kRecord || !f.name.empty()) violation(f.field_id, "root must be an anonymous record");
      continue;
    }
    if (f.name.empty()) violation(f.field_id, "empty field name");
    if (f.name.find('.') != std::string::npos) violation(f.field_id, "field name contains '.'");
    const auto parent = by_id.find(*f.parent_id);
    if (parent == by_id.end()) {
      violation(f.field_id, "dangling parent id " + std::to_string(*f.parent_id));
      continue;
    }
    const auto& siblings = fields[parent->second].children;
    if (std::find(siblings.begin(), siblings.end(), f.field_id) == siblings.end()) {
      violation(f.field_id, "field missing from its parent's children");
    }
  }
  if (roots != 1) violation(std::nullopt, "expected exactly one root, found " + std::to_string(roots));

  for (const auto& f : fields) {
    std::set<std::string> names;
    std::set<std::string> reported;
    for (auto child : f.children) {
      const auto it = by_id.find(child);
      if (it == by_id.end()) {
        violation(f.field_id, "child id " + std::to_string(child) + " does not exist");
        continue;
      }
      const auto& c = fields[it->second];
      if (c.parent_id != f.field_id) violation(f.field_id, "child " + std::to_string(child) + " names another parent");
      if (!names.insert(c.name).second && reported.insert(c.name).second) {
        violation(f.field_id, "duplicate sibling name '" + c.name + "'");
      }
    }
    const auto n = f.children.size();
    switch (f.type.kind) {
      case FieldKind::kBool:
      case FieldKind::kString:
        if (n != 0) violation(f.field_id, std::string(field_kind_name(f.type.kind)) + " field must not have children");
        break;
      case FieldKind::kInt:
        if (n != 0) violation(f.field_id, "int field must not have children");
        if (!valid_int_width(f.type.width_bits)) violation(f.field_id, "unsupported int width");
        break;
      case FieldKind::kFloat:
        if (n != 0) violation(f.field_id, "float field must not have children");
        if (f.type.width_bits != 32 && f.type.width_bits != 64) violation(f.field_id, "unsupported float width");
        break;
      case FieldKind::kCollection:
        if (n != 1) violation(f.field_id, "collection must have exactly one child, has " + std::to_string(n));
        break;
      case FieldKind::kFixedArray:
        if (n != 1) violation(f.field_id, "fixed array must have exactly one child, has " + std::to_string(n));
        if (f.type.array_length == 0) violation(f.field_id, "fixed array length must be positive");
        break;
      case FieldKind::kRecord: break;
      case FieldKind::kVariant:
        if (n == 0) violation(f.field_id, "variant must have at least one alternative");
        break;
    }
  }

  // Cycle check: every parent chain must reach the root within |fields| steps.
  for (const auto& f : fields) {
    auto cur = f.parent_id;
    std::size_t steps = 0;
    while (cur && steps <= fields.size()) {
      const auto it = by_id.find(*cur);
      if (it == by_id.end()) break;
      cur = fields[it->second].parent_id;
      ++steps;
    }
    if (steps > fields.size()) {
      violation(f.field_id, "parent chain contains a cycle");
      break;
    }
  }
  return out;
}

std::vector<ColumnDescriptor> map_field_to_columns(const FieldDescriptor& field, std::span<const FieldDescriptor> tree,
                                                   ColumnId first_id) {
  std::vector<ColumnDescriptor> out;
  ColumnId next = first_id;
  map_recursive(field, tree, out, next, field.name);
  return out;
}

// ---------------------------------------------------------------------------

Schema::Schema() {
  FieldDescriptor root;
  root.field_id = 0;
  root.type = FieldType::record();
  fields_.push_back(root);
  index();
}

Schema Schema::from_specs(std::span<const FieldSpec> top_level) {
  Schema s;
  s.fields_.clear();
  std::vector<std::uint8_t> mantissa;
  const auto root = FieldSpec::record("", {top_level.begin(), top_level.end()});
  build_preorder(root, std::nullopt, s.fields_, mantissa);
  if (auto violations = validate_schema(s.fields_); !violations.empty()) {
    raise(ErrorClass::kSchema, "invalid schema: " + join_violations(violations));
  }
  s.columns_ = map_field_to_columns(s.fields_.front(), s.fields_, 0);
  for (auto& c : s.columns_) {
    const auto bits = mantissa[c.owner_field];
    if (bits == 0) continue;
    const auto& t = s.fields_[c.owner_field].type;
    const unsigned max_bits = t.width_bits == 32 ? 23 : 52;
    if (t.kind != FieldKind::kFloat || bits > max_bits) {
      raise(ErrorClass::kSchema, "reduced precision needs a float field and at most " + std::to_string(max_bits) +
                                     " mantissa bits", s.path_of(c.owner_field));
    }
    c.mantissa_bits = bits;
  }
  s.index();
  return s;
}

Schema Schema::from_header(const Header& header) {
  if (auto violations = validate_schema(header.fields); !violations.empty()) {
    raise(ErrorClass::kFormat, "header schema invalid: " + join_violations(violations));
  }
  Schema s;
  s.fields_ = header.fields;
  std::vector<ColumnDescriptor> expected;
  try {
    expected = map_field_to_columns(s.fields_.front(), s.fields_, 0);
  } catch (const Error&) {
    raise_nested(ErrorClass::kFormat, "header schema cannot be mapped to columns");
  }
  if (expected.size() != header.columns.size()) {
    raise(ErrorClass::kFormat, "header column table has " + std::to_string(header.columns.size()) +
                                   " columns, schema maps to " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    auto stored = header.columns[i];
    const auto bits = stored.mantissa_bits;
    stored.mantissa_bits = 0;
    if (!(stored == expected[i])) raise(ErrorClass::kFormat, "column table disagrees with schema", "column " + std::to_string(i));
    const unsigned max_bits = stored.type == PhysicalType::kFloat32 ? 23 : 52;
    if (bits != 0 && ((stored.type != PhysicalType::kFloat32 && stored.type != PhysicalType::kFloat64) || bits > max_bits)) {
      raise(ErrorClass::kFormat, "invalid reduced precision setting", "column " + std::to_string(i));
    }
    expected[i].mantissa_bits = bits;
  }
  s.columns_ = std::move(expected);
  s.index();
  return s;
}

Header Schema::to_header(std::string dataset_name) const {
  Header h;
  h.dataset_name = std::move(dataset_name);
  h.fields = fields_;
  h.columns = columns_;
  return h;
}

void Schema::index() {
  own_columns_.assign(fields_.size(), {});
  for (const auto& c : columns_) own_columns_[c.owner_field].push_back(c.column_id);
}

std::span<const ColumnId> Schema::columns_of(FieldId id) const { return own_columns_.at(id); }

std::vector<FieldId> Schema::subtree_fields(FieldId id) const {
  std::vector<FieldId> out;
  std::vector<FieldId> stack{id};
  while (!stack.empty()) {
    const auto f = stack.back();
    stack.pop_back();
    out.push_back(f);
    const auto& children = field(f).children;
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<ColumnId> Schema::subtree_columns(FieldId id) const {
  std::vector<ColumnId> out;
  for (auto f : subtree_fields(id)) {
    const auto own = columns_of(f);
    out.insert(out.end(), own.begin(), own.end());
  }
  return out;
}

std::string Schema::path_of(FieldId id) const {
  std::string out;
  for (auto cur = std::optional<FieldId>(id); cur && *cur != 0; cur = field(*cur).parent_id) {
    out = out.empty() ? field(*cur).name : field(*cur).name + "." + out;
  }
  return out;
}

std::optional<FieldId> Schema::find(std::string_view path) const {
  FieldId cur = 0;
  std::size_t start = 0;
  if (path.empty()) return std::nullopt;
  while (start <= path.size()) {
    const auto end = std::min(path.find('.', start), path.size());
    const auto part = path.substr(start, end - start);
    bool found = false;
    for (auto child : field(cur).children) {
      if (field(child).name == part) {
        cur = child;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
    start = end + 1;
  }
  return cur;
}

FieldId Schema::lookup(std::string_view path) const {
  if (auto id = find(path)) return *id;
  constexpr std::size_t kShown = 12;
  const auto& top = root().children;
  std::string candidates;
  for (std::size_t i = 0; i < std::min(top.size(), kShown); ++i) {
    if (!candidates.empty()) candidates += ", ";
    candidates += field(top[i]).name;
  }
  if (top.size() > kShown) candidates += " and " + std::to_string(top.size() - kShown) + " more";
  raise(ErrorClass::kLookup, "unknown field '" + std::string(path) + "'", "available: " + candidates);
}

bool Schema::is_entry_indexed(FieldId id) const {
  for (auto cur = field(id).parent_id; cur && *cur != 0; cur = field(*cur).parent_id) {
    if (field(*cur).type.kind != FieldKind::kRecord) return false;
  }
  return true;
}

bool Schema::structurally_equal(const Schema& other) const {
  return fields_ == other.fields_ && columns_ == other.columns_;
}

std::string Schema::first_difference(const Schema& other) const {
  const auto n = std::min(fields_.size(), other.fields_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(fields_[i] == other.fields_[i])) return i == 0 ? std::string("<root>") : path_of(static_cast<FieldId>(i));
    for (auto c : own_columns_[i]) {
      if (c >= other.columns_.size() || !(columns_[c] == other.columns_[c])) return path_of(static_cast<FieldId>(i));
    }
  }
  if (fields_.size() != other.fields_.size()) {
    const auto& longer = fields_.size() > other.fields_.size() ? *this : other;
    return longer.path_of(static_cast<FieldId>(n));
  }
  if (columns_ != other.columns_) return "<columns>";
  return {};
}

std::string Schema::dump() const {
  std::ostringstream os;
  std::vector<std::pair<FieldId, int>> stack;
  const auto& top = root().children;
  for (auto it = top.rbegin(); it != top.rend(); ++it) stack.emplace_back(*it, 0);
  while (!stack.empty()) {
    const auto [id, depth] = stack.back();
    stack.pop_back();
    const auto& f = field(id);
    os << std::string(static_cast<std::size_t>(depth) * 2, ' ') << f.name << " : " << f.type.to_string();
    for (auto c : columns_of(id)) {
      const auto& col = columns_[c];
      os << "  [#" << c << ' ' << column_role_name(col.role) << ' ' << physical_type_name(col.type);
      if (col.mantissa_bits != 0) os << " m" << static_cast<int>(col.mantissa_bits);
      os << ']';
    }
    os << '\n';
    for (auto it = f.children.rbegin(); it != f.children.rend(); ++it) stack.emplace_back(*it, depth + 1);
  }
  return os.str();
}

}  // namespace colstore
