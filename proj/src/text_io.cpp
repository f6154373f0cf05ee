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


#include "colstore/text_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace colstore {

namespace {

template <class F>
void format_float(F v, std::string& out) {
  if (std::isnan(v)) {
    out += std::signbit(v) ? "-nan" : "nan";
    return;
  }
  if (std::isinf(v)) {
    out += v < 0 ? "-inf" : "inf";
    return;
  }
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

void format_string(std::string_view s, std::string& out) {
  static constexpr char kHex[] = "0123456789abcdef";
  out += '"';
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c >= 0x7f) {
          out += "\\x";
          out += kHex[c >> 4];
          out += kHex[c & 15];
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

class Parser {
 public:
  Parser(const Schema& schema, std::string_view text) : schema_(schema), text_(text) {}

  Value value(FieldId id) {
    const auto& f = schema_.field(id);
    skip();
    switch (f.type.kind) {
      case FieldKind::kBool:
        if (accept("true")) return Value(true);
        if (accept("false")) return Value(false);
        fail("expected true or false");
      case FieldKind::kInt: return integer(f.type);
      case FieldKind::kFloat: return f.type.width_bits == 32 ? Value(floating<float>()) : Value(floating<double>());
      case FieldKind::kString: return Value(string());
      case FieldKind::kCollection:
      case FieldKind::kFixedArray: {
        expect('[');
        Value::List items;
        skip();
        if (!accept("]")) {
          do {
            items.push_back(value(f.children.front()));
            skip();
          } while (accept(","));
          expect(']');
        }
        if (f.type.kind == FieldKind::kFixedArray && items.size() != f.type.array_length) {
          fail("fixed array of " + std::to_string(f.type.array_length) + " holds " + std::to_string(items.size()) +
               " items");
        }
        return Value::list(std::move(items));
      }
      case FieldKind::kRecord: {
        expect('{');
        Value::List members;
        for (std::size_t i = 0; i < f.children.size(); ++i) {
          if (i > 0) expect(',');
          key(schema_.field(f.children[i]).name);
          members.push_back(value(f.children[i]));
        }
        expect('}');
        return Value::list(std::move(members));
      }
      case FieldKind::kVariant: {
        expect('{');
        key("alt");
        const auto alt = integer(FieldType::integer(32, false)).as<std::uint64_t>();
        if (alt >= f.children.size()) fail("variant alternative " + std::to_string(alt) + " out of range");
        expect(',');
        key("value");
        auto payload = value(f.children[alt]);
        expect('}');
        return Value::variant(static_cast<std::uint32_t>(alt), std::move(payload));
      }
    }
    fail("unsupported field");
  }

  void key(std::string_view name) {
    skip();
    const auto got = string();
    if (got != name) fail("expected key \"" + std::string(name) + "\", found \"" + got + "\"");
    expect(':');
  }

  void expect(char c) {
    skip();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }

  bool at_end() {
    skip();
    return pos_ == text_.size();
  }

  [[noreturn]] void fail(const std::string& what) const {
    raise(ErrorClass::kFormat, what, "column " + std::to_string(pos_ + 1));
  }

 private:
  bool accept(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  std::string_view number_token() {
    const auto start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '}' &&
           text_[pos_] != ' ') {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  Value integer(const FieldType& t) {
    const auto start = pos_;
    const auto tok = number_token();
    if (t.is_signed) {
      std::int64_t v = 0;
      const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      const auto lo = t.width_bits == 64 ? std::numeric_limits<std::int64_t>::min() : -(std::int64_t{1} << (t.width_bits - 1));
      const auto hi = t.width_bits == 64 ? std::numeric_limits<std::int64_t>::max() : (std::int64_t{1} << (t.width_bits - 1)) - 1;
      if (ec != std::errc() || end != tok.data() + tok.size() || tok.empty() || v < lo || v > hi) {
        pos_ = start;
        fail("invalid " + t.to_string() + " '" + std::string(tok) + "'");
      }
      return Value(v);
    }
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    const auto hi = t.width_bits == 64 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << t.width_bits) - 1;
    if (ec != std::errc() || end != tok.data() + tok.size() || tok.empty() || v > hi) {
      pos_ = start;
      fail("invalid " + t.to_string() + " '" + std::string(tok) + "'");
    }
    return Value(v);
  }

  template <class F>
  F floating() {
    const auto start = pos_;
    const auto tok = number_token();
    if (tok == "nan") return std::numeric_limits<F>::quiet_NaN();
    if (tok == "-nan") return -std::numeric_limits<F>::quiet_NaN();
    if (tok == "inf") return std::numeric_limits<F>::infinity();
    if (tok == "-inf") return -std::numeric_limits<F>::infinity();
    F v{};
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || end != tok.data() + tok.size() || tok.empty()) {
      pos_ = start;
      fail("invalid floating value '" + std::string(tok) + "'");
    }
    return v;
  }

  static int hex(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  std::string string() {
    expect('"');
    std::string out;
    for (;;) {
      if (pos_ >= text_.size()) fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= text_.size()) fail("unterminated escape");
      const char e = text_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case 'x': {
          const int hi = pos_ + 1 < text_.size() ? hex(text_[pos_]) : -1;
          const int lo = hi >= 0 ? hex(text_[pos_ + 1]) : -1;
          if (lo < 0) fail("invalid \\x escape");
          out += static_cast<char>(hi * 16 + lo);
          pos_ += 2;
          break;
        }
        default: fail(std::string("unknown escape \\") + e);
      }
    }
  }

  const Schema& schema_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

void format_value(const Schema& schema, FieldId id, const Value& value, std::string& out) {
  const auto& f = schema.field(id);
  switch (f.type.kind) {
    case FieldKind::kBool: out += value.as<bool>() ? "true" : "false"; return;
    case FieldKind::kInt:
      out += value.is<std::int64_t>() ? std::to_string(value.as<std::int64_t>()) : std::to_string(value.as<std::uint64_t>());
      return;
    case FieldKind::kFloat:
      if (value.is<float>()) {
        format_float(value.as<float>(), out);
      } else {
        format_float(value.as<double>(), out);
      }
      return;
    case FieldKind::kString: format_string(value.as<std::string>(), out); return;
    case FieldKind::kCollection:
    case FieldKind::kFixedArray: {
      out += '[';
      bool first = true;
      for (const auto& item : value.items()) {
        if (!first) out += ',';
        first = false;
        format_value(schema, f.children.front(), item, out);
      }
      out += ']';
      return;
    }
    case FieldKind::kRecord:
      out += '{';
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i > 0) out += ',';
        format_string(schema.field(f.children[i]).name, out);
        out += ':';
        format_value(schema, f.children[i], value.items()[i], out);
      }
      out += '}';
      return;
    case FieldKind::kVariant: {
      const auto& v = value.as<VariantValue>();
      out += "{\"alt\":" + std::to_string(v.alternative()) + ",\"value\":";
      format_value(schema, f.children[v.alternative()], v.payload(), out);
      out += '}';
      return;
    }
  }
}

Value parse_value(const Schema& schema, FieldId field, std::string_view text) {
  Parser p(schema, text);
  auto v = p.value(field);
  if (!p.at_end()) p.fail("trailing characters");
  return v;
}

std::uint64_t export_text(Reader& reader, std::ostream& out, std::span<const std::string> fields) {
  const auto& schema = reader.schema();
  std::vector<FieldId> ids;
  if (fields.empty()) {
    ids.assign(schema.top_level().begin(), schema.top_level().end());
  } else {
    for (const auto& name : fields) {
      const auto id = schema.lookup(name);
      if (schema.field(id).parent_id != FieldId{0}) raise(ErrorClass::kLookup, "'" + name + "' is not a top-level field");
      ids.push_back(id);
    }
  }
  std::vector<ValueView> views;
  for (auto id : ids) views.push_back(reader.value_view(schema.path_of(id)));
  std::string line;
  std::uint64_t lines = 0;
  for (auto entry : reader.entries()) {
    line.clear();
    line += '{';
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i > 0) line += ',';
      format_string(schema.field(ids[i]).name, line);
      line += ':';
      format_value(schema, ids[i], views[i](entry), line);
    }
    line += "}\n";
    out << line;
    ++lines;
  }
  return lines;
}

std::uint64_t import_text(std::istream& in, Writer& writer) {
  const auto& schema = writer.schema();
  const auto top = schema.top_level();
  std::vector<Value> values(top.size());
  std::string line;
  std::uint64_t line_no = 0;
  std::uint64_t entries = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Parser p(schema, line);
      p.expect('{');
      for (std::size_t i = 0; i < top.size(); ++i) {
        if (i > 0) p.expect(',');
        p.key(schema.field(top[i]).name);
        values[i] = p.value(top[i]);
      }
      p.expect('}');
      if (!p.at_end()) p.fail("trailing characters");
    } catch (const Error&) {
      raise_nested(ErrorClass::kFormat, "cannot parse entry", "line " + std::to_string(line_no));
    }
    writer.fill(values);
    ++entries;
  }
  return entries;
}

}  // namespace colstore
