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


// Canonical text form of entries: one line per entry,
//
//   {"field":value,...}
//
// bool      true | false
// integer   decimal
// float     shortest round-trip decimal for the stored width; nan, -nan,
//           inf, -inf
// string    "..." with \" \\ \n \r \t escaped and every other byte below
//           0x20 or from 0x7f up written as \xHH
// list      [v,...] for collections and fixed arrays
// record    {"member":v,...} in member order
// variant   {"alt":k,"value":v} with the 0-based alternative k

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "colstore/reader.hpp"
#include "colstore/writer.hpp"

namespace colstore {

void format_value(const Schema& schema, FieldId field, const Value& value, std::string& out);
/// Parses one value of `field`. Throws kFormat with the position.
Value parse_value(const Schema& schema, FieldId field, std::string_view text);

/// Writes every entry of `reader` restricted to the named top-level fields
/// (all when empty). Returns the number of lines.
std::uint64_t export_text(Reader& reader, std::ostream& out, std::span<const std::string> fields = {});
/// Reads lines holding exactly the writer's top-level fields in order and
/// fills one entry per line. Returns the number of entries.
std::uint64_t import_text(std::istream& in, Writer& writer);

}  // namespace colstore
