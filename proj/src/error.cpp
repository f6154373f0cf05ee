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

#include "colstore/error.hpp"

namespace colstore {

std::string_view error_class_name(ErrorClass cls) noexcept {
  switch (cls) {
    case ErrorClass::kEncoding: return "encoding";
    case ErrorClass::kTruncation: return "truncation";
    case ErrorClass::kVersion: return "version";
    case ErrorClass::kFormat: return "format";
    case ErrorClass::kSchema: return "schema";
    case ErrorClass::kType: return "type";
    case ErrorClass::kBounds: return "bounds";
    case ErrorClass::kCorruption: return "corruption";
    case ErrorClass::kIo: return "io";
    case ErrorClass::kUsage: return "usage";
    case ErrorClass::kConsistency: return "consistency";
    case ErrorClass::kLookup: return "lookup";
    case ErrorClass::kMerge: return "merge";
    case ErrorClass::kUnsupportedMode: return "unsupported-mode";
    case ErrorClass::kConfig: return "config";
  }
  return "unknown";
}

namespace {

std::string compose(ErrorClass cls, const std::string& message, const std::string& context) {
  std::string out(error_class_name(cls));
  out += ": ";
  out += message;
  if (!context.empty()) {
    out += " [";
    out += context;
    out += "]";
  }
  return out;
}

void append_chain(const std::exception& e, std::string& out) {
  if (!out.empty()) out += "; caused by: ";
  out += e.what();
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    append_chain(inner, out);
  } catch (...) {
    out += "; caused by: unknown exception";
  }
}

}  // namespace

Error::Error(ErrorClass cls, std::string message, std::string context)
    : std::runtime_error(compose(cls, message, context)),
      class_(cls),
      message_(std::move(message)),
      context_(std::move(context)) {}

std::string describe(const std::exception& e) {
  std::string out;
  append_chain(e, out);
  return out;
}

ErrorClass classify(const std::exception& e, ErrorClass fallback) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return err->error_class();
  return fallback;
}

}  // namespace colstore
