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

#pragma once

#include <exception>
#include <stdexcept>
#include <string>
#include <string_view>

namespace colstore {

/// Coarse classification of every failure the library reports. The CLI prints
/// the class name as a machine-parsable prefix.
enum class ErrorClass {
  kEncoding,
  kTruncation,
  kVersion,
  kFormat,
  kSchema,
  kType,
  kBounds,
  kCorruption,
  kIo,
  kUsage,
  kConsistency,
  kLookup,
  kMerge,
  kUnsupportedMode,
  kConfig,
};

std::string_view error_class_name(ErrorClass cls) noexcept;

/// Structured error: a class, a human readable message, and an optional
/// context string (field path, byte offset, locator...). Causes are chained
/// with std::throw_with_nested.
class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string message, std::string context = {});

  ErrorClass error_class() const noexcept { return class_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& context() const noexcept { return context_; }

 private:
  ErrorClass class_;
  std::string message_;
  std::string context_;
};

/// Flattens an exception and its nested causes into a single line:
/// "outer; caused by: inner; caused by: ...".
std::string describe(const std::exception& e);

/// Class of the outermost colstore::Error in the chain, if any.
ErrorClass classify(const std::exception& e, ErrorClass fallback = ErrorClass::kIo);

[[noreturn]] inline void raise(ErrorClass cls, std::string message, std::string context = {}) {
  throw Error(cls, std::move(message), std::move(context));
}

/// Rethrows the exception currently being handled wrapped in a new Error.
[[noreturn]] inline void raise_nested(ErrorClass cls, std::string message, std::string context = {}) {
  std::throw_with_nested(Error(cls, std::move(message), std::move(context)));
}

}  // namespace colstore
