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


// Byte devices and containers. A container is a device plus the offset of
// the dataset region inside it: 0 for a bare file, nonzero when the dataset
// is embedded in a host file. All offsets stored in the dataset are relative
// to the region start.

#pragma once

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>

#include "colstore/format.hpp"

namespace colstore {

/// A read-only view of a whole device that stays valid while held.
class Mapping {
 public:
  virtual ~Mapping() = default;
  ByteSpan bytes() const noexcept { return bytes_; }

 protected:
  ByteSpan bytes_;
};

class Device {
 public:
  virtual ~Device() = default;

  virtual std::uint64_t size() const = 0;
  /// Fills `out` entirely from `offset`. Short reads throw kTruncation,
  /// system errors kIo; both carry the device offset.
  virtual void read_at(std::uint64_t offset, std::span<std::byte> out) = 0;
  /// Default: kUsage (read-only device).
  virtual void write_at(std::uint64_t offset, ByteSpan data);
  virtual void sync() {}
  /// Default: kUnsupportedMode.
  virtual std::shared_ptr<const Mapping> map();
  virtual std::string name() const = 0;
};

class FileDevice final : public Device {
 public:
  enum class Mode {
    kRead,       // existing file, read-only
    kCreate,     // new file; fails if it exists
    kOverwrite,  // new or truncated file
    kUpdate,     // existing file, read-write (host files for embedding)
  };

  static std::shared_ptr<FileDevice> open(const std::string& path, Mode mode);
  ~FileDevice() override;

  std::uint64_t size() const override;
  void read_at(std::uint64_t offset, std::span<std::byte> out) override;
  void write_at(std::uint64_t offset, ByteSpan data) override;
  void sync() override;
  std::shared_ptr<const Mapping> map() override;
  std::string name() const override { return path_; }

 private:
  FileDevice(std::string path, int fd, bool writable) : path_(std::move(path)), fd_(fd), writable_(writable) {}

  std::string path_;
  int fd_;
  bool writable_;
};

/// Growable in-memory device. Reads may run concurrently with each other.
class MemoryDevice final : public Device {
 public:
  MemoryDevice() = default;
  explicit MemoryDevice(Bytes contents) : bytes_(std::make_shared<Bytes>(std::move(contents))) {}

  std::uint64_t size() const override;
  void read_at(std::uint64_t offset, std::span<std::byte> out) override;
  void write_at(std::uint64_t offset, ByteSpan data) override;
  std::shared_ptr<const Mapping> map() override;
  std::string name() const override { return "memory"; }

  /// Snapshot of the current contents.
  Bytes contents() const;

 private:
  mutable std::shared_mutex mutex_;
  std::shared_ptr<Bytes> bytes_ = std::make_shared<Bytes>();
};

struct Container {
  std::shared_ptr<Device> device;
  std::uint64_t region_offset = 0;

  static Container bare(std::shared_ptr<Device> device) { return {std::move(device), 0}; }
  static Container embedded(std::shared_ptr<Device> device, std::uint64_t region_offset) {
    return {std::move(device), region_offset};
  }
  static Container memory() { return bare(std::make_shared<MemoryDevice>()); }
  static Container open_file(const std::string& path, std::uint64_t region_offset = 0) {
    return {FileDevice::open(path, FileDevice::Mode::kRead), region_offset};
  }
};

}  // namespace colstore
