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


#include "colstore/device.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>

namespace colstore {

namespace {

[[noreturn]] void sys_error(const std::string& what, const std::string& path, std::uint64_t offset) {
  raise(ErrorClass::kIo, what + ": " + std::strerror(errno), path + " at offset " + std::to_string(offset));
}

class FileMapping final : public Mapping {
 public:
  FileMapping(void* base, std::size_t size) : base_(base), size_(size) {
    bytes_ = ByteSpan(static_cast<const std::byte*>(base), size);
  }
  ~FileMapping() override {
    if (base_ != nullptr) munmap(base_, size_);
  }

 private:
  void* base_;
  std::size_t size_;
};

class SharedBytesMapping final : public Mapping {
 public:
  explicit SharedBytesMapping(std::shared_ptr<const Bytes> bytes) : keep_(std::move(bytes)) { bytes_ = *keep_; }

 private:
  std::shared_ptr<const Bytes> keep_;
};

}  // namespace

void Device::write_at(std::uint64_t offset, ByteSpan) {
  raise(ErrorClass::kUsage, "device is read-only", name() + " at offset " + std::to_string(offset));
}

std::shared_ptr<const Mapping> Device::map() {
  raise(ErrorClass::kUnsupportedMode, "device does not support mapping", name());
}

std::shared_ptr<FileDevice> FileDevice::open(const std::string& path, Mode mode) {
  int flags = O_CLOEXEC;
  switch (mode) {
    case Mode::kRead: flags |= O_RDONLY; break;
    case Mode::kCreate: flags |= O_RDWR | O_CREAT | O_EXCL; break;
    case Mode::kOverwrite: flags |= O_RDWR | O_CREAT | O_TRUNC; break;
    case Mode::kUpdate: flags |= O_RDWR; break;
  }
  const int fd = ::open(path.c_str(), flags, 0644);
  if (fd < 0) {
    if (mode == Mode::kCreate && errno == EEXIST) {
      raise(ErrorClass::kUsage, "output file exists; committed datasets are immutable (use overwrite)", path);
    }
    sys_error("cannot open file", path, 0);
  }
  return std::shared_ptr<FileDevice>(new FileDevice(path, fd, mode != Mode::kRead));
}

FileDevice::~FileDevice() { ::close(fd_); }

std::uint64_t FileDevice::size() const {
  struct stat st {};
  if (fstat(fd_, &st) != 0) sys_error("cannot stat file", path_, 0);
  return static_cast<std::uint64_t>(st.st_size);
}

void FileDevice::read_at(std::uint64_t offset, std::span<std::byte> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    const auto n = ::pread(fd_, out.data() + done, out.size() - done, static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_error("read failed", path_, offset + done);
    }
    if (n == 0) {
      raise(ErrorClass::kTruncation, "unexpected end of file",
            path_ + " at offset " + std::to_string(offset + done) + ", wanted " + std::to_string(out.size() - done) +
                " more bytes");
    }
    done += static_cast<std::size_t>(n);
  }
}

void FileDevice::write_at(std::uint64_t offset, ByteSpan data) {
  if (!writable_) Device::write_at(offset, data);
  std::size_t done = 0;
  while (done < data.size()) {
    const auto n = ::pwrite(fd_, data.data() + done, data.size() - done, static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_error("write failed", path_, offset + done);
    }
    done += static_cast<std::size_t>(n);
  }
}

void FileDevice::sync() {
  if (writable_ && ::fsync(fd_) != 0) sys_error("fsync failed", path_, 0);
}

std::shared_ptr<const Mapping> FileDevice::map() {
  const auto n = size();
  if (n == 0) return std::make_shared<SharedBytesMapping>(std::make_shared<const Bytes>());
  void* base = ::mmap(nullptr, n, PROT_READ, MAP_SHARED, fd_, 0);
  if (base == MAP_FAILED) sys_error("mmap failed", path_, 0);
  return std::make_shared<FileMapping>(base, n);
}

std::uint64_t MemoryDevice::size() const {
  std::shared_lock lock(mutex_);
  return bytes_->size();
}

void MemoryDevice::read_at(std::uint64_t offset, std::span<std::byte> out) {
  std::shared_lock lock(mutex_);
  if (offset > bytes_->size() || out.size() > bytes_->size() - offset) {
    raise(ErrorClass::kTruncation, "unexpected end of device",
          "memory at offset " + std::to_string(offset) + ", wanted " + std::to_string(out.size()) + " bytes");
  }
  std::memcpy(out.data(), bytes_->data() + offset, out.size());
}

void MemoryDevice::write_at(std::uint64_t offset, ByteSpan data) {
  std::unique_lock lock(mutex_);
  if (bytes_.use_count() > 1) bytes_ = std::make_shared<Bytes>(*bytes_);  // copy on write while mapped
  if (bytes_->size() < offset + data.size()) bytes_->resize(offset + data.size());
  std::memcpy(bytes_->data() + offset, data.data(), data.size());
}

std::shared_ptr<const Mapping> MemoryDevice::map() {
  std::shared_lock lock(mutex_);
  return std::make_shared<SharedBytesMapping>(bytes_);
}

Bytes MemoryDevice::contents() const {
  std::shared_lock lock(mutex_);
  return *bytes_;
}

}  // namespace colstore
