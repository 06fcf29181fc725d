// Copyright 2026 The kwsem Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian binary helpers shared by the feature cache and checkpoint
// formats.

#ifndef KWSEM_SRC_BINARY_IO_HPP_
#define KWSEM_SRC_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kwsem/error.hpp"

namespace kwsem::detail {

static_assert(std::endian::native == std::endian::little, "kwsem formats assume little-endian hosts");

class ByteWriter {
 public:
  template <typename U>
  void put(U v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(U));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    put_bytes(s.data(), s.size());
  }
  void put_floats(std::span<const float> v) { put_bytes(v.data(), v.size() * sizeof(float)); }

  const std::vector<unsigned char>& bytes() const { return bytes_; }
  std::vector<unsigned char>& bytes() { return bytes_; }

 private:
  std::vector<unsigned char> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::span<const unsigned char> bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  template <typename U>
  U get() {
    U v;
    get_bytes(&v, sizeof(U));
    return v;
  }
  void get_bytes(void* out, std::size_t n) {
    if (n > remaining()) throw FormatError(what_ + ": truncated");
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    std::string s(n, '\0');
    get_bytes(s.data(), n);
    return s;
  }
  std::vector<float> get_floats(std::size_t n) {
    if (n > remaining() / sizeof(float)) throw FormatError(what_ + ": truncated");
    std::vector<float> v(n);
    get_bytes(v.data(), n * sizeof(float));
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }
  std::span<const unsigned char> rest() const { return bytes_.subspan(pos_); }
  void skip(std::size_t n) {
    if (n > remaining()) throw FormatError(what_ + ": truncated");
    pos_ += n;
  }

 private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
  std::string what_;
};

std::vector<unsigned char> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const unsigned char> bytes);

}  // namespace kwsem::detail

#endif  // KWSEM_SRC_BINARY_IO_HPP_
