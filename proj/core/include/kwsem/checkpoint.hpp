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

#ifndef KWSEM_CHECKPOINT_HPP_
#define KWSEM_CHECKPOINT_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kwsem/classifier.hpp"
#include "kwsem/embedder.hpp"

namespace kwsem {

inline constexpr std::uint16_t kCheckpointVersion = 1;
inline constexpr const char* kHeadSection = "HEAD";
inline constexpr const char* kRegistrySection = "REGISTRY";

// Checkpoint layout (little-endian):
//   "KSEMCKPT" | u16 version | ArchSpec | u32 buffer count |
//   per buffer: u32 length, float32[length] (declaration order) |
//   zero or more sections: u16 tag length, tag, u64 payload length, payload.
// The bytes up to the end of the parameter buffers are the "embedder
// section"; appending or replacing tagged sections never rewrites them.
struct Checkpoint {
  Embedder<float> embedder;
  std::map<std::string, std::vector<unsigned char>> sections;
};

std::vector<unsigned char> encode_checkpoint(const Embedder<float>& embedder,
                                             const std::map<std::string, std::vector<unsigned char>>& sections = {});
Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes, const std::string& what);

void save_checkpoint(const Embedder<float>& embedder, const std::string& path,
                     const std::map<std::string, std::vector<unsigned char>>& sections = {});
Checkpoint load_checkpoint(const std::string& path);

// Byte length of the embedder section of an encoded checkpoint.
std::size_t embedder_section_size(const std::vector<unsigned char>& bytes);

std::vector<unsigned char> encode_head(const HeadParams& head);
HeadParams decode_head(const std::vector<unsigned char>& payload);

}  // namespace kwsem

#endif  // KWSEM_CHECKPOINT_HPP_
