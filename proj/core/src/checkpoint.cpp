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

#include "kwsem/checkpoint.hpp"

#include <cstring>

#include "binary_io.hpp"
#include "kwsem/error.hpp"

namespace kwsem {
namespace {

constexpr char kMagic[8] = {'K', 'S', 'E', 'M', 'C', 'K', 'P', 'T'};

void put_arch(detail::ByteWriter& w, const ArchSpec& s) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.n_mels));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.input_frames));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.block_channels.size()));
  for (const std::size_t c : s.block_channels) w.put<std::uint32_t>(static_cast<std::uint32_t>(c));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.convs_per_block));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.final_channels));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.final_kernel));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.embedding_dim));
}

ArchSpec get_arch(detail::ByteReader& r) {
  ArchSpec s;
  s.n_mels = r.get<std::uint32_t>();
  s.input_frames = r.get<std::uint32_t>();
  const auto blocks = r.get<std::uint32_t>();
  if (blocks > 64) throw FormatError("checkpoint: implausible block count");
  s.block_channels.clear();
  for (std::uint32_t i = 0; i < blocks; ++i) s.block_channels.push_back(r.get<std::uint32_t>());
  s.convs_per_block = r.get<std::uint32_t>();
  s.final_channels = r.get<std::uint32_t>();
  s.final_kernel = r.get<std::uint32_t>();
  s.embedding_dim = r.get<std::uint32_t>();
  return s;
}

}  // namespace

std::vector<unsigned char> encode_checkpoint(
    const Embedder<float>& embedder,
    const std::map<std::string, std::vector<unsigned char>>& sections) {
  detail::ByteWriter w;
  w.put_bytes(kMagic, sizeof(kMagic));
  w.put<std::uint16_t>(kCheckpointVersion);
  put_arch(w, embedder.spec());
  const auto buffers = embedder.export_buffers();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(buffers.size()));
  for (const auto& b : buffers) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(b.size()));
    w.put_floats(b);
  }
  for (const auto& [tag, payload] : sections) {
    w.put<std::uint16_t>(static_cast<std::uint16_t>(tag.size()));
    w.put_bytes(tag.data(), tag.size());
    w.put<std::uint64_t>(payload.size());
    w.put_bytes(payload.data(), payload.size());
  }
  return std::move(w.bytes());
}

namespace {

struct Parsed {
  ArchSpec spec;
  std::vector<std::vector<float>> buffers;
  std::size_t embedder_bytes = 0;
  std::map<std::string, std::vector<unsigned char>> sections;
};

Parsed parse(const std::vector<unsigned char>& bytes, const std::string& what) {
  detail::ByteReader r(bytes, what);
  char magic[8];
  try {
    r.get_bytes(magic, sizeof(magic));
  } catch (const FormatError&) {
    throw FormatError(what + ": not a kwsem checkpoint (too short)");
  }
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError(what + ": not a kwsem checkpoint (bad magic)");
  }
  const auto version = r.get<std::uint16_t>();
  if (version != kCheckpointVersion) {
    throw FormatError(what + ": checkpoint version " + std::to_string(version) +
                      " not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  Parsed p;
  p.spec = get_arch(r);
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto n = r.get<std::uint32_t>();
    p.buffers.push_back(r.get_floats(n));
  }
  p.embedder_bytes = r.position();
  while (r.remaining() > 0) {
    const auto tag_len = r.get<std::uint16_t>();
    std::string tag(tag_len, '\0');
    r.get_bytes(tag.data(), tag_len);
    const auto len = r.get<std::uint64_t>();
    if (len > r.remaining()) throw FormatError(what + ": truncated section " + tag);
    std::vector<unsigned char> payload(len);
    r.get_bytes(payload.data(), len);
    p.sections[tag] = std::move(payload);
  }
  return p;
}

}  // namespace

Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes, const std::string& what) {
  Parsed p = parse(bytes, what);
  Embedder<float> e = [&] {
    try {
      return Embedder<float>::build(p.spec, 0);
    } catch (const ConfigError& err) {
      throw FormatError(what + ": invalid architecture: " + err.what());
    }
  }();
  e.load_buffers(p.buffers);
  return Checkpoint{std::move(e), std::move(p.sections)};
}

void save_checkpoint(const Embedder<float>& embedder, const std::string& path,
                     const std::map<std::string, std::vector<unsigned char>>& sections) {
  detail::write_file_bytes(path, encode_checkpoint(embedder, sections));
}

Checkpoint load_checkpoint(const std::string& path) {
  return decode_checkpoint(detail::read_file_bytes(path), path);
}

std::size_t embedder_section_size(const std::vector<unsigned char>& bytes) {
  return parse(bytes, "checkpoint").embedder_bytes;
}

std::vector<unsigned char> encode_head(const HeadParams& head) {
  detail::ByteWriter w;
  w.put<std::uint32_t>(static_cast<std::uint32_t>(head.num_classes));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(head.dim));
  w.put_floats(head.weights);
  w.put_floats(head.bias);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(head.labels.size()));
  for (const auto& l : head.labels) w.put_string(l);
  return std::move(w.bytes());
}

HeadParams decode_head(const std::vector<unsigned char>& payload) {
  detail::ByteReader r(payload, "HEAD section");
  HeadParams h;
  h.num_classes = r.get<std::uint32_t>();
  h.dim = r.get<std::uint32_t>();
  h.weights = r.get_floats(h.num_classes * h.dim);
  h.bias = r.get_floats(h.num_classes);
  const auto n = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) h.labels.push_back(r.get_string());
  return h;
}

}  // namespace kwsem
