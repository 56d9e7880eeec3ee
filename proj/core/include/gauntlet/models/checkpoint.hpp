// Copyright 2026 The Gauntlet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gauntlet/models/network.hpp"
#include "gauntlet/tensor.hpp"

namespace gauntlet::models {

// On-disk model container. Binary layout, all integers little-endian:
//
//   magic   "GNTL"                      4 bytes
//   version u32                         currently 1
//   mlen    u32, metadata byte count
//   meta    mlen bytes of UTF-8 JSON
//   count   u32, tensor count
//   per tensor:
//     nlen  u16, name byte count
//     name  nlen bytes
//     rank  u8
//     dims  rank x u32
//     data  product(dims) x f64
struct Checkpoint {
  std::uint32_t version = 1;
  std::string metadata;  // JSON text, stored verbatim
  std::vector<std::pair<std::string, Tensor>> tensors;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Byte-for-byte serialization, exposed for format tests.
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

// Model converters. Metadata carries the architecture so a checkpoint is
// self-describing; loading validates the architecture and every shape.
Checkpoint checkpoint_from_classifier(const Classifier& classifier);
Checkpoint checkpoint_from_denoiser(const Denoiser& denoiser);
Classifier classifier_from_checkpoint(const Checkpoint& ckpt);
Denoiser denoiser_from_checkpoint(const Checkpoint& ckpt);

Classifier load_classifier(const std::string& path);
Denoiser load_denoiser(const std::string& path);

}  // namespace gauntlet::models
