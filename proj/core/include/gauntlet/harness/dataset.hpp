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

#include <string>
#include <vector>

#include "gauntlet/tensor.hpp"

namespace gauntlet::harness {

/// Labelled image collection. Images are [1 x H x W] with values in [0,1].
struct Dataset {
  std::vector<Tensor> images;
  std::vector<int> labels;
  std::string split;  // free-form tag, e.g. "train" or "test"

  std::size_t size() const { return images.size(); }

  /// Keeps only the first n examples.
  void truncate(std::size_t n);
};

/// Parses an IDX image/label file pair: big-endian magic 0x00000803
/// (unsigned-byte images, rank 3) and 0x00000801 (unsigned-byte labels,
/// rank 1), big-endian dimension sizes, raw byte payload. Bytes scale to
/// [0,1] by /255. Raises FormatError on a wrong magic or a truncated file
/// (naming expected vs. actual length) and ConsistencyError when the image
/// and label counts differ.
Dataset load_idx(const std::string& images_path,
                 const std::string& labels_path, std::string split = {});

/// Writes the dataset as an IDX pair; pixels quantize by round(v * 255).
void save_idx(const Dataset& dataset, const std::string& images_path,
              const std::string& labels_path);

}  // namespace gauntlet::harness
