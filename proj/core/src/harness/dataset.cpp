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

#include "gauntlet/harness/dataset.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>

#include "gauntlet/errors.hpp"

namespace gauntlet::harness {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;  // ubyte, rank 3
constexpr std::uint32_t kLabelsMagic = 0x00000801;  // ubyte, rank 1

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("idx: cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("idx: read from '" + path + "' failed");
  return bytes;
}

std::uint32_t read_u32_be(const std::vector<std::uint8_t>& bytes,
                          std::size_t pos, const std::string& path,
                          const char* what) {
  if (pos + 4 > bytes.size()) {
    throw FormatError("idx: '" + path + "' truncated reading " + what +
                      ": need " + std::to_string(pos + 4) +
                      " bytes, file has " + std::to_string(bytes.size()));
  }
  return static_cast<std::uint32_t>(bytes[pos]) << 24 |
         static_cast<std::uint32_t>(bytes[pos + 1]) << 16 |
         static_cast<std::uint32_t>(bytes[pos + 2]) << 8 |
         static_cast<std::uint32_t>(bytes[pos + 3]);
}

void append_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void write_file(const std::string& path,
                const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("idx: cannot open '" + path + "' for write");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("idx: write to '" + path + "' failed");
}

void require_payload(const std::vector<std::uint8_t>& bytes,
                     std::size_t header, std::size_t payload,
                     const std::string& path) {
  if (bytes.size() != header + payload) {
    throw FormatError("idx: '" + path + "' holds " +
                      std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(header + payload));
  }
}

}  // namespace

void Dataset::truncate(std::size_t n) {
  if (images.size() > n) images.resize(n);
  if (labels.size() > n) labels.resize(n);
}

Dataset load_idx(const std::string& images_path,
                 const std::string& labels_path, std::string split) {
  const std::vector<std::uint8_t> ibytes = read_file(images_path);
  const std::uint32_t imagic = read_u32_be(ibytes, 0, images_path, "magic");
  if (imagic != kImagesMagic) {
    throw FormatError("idx: '" + images_path + "' has magic " +
                      std::to_string(imagic) + ", expected " +
                      std::to_string(kImagesMagic) + " for images");
  }
  const std::uint32_t count = read_u32_be(ibytes, 4, images_path, "count");
  const std::uint32_t h = read_u32_be(ibytes, 8, images_path, "height");
  const std::uint32_t w = read_u32_be(ibytes, 12, images_path, "width");
  require_payload(ibytes, 16,
                  static_cast<std::size_t>(count) * h * w, images_path);

  const std::vector<std::uint8_t> lbytes = read_file(labels_path);
  const std::uint32_t lmagic = read_u32_be(lbytes, 0, labels_path, "magic");
  if (lmagic != kLabelsMagic) {
    throw FormatError("idx: '" + labels_path + "' has magic " +
                      std::to_string(lmagic) + ", expected " +
                      std::to_string(kLabelsMagic) + " for labels");
  }
  const std::uint32_t lcount = read_u32_be(lbytes, 4, labels_path, "count");
  require_payload(lbytes, 8, lcount, labels_path);

  if (count != lcount) {
    throw ConsistencyError("idx: " + std::to_string(count) + " images in '" +
                           images_path + "' but " + std::to_string(lcount) +
                           " labels in '" + labels_path + "'");
  }

  Dataset dataset;
  dataset.split = std::move(split);
  dataset.images.reserve(count);
  dataset.labels.reserve(count);
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor image({1, h, w});
    const std::uint8_t* src = ibytes.data() + 16 + i * plane;
    for (std::size_t p = 0; p < plane; ++p) {
      image[p] = static_cast<double>(src[p]) / 255.0;
    }
    dataset.images.push_back(std::move(image));
    dataset.labels.push_back(static_cast<int>(lbytes[8 + i]));
  }
  return dataset;
}

void save_idx(const Dataset& dataset, const std::string& images_path,
              const std::string& labels_path) {
  if (dataset.images.size() != dataset.labels.size()) {
    throw ConsistencyError("idx: " + std::to_string(dataset.images.size()) +
                           " images but " +
                           std::to_string(dataset.labels.size()) + " labels");
  }
  std::size_t h = 0, w = 0;
  if (!dataset.images.empty()) {
    const Shape& shape = dataset.images.front().shape();
    if (shape.size() != 3 || shape[0] != 1) {
      throw DimensionError("idx: images must be [1xHxW], got " +
                           shape_string(shape));
    }
    h = shape[1];
    w = shape[2];
  }

  std::vector<std::uint8_t> ibytes;
  append_u32_be(ibytes, kImagesMagic);
  append_u32_be(ibytes, static_cast<std::uint32_t>(dataset.images.size()));
  append_u32_be(ibytes, static_cast<std::uint32_t>(h));
  append_u32_be(ibytes, static_cast<std::uint32_t>(w));
  for (const Tensor& image : dataset.images) {
    if (image.shape() != Shape{1, h, w}) {
      throw DimensionError("idx: inconsistent image shape " +
                           shape_string(image.shape()));
    }
    for (std::size_t p = 0; p < image.size(); ++p) {
      const double v = std::min(std::max(image[p], 0.0), 1.0);
      ibytes.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    }
  }
  write_file(images_path, ibytes);

  std::vector<std::uint8_t> lbytes;
  append_u32_be(lbytes, kLabelsMagic);
  append_u32_be(lbytes, static_cast<std::uint32_t>(dataset.labels.size()));
  for (int label : dataset.labels) {
    if (label < 0 || label > 255) {
      throw FormatError("idx: label " + std::to_string(label) +
                        " does not fit in a byte");
    }
    lbytes.push_back(static_cast<std::uint8_t>(label));
  }
  write_file(labels_path, lbytes);
}

}  // namespace gauntlet::harness
