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

#include "gauntlet/models/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <limits>

#include "gauntlet/errors.hpp"
#include "json.hpp"

namespace gauntlet::models {
namespace {

using nlohmann::ordered_json;

constexpr char kMagic[4] = {'G', 'N', 'T', 'L'};

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  }
}

void append_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  void need(std::size_t n, const char* what) const {
    if (pos_ + n > bytes_.size()) {
      throw FormatError("checkpoint: truncated while reading " +
                        std::string(what) + ": need " + std::to_string(n) +
                        " bytes at offset " + std::to_string(pos_) +
                        ", only " + std::to_string(bytes_.size() - pos_) +
                        " remain");
    }
  }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }

  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_]) |
                      static_cast<std::uint16_t>(bytes_[pos_ + 1]) << 8;
    pos_ += 2;
    return v;
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  double f64(const char* what) {
    need(8, what);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(bytes_.begin() + static_cast<long>(pos_),
                  bytes_.begin() + static_cast<long>(pos_ + n));
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }
  std::size_t size() const { return bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

ordered_json layers_to_json(const std::vector<LayerSpec>& layers) {
  ordered_json out = ordered_json::array();
  for (const LayerSpec& s : layers) {
    ordered_json j;
    switch (s.kind) {
      case LayerSpec::Kind::kConv:
        j["kind"] = "conv";
        j["in_channels"] = s.in_channels;
        j["out_channels"] = s.out_channels;
        j["kernel"] = s.kernel;
        j["padding"] = s.padding;
        break;
      case LayerSpec::Kind::kRelu:
        j["kind"] = "relu";
        break;
      case LayerSpec::Kind::kFlatten:
        j["kind"] = "flatten";
        break;
      case LayerSpec::Kind::kDense:
        j["kind"] = "dense";
        j["in_features"] = s.in_features;
        j["out_features"] = s.out_features;
        break;
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<LayerSpec> layers_from_json(const ordered_json& arr) {
  if (!arr.is_array()) {
    throw FormatError("checkpoint: metadata 'layers' must be an array");
  }
  std::vector<LayerSpec> out;
  for (const auto& j : arr) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "conv") {
      out.push_back(LayerSpec::conv(j.at("in_channels").get<std::size_t>(),
                                    j.at("out_channels").get<std::size_t>(),
                                    j.at("kernel").get<std::size_t>(),
                                    j.at("padding").get<int>()));
    } else if (kind == "relu") {
      out.push_back(LayerSpec::relu());
    } else if (kind == "flatten") {
      out.push_back(LayerSpec::flatten());
    } else if (kind == "dense") {
      out.push_back(LayerSpec::dense(j.at("in_features").get<std::size_t>(),
                                     j.at("out_features").get<std::size_t>()));
    } else {
      throw FormatError("checkpoint: unknown layer kind '" + kind + "'");
    }
  }
  return out;
}

InputSpec input_from_json(const ordered_json& j) {
  InputSpec in;
  in.channels = j.at("channels").get<std::size_t>();
  in.height = j.at("height").get<std::size_t>();
  in.width = j.at("width").get<std::size_t>();
  return in;
}

ordered_json input_to_json(const InputSpec& in) {
  ordered_json j;
  j["channels"] = in.channels;
  j["height"] = in.height;
  j["width"] = in.width;
  return j;
}

ordered_json parse_metadata(const Checkpoint& ckpt, const char* want_model) {
  ordered_json meta;
  try {
    meta = ordered_json::parse(ckpt.metadata);
  } catch (const ordered_json::parse_error& e) {
    throw FormatError(std::string("checkpoint: metadata is not valid JSON: ") +
                      e.what());
  }
  const std::string model = meta.at("model").get<std::string>();
  if (model != want_model) {
    throw FormatError("checkpoint: expected model '" +
                      std::string(want_model) + "', found '" + model + "'");
  }
  return meta;
}

Network network_from_checkpoint(const Checkpoint& ckpt,
                                const ordered_json& meta) {
  Network net(input_from_json(meta.at("input")),
              layers_from_json(meta.at("layers")));
  const std::size_t expected = net.named_parameters().size();
  if (ckpt.tensors.size() != expected) {
    throw ConsistencyError("checkpoint: architecture declares " +
                           std::to_string(expected) + " tensors, file holds " +
                           std::to_string(ckpt.tensors.size()));
  }
  for (const auto& [name, value] : ckpt.tensors) {
    net.set_parameter(name, value);
  }
  return net;
}

Checkpoint checkpoint_from_network(const Network& net, ordered_json meta) {
  Checkpoint ckpt;
  meta["input"] = input_to_json(net.input());
  meta["layers"] = layers_to_json(net.layers());
  ckpt.metadata = meta.dump();
  for (const auto& [name, tensor] : net.named_parameters()) {
    ckpt.tensors.emplace_back(name, *tensor);
  }
  return ckpt;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  append_u32(out, ckpt.version);
  if (ckpt.metadata.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError("checkpoint: metadata too large to encode");
  }
  append_u32(out, static_cast<std::uint32_t>(ckpt.metadata.size()));
  out.insert(out.end(), ckpt.metadata.begin(), ckpt.metadata.end());
  if (ckpt.tensors.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError("checkpoint: too many tensors to encode");
  }
  append_u32(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, tensor] : ckpt.tensors) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw FormatError("checkpoint: tensor name too long to encode: " + name);
    }
    append_u16(out, static_cast<std::uint16_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    const Shape& shape = tensor.shape();
    if (shape.size() > std::numeric_limits<std::uint8_t>::max()) {
      throw FormatError("checkpoint: tensor rank too large to encode");
    }
    out.push_back(static_cast<std::uint8_t>(shape.size()));
    for (std::size_t d : shape) {
      if (d > std::numeric_limits<std::uint32_t>::max()) {
        throw FormatError("checkpoint: dimension too large to encode");
      }
      append_u32(out, static_cast<std::uint32_t>(d));
    }
    for (double v : tensor.values()) append_f64(out, v);
  }
  return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  const std::string magic = r.str(4, "magic");
  if (magic != std::string(kMagic, 4)) {
    throw FormatError("checkpoint: bad magic '" + magic + "', expected '" +
                      std::string(kMagic, 4) + "'");
  }
  Checkpoint ckpt;
  ckpt.version = r.u32("version");
  if (ckpt.version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " +
                      std::to_string(ckpt.version) + ", expected " +
                      std::to_string(kCheckpointVersion));
  }
  const std::uint32_t mlen = r.u32("metadata length");
  ckpt.metadata = r.str(mlen, "metadata");
  const std::uint32_t count = r.u32("tensor count");
  ckpt.tensors.reserve(count);
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::uint16_t nlen = r.u16("tensor name length");
    std::string name = r.str(nlen, "tensor name");
    const std::uint8_t rank = r.u8("tensor rank");
    Shape shape(rank);
    std::size_t n = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      shape[d] = r.u32("tensor dimension");
      n *= shape[d];
    }
    Tensor tensor(shape);
    for (std::size_t i = 0; i < n; ++i) {
      tensor.values()[i] = r.f64("tensor data");
    }
    ckpt.tensors.emplace_back(std::move(name), std::move(tensor));
  }
  if (r.pos() != r.size()) {
    throw FormatError("checkpoint: " + std::to_string(r.size() - r.pos()) +
                      " trailing bytes after tensor data");
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::vector<std::uint8_t> bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("checkpoint: cannot open '" + path + "' for write");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("checkpoint: write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("checkpoint: read from '" + path + "' failed");
  return decode_checkpoint(bytes);
}

Checkpoint checkpoint_from_classifier(const Classifier& classifier) {
  ordered_json meta;
  meta["model"] = "classifier";
  meta["classes"] = classifier.classes();
  return checkpoint_from_network(classifier.network(), std::move(meta));
}

Checkpoint checkpoint_from_denoiser(const Denoiser& denoiser) {
  ordered_json meta;
  meta["model"] = "denoiser";
  return checkpoint_from_network(denoiser.network(), std::move(meta));
}

Classifier classifier_from_checkpoint(const Checkpoint& ckpt) {
  const ordered_json meta = parse_metadata(ckpt, "classifier");
  return Classifier(network_from_checkpoint(ckpt, meta),
                    meta.at("classes").get<std::size_t>());
}

Denoiser denoiser_from_checkpoint(const Checkpoint& ckpt) {
  const ordered_json meta = parse_metadata(ckpt, "denoiser");
  return Denoiser(network_from_checkpoint(ckpt, meta));
}

Classifier load_classifier(const std::string& path) {
  return classifier_from_checkpoint(load_checkpoint(path));
}

Denoiser load_denoiser(const std::string& path) {
  return denoiser_from_checkpoint(load_checkpoint(path));
}

}  // namespace gauntlet::models
