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
#include <optional>
#include <string>

#include "gauntlet/defenses/defense.hpp"
#include "gauntlet/rng.hpp"
#include "gauntlet/tensor.hpp"

namespace gauntlet::defenses {

/// Pixel deflection parameters. The deflection count is either the absolute
/// `deflections` when set, or floor(deflection_fraction * H * W) with a
/// minimum of 1 when the fraction is positive.
struct PixelDeflectionConfig {
  std::optional<long> deflections;
  double deflection_fraction = 0.01;
  long window_radius = 2;
  std::size_t wavelet_levels = 2;

  long resolve_deflections(std::size_t h, std::size_t w) const;

  /// Raises ConfigError unless the config is usable on an HxW image:
  /// count >= 0, radius >= 1, levels >= 1, 2^levels divides both dims, and
  /// the image has at least 2 pixels whenever the count is positive (a 1x1
  /// image offers no deflection source for any radius).
  void validate(std::size_t h, std::size_t w) const;
};

/// Applies K sequential deflections to x [C x H x W]. Each deflection draws
/// a target coordinate (row then column, via uniform_index), then draws
/// source offsets in [-r, r] x [-r, r] (row offset then column offset, via
/// uniform_int) rejecting (0,0) and out-of-bounds positions, and copies the
/// source pixel onto the target across all channels. A later deflection can
/// copy a value written by an earlier one.
Tensor pixel_deflect(const Tensor& x, const PixelDeflectionConfig& config,
                     Rng& rng);

/// Full randomized, non-differentiable pipeline:
/// clip(idwt(bayes_shrink(dwt(pixel_deflect(x)))), 0, 1), wavelet denoising
/// per channel. Attacks must route through BPDA.
class PixelDeflectionDefense final : public DefensePipeline {
 public:
  explicit PixelDeflectionDefense(PixelDeflectionConfig config)
      : config_(config) {}

  std::string name() const override { return "pixel-deflection"; }
  bool differentiable() const override { return false; }
  bool randomized() const override {
    return config_.deflections ? *config_.deflections > 0
                               : config_.deflection_fraction > 0.0;
  }
  Tensor apply(const Tensor& x, Rng& rng) const override;

  const PixelDeflectionConfig& config() const { return config_; }

 private:
  PixelDeflectionConfig config_;
};

}  // namespace gauntlet::defenses
