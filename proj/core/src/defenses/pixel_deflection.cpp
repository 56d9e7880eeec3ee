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

#include "gauntlet/defenses/pixel_deflection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gauntlet/defenses/wavelet.hpp"
#include "gauntlet/errors.hpp"

namespace gauntlet::defenses {

long PixelDeflectionConfig::resolve_deflections(std::size_t h,
                                                std::size_t w) const {
  if (deflections) return *deflections;
  if (deflection_fraction <= 0.0) return 0;
  const double pixels = static_cast<double>(h) * static_cast<double>(w);
  return std::max(1L, static_cast<long>(deflection_fraction * pixels));
}

void PixelDeflectionConfig::validate(std::size_t h, std::size_t w) const {
  if (deflections && *deflections < 0) {
    throw ConfigError("pixel deflection: deflection count must be >= 0, got " +
                      std::to_string(*deflections));
  }
  if (deflection_fraction < 0.0) {
    throw ConfigError("pixel deflection: deflection fraction must be >= 0");
  }
  if (window_radius < 1) {
    throw ConfigError("pixel deflection: window radius must be >= 1, got " +
                      std::to_string(window_radius));
  }
  if (wavelet_levels < 1) {
    throw ConfigError("pixel deflection: wavelet levels must be >= 1");
  }
  const std::size_t block = std::size_t{1} << wavelet_levels;
  if (h == 0 || w == 0 || h % block != 0 || w % block != 0) {
    throw ConfigError("pixel deflection: 2^" +
                      std::to_string(wavelet_levels) +
                      " must divide both dims of a " + std::to_string(h) +
                      "x" + std::to_string(w) + " image");
  }
  if (resolve_deflections(h, w) > 0 && h * w < 2) {
    throw ConfigError("pixel deflection: a " + std::to_string(h) + "x" +
                      std::to_string(w) +
                      " image has no deflection source within any window");
  }
}

Tensor pixel_deflect(const Tensor& x, const PixelDeflectionConfig& config,
                     Rng& rng) {
  if (x.rank() != 3) {
    throw DimensionError("pixel_deflect: expected [CxHxW], got " +
                         shape_string(x.shape()));
  }
  const std::size_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  config.validate(h, w);
  const long k = config.resolve_deflections(h, w);
  const long r = config.window_radius;

  Tensor out = x;
  for (long d = 0; d < k; ++d) {
    const long th = static_cast<long>(rng.uniform_index(h));
    const long tw = static_cast<long>(rng.uniform_index(w));
    long sh, sw;
    do {
      sh = th + rng.uniform_int(-r, r);
      sw = tw + rng.uniform_int(-r, r);
    } while ((sh == th && sw == tw) || sh < 0 || sh >= static_cast<long>(h) ||
             sw < 0 || sw >= static_cast<long>(w));
    for (std::size_t ci = 0; ci < c; ++ci) {
      out.at(ci, static_cast<std::size_t>(th), static_cast<std::size_t>(tw)) =
          out.at(ci, static_cast<std::size_t>(sh),
                 static_cast<std::size_t>(sw));
    }
  }
  return out;
}

Tensor PixelDeflectionDefense::apply(const Tensor& x, Rng& rng) const {
  Tensor deflected = pixel_deflect(x, config_, rng);
  const std::size_t c = deflected.dim(0), h = deflected.dim(1),
                    w = deflected.dim(2);
  Tensor out(deflected.shape());
  for (std::size_t ci = 0; ci < c; ++ci) {
    Tensor channel({h, w});
    std::copy(deflected.data() + ci * h * w, deflected.data() + (ci + 1) * h * w,
              channel.data());
    Tensor denoised =
        haar_idwt2(bayes_shrink(haar_dwt2(channel, config_.wavelet_levels)));
    std::copy(denoised.data(), denoised.data() + h * w,
              out.data() + ci * h * w);
  }
  return clamp(out, 0.0, 1.0);
}

}  // namespace gauntlet::defenses
