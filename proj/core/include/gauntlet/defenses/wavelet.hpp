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
#include <vector>

#include "gauntlet/tensor.hpp"

namespace gauntlet::defenses {

/// Detail subbands of one decomposition level, each [h x w].
struct SubbandTriple {
  Tensor lh;  // horizontal detail
  Tensor hl;  // vertical detail
  Tensor hh;  // diagonal detail
};

/// Multi-level 2-D wavelet decomposition. details[0] is the finest level
/// (H/2 x W/2 subbands); details.back() matches the approximation `ll`.
struct WaveletPyramid {
  Tensor ll;
  std::vector<SubbandTriple> details;

  std::size_t levels() const { return details.size(); }
};

/// Orthonormal 2-D Haar analysis: per 2x2 block [[a,b],[c,d]],
///   ll=(a+b+c+d)/2, lh=(a-b+c-d)/2, hl=(a+b-c-d)/2, hh=(a-b-c+d)/2,
/// which is H.X.H^T with H = (1/sqrt 2)[[1,1],[1,-1]] per block. The LL band
/// is recursed `levels` times. Requires 2^levels to divide both dimensions;
/// raises DimensionError otherwise. Energy is preserved (Parseval) and the
/// inverse reconstructs exactly up to rounding.
WaveletPyramid haar_dwt2(const Tensor& x, std::size_t levels);
Tensor haar_idwt2(const WaveletPyramid& pyramid);

/// sign(v) * max(|v| - t, 0).
double soft_threshold(double v, double t);

/// BayesShrink denoising of the detail subbands; the LL band is untouched.
/// Noise scale sigma_n = median(|HH_1|)/0.6745 (finest diagonal band). For
/// each detail subband: sigma_s = sqrt(max(variance - sigma_n^2, 0)) with
/// variance the population variance of the subband, threshold
/// T = sigma_n^2/sigma_s, or T = max|v| over the subband when sigma_s = 0;
/// every coefficient is soft-thresholded by T.
WaveletPyramid bayes_shrink(const WaveletPyramid& pyramid);

/// Median of |v| over all elements; even counts average the two middle
/// order statistics. Raises InputError on an empty tensor.
double median_abs(const Tensor& t);

}  // namespace gauntlet::defenses
