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

#include "gauntlet/defenses/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gauntlet/errors.hpp"

namespace gauntlet::defenses {
namespace {

// Median absolute deviation to sigma for Gaussian noise.
constexpr double kMadToSigma = 0.6745;

void analyze_level(const Tensor& x, Tensor* ll, SubbandTriple* detail) {
  const std::size_t h = x.dim(0), w = x.dim(1);
  const std::size_t hh = h / 2, hw = w / 2;
  *ll = Tensor({hh, hw});
  detail->lh = Tensor({hh, hw});
  detail->hl = Tensor({hh, hw});
  detail->hh = Tensor({hh, hw});
  for (std::size_t i = 0; i < hh; ++i) {
    for (std::size_t j = 0; j < hw; ++j) {
      const double a = x.at(2 * i, 2 * j);
      const double b = x.at(2 * i, 2 * j + 1);
      const double c = x.at(2 * i + 1, 2 * j);
      const double d = x.at(2 * i + 1, 2 * j + 1);
      ll->at(i, j) = (a + b + c + d) / 2.0;
      detail->lh.at(i, j) = (a - b + c - d) / 2.0;
      detail->hl.at(i, j) = (a + b - c - d) / 2.0;
      detail->hh.at(i, j) = (a - b - c + d) / 2.0;
    }
  }
}

Tensor synthesize_level(const Tensor& ll, const SubbandTriple& detail) {
  const std::size_t hh = ll.dim(0), hw = ll.dim(1);
  Tensor x({2 * hh, 2 * hw});
  for (std::size_t i = 0; i < hh; ++i) {
    for (std::size_t j = 0; j < hw; ++j) {
      const double s = ll.at(i, j);
      const double dlh = detail.lh.at(i, j);
      const double dhl = detail.hl.at(i, j);
      const double dhh = detail.hh.at(i, j);
      x.at(2 * i, 2 * j) = (s + dlh + dhl + dhh) / 2.0;
      x.at(2 * i, 2 * j + 1) = (s - dlh + dhl - dhh) / 2.0;
      x.at(2 * i + 1, 2 * j) = (s + dlh - dhl - dhh) / 2.0;
      x.at(2 * i + 1, 2 * j + 1) = (s - dlh - dhl + dhh) / 2.0;
    }
  }
  return x;
}

Tensor shrink_subband(const Tensor& band, double sigma_n) {
  const std::size_t n = band.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += band[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = band[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n);

  const double sigma_s = std::sqrt(std::max(var - sigma_n * sigma_n, 0.0));
  double t;
  if (sigma_s > 0.0) {
    t = sigma_n * sigma_n / sigma_s;
  } else {
    t = 0.0;
    for (std::size_t i = 0; i < n; ++i) t = std::max(t, std::fabs(band[i]));
  }

  Tensor out(band.shape());
  for (std::size_t i = 0; i < n; ++i) out[i] = soft_threshold(band[i], t);
  return out;
}

}  // namespace

WaveletPyramid haar_dwt2(const Tensor& x, std::size_t levels) {
  if (x.rank() != 2) {
    throw DimensionError("haar_dwt2: expected [HxW], got " +
                         shape_string(x.shape()));
  }
  if (levels < 1) throw DimensionError("haar_dwt2: levels must be >= 1");
  const std::size_t h = x.dim(0), w = x.dim(1);
  const std::size_t block = std::size_t{1} << levels;
  if (h == 0 || w == 0 || h % block != 0 || w % block != 0) {
    throw DimensionError("haar_dwt2: 2^" + std::to_string(levels) +
                         " must divide both dims of " +
                         shape_string(x.shape()));
  }

  WaveletPyramid pyramid;
  pyramid.details.resize(levels);
  Tensor current = x;
  for (std::size_t level = 0; level < levels; ++level) {
    Tensor ll;
    analyze_level(current, &ll, &pyramid.details[level]);
    current = std::move(ll);
  }
  pyramid.ll = std::move(current);
  return pyramid;
}

Tensor haar_idwt2(const WaveletPyramid& pyramid) {
  if (pyramid.details.empty()) {
    throw DimensionError("haar_idwt2: pyramid has no detail levels");
  }
  Tensor current = pyramid.ll;
  for (std::size_t level = pyramid.details.size(); level-- > 0;) {
    const SubbandTriple& detail = pyramid.details[level];
    if (detail.lh.shape() != current.shape() ||
        detail.hl.shape() != current.shape() ||
        detail.hh.shape() != current.shape()) {
      throw DimensionError("haar_idwt2: level " + std::to_string(level + 1) +
                           " subbands " + shape_string(detail.lh.shape()) +
                           " do not match approximation " +
                           shape_string(current.shape()));
    }
    current = synthesize_level(current, detail);
  }
  return current;
}

double soft_threshold(double v, double t) {
  const double m = std::fabs(v) - t;
  return m > 0.0 ? std::copysign(m, v) : 0.0;
}

double median_abs(const Tensor& t) {
  if (t.size() == 0) throw InputError("median_abs: empty tensor");
  std::vector<double> mags(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) mags[i] = std::fabs(t[i]);
  std::sort(mags.begin(), mags.end());
  const std::size_t n = mags.size();
  if (n % 2 == 1) return mags[n / 2];
  return (mags[n / 2 - 1] + mags[n / 2]) / 2.0;
}

WaveletPyramid bayes_shrink(const WaveletPyramid& pyramid) {
  if (pyramid.details.empty()) {
    throw DimensionError("bayes_shrink: pyramid has no detail levels");
  }
  const double sigma_n = median_abs(pyramid.details[0].hh) / kMadToSigma;

  WaveletPyramid out;
  out.ll = pyramid.ll;
  out.details.reserve(pyramid.details.size());
  for (const SubbandTriple& detail : pyramid.details) {
    SubbandTriple shrunk;
    shrunk.lh = shrink_subband(detail.lh, sigma_n);
    shrunk.hl = shrink_subband(detail.hl, sigma_n);
    shrunk.hh = shrink_subband(detail.hh, sigma_n);
    out.details.push_back(std::move(shrunk));
  }
  return out;
}

}  // namespace gauntlet::defenses
