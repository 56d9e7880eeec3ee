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

// Independent reference implementations used to check the library. Nothing
// here shares code with core/; each oracle is the most literal possible
// rendering of the defining formula, so a disagreement points at the
// library, not the test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <set>
#include <utility>
#include <vector>

#include "gauntlet/tensor.hpp"

namespace oracles {

// Plain triple loop, no blocking, accumulation in declaration order.
inline gauntlet::Tensor matmul(const gauntlet::Tensor& a,
                               const gauntlet::Tensor& b) {
  const std::size_t m = a.shape()[0];
  const std::size_t k = a.shape()[1];
  const std::size_t n = b.shape()[1];
  gauntlet::Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        acc += a[i * k + p] * b[p * n + j];
      }
      out[i * n + j] = acc;
    }
  }
  return out;
}

// Direct sliding-window cross-correlation with zero padding.
inline gauntlet::Tensor conv2d(const gauntlet::Tensor& input,
                               const gauntlet::Tensor& kernels, int padding) {
  const std::size_t cin = input.shape()[0];
  const long h = static_cast<long>(input.shape()[1]);
  const long w = static_cast<long>(input.shape()[2]);
  const std::size_t cout = kernels.shape()[0];
  const long kh = static_cast<long>(kernels.shape()[2]);
  const long kw = static_cast<long>(kernels.shape()[3]);
  const long oh = h + 2 * padding - kh + 1;
  const long ow = w + 2 * padding - kw + 1;
  gauntlet::Tensor out({cout, static_cast<std::size_t>(oh),
                        static_cast<std::size_t>(ow)});
  for (std::size_t o = 0; o < cout; ++o) {
    for (long y = 0; y < oh; ++y) {
      for (long x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cin; ++c) {
          for (long ky = 0; ky < kh; ++ky) {
            for (long kx = 0; kx < kw; ++kx) {
              const long iy = y - padding + ky;
              const long ix = x - padding + kx;
              if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
              acc += input.at(c, static_cast<std::size_t>(iy),
                              static_cast<std::size_t>(ix)) *
                     kernels.at(o, c, static_cast<std::size_t>(ky),
                                static_cast<std::size_t>(kx));
            }
          }
        }
        out.at(o, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) =
            acc;
      }
    }
  }
  return out;
}

// -log(e^{z_y} / sum e^{z_i}) evaluated in extended precision, without the
// log-sum-exp rearrangement the library uses.
inline double cross_entropy(const std::vector<double>& logits, int label) {
  long double denom = 0.0L;
  for (double z : logits) denom += std::exp(static_cast<long double>(z));
  const long double p =
      std::exp(static_cast<long double>(logits[static_cast<std::size_t>(
          label)])) /
      denom;
  return static_cast<double>(-std::log(p));
}

// Central finite difference of a scalar function at x, one coordinate at a
// time. h = 1e-5 per the gradient-check contract.
inline gauntlet::Tensor central_diff(
    const std::function<double(const gauntlet::Tensor&)>& f,
    const gauntlet::Tensor& x, double h = 1e-5) {
  gauntlet::Tensor grad(x.shape());
  gauntlet::Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = f(probe);
    probe[i] = saved - h;
    const double down = f(probe);
    probe[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// Largest relative disagreement between two gradients, with an absolute
// floor so near-zero entries do not blow up the ratio.
inline double max_relative_error(const gauntlet::Tensor& a,
                                 const gauntlet::Tensor& b,
                                 double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale =
        std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

// One level of the orthonormal 2-D Haar transform in literal matrix form:
// for each 2x2 block X, coeffs = H.X.H^T with H = (1/sqrt 2)[[1,1],[1,-1]].
// Returns {ll, lh, hl, hh}, each (H/2)x(W/2).
struct HaarLevel {
  gauntlet::Tensor ll, lh, hl, hh;
};

inline HaarLevel haar_level(const gauntlet::Tensor& x) {
  const std::size_t h = x.shape()[0];
  const std::size_t w = x.shape()[1];
  const double s = 1.0 / std::sqrt(2.0);
  HaarLevel out{gauntlet::Tensor({h / 2, w / 2}),
                gauntlet::Tensor({h / 2, w / 2}),
                gauntlet::Tensor({h / 2, w / 2}),
                gauntlet::Tensor({h / 2, w / 2})};
  for (std::size_t i = 0; i < h / 2; ++i) {
    for (std::size_t j = 0; j < w / 2; ++j) {
      const double a = x.at(2 * i, 2 * j);
      const double b = x.at(2 * i, 2 * j + 1);
      const double c = x.at(2 * i + 1, 2 * j);
      const double d = x.at(2 * i + 1, 2 * j + 1);
      // Rows of H.X: [s(a+b), s(c+d)] stacked; then columns against H^T.
      const double r0c0 = s * a + s * b, r0c1 = s * a - s * b;
      const double r1c0 = s * c + s * d, r1c1 = s * c - s * d;
      out.ll.at(i, j) = s * r0c0 + s * r1c0;
      out.hl.at(i, j) = s * r0c0 - s * r1c0;
      out.lh.at(i, j) = s * r0c1 + s * r1c1;
      out.hh.at(i, j) = s * r0c1 - s * r1c1;
    }
  }
  return out;
}

inline double median_abs(std::vector<double> v) {
  for (double& x : v) x = std::abs(x);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double population_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

inline double soft_threshold(double v, double t) {
  const double mag = std::abs(v) - t;
  return (v < 0 ? -1.0 : 1.0) * std::max(mag, 0.0);
}

// Step-by-step BayesShrink on one level-1 pyramid, following the published
// recipe rather than the library structure: sigma_n from the finest HH
// median, per-subband sigma_s, threshold sigma_n^2/sigma_s (max|v| when
// sigma_s vanishes), soft-threshold every detail coefficient.
inline void bayes_shrink_subband(std::vector<double>* band, double sigma_n) {
  const double var = population_variance(*band);
  const double sigma_s = std::sqrt(std::max(var - sigma_n * sigma_n, 0.0));
  double t;
  if (sigma_s == 0.0) {
    t = 0.0;
    for (double v : *band) t = std::max(t, std::abs(v));
  } else {
    t = sigma_n * sigma_n / sigma_s;
  }
  for (double& v : *band) v = soft_threshold(v, t);
}

// Every output image reachable by one deflection on `x` with window radius
// r: for each target pixel and each distinct in-window source, the image
// with the source value copied onto the target. Includes the no-change
// images produced when source and target values coincide.
inline std::set<std::vector<double>> one_deflection_outputs(
    const gauntlet::Tensor& x, long r) {
  const long h = static_cast<long>(x.shape()[1]);
  const long w = static_cast<long>(x.shape()[2]);
  std::set<std::vector<double>> outputs;
  for (long ty = 0; ty < h; ++ty) {
    for (long tx = 0; tx < w; ++tx) {
      for (long dy = -r; dy <= r; ++dy) {
        for (long dx = -r; dx <= r; ++dx) {
          if (dy == 0 && dx == 0) continue;
          const long sy = ty + dy, sx = tx + dx;
          if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
          std::vector<double> img = x.values();
          for (std::size_t c = 0; c < x.shape()[0]; ++c) {
            img[(c * h + ty) * w + tx] =
                x.at(c, static_cast<std::size_t>(sy),
                     static_cast<std::size_t>(sx));
          }
          outputs.insert(std::move(img));
        }
      }
    }
  }
  return outputs;
}

}  // namespace oracles
