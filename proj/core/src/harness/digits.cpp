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

#include "gauntlet/harness/digits.hpp"

#include <cmath>

#include "gauntlet/errors.hpp"
#include "gauntlet/rng.hpp"

namespace gauntlet::harness {
namespace {

constexpr double kScale = 3.0;
constexpr double kAmpLo = 0.30;
constexpr double kAmpHi = 0.45;
constexpr double kNoise = 0.10;

// 5x7 font, one row per string, '#' = on.
constexpr const char* kFont[10][7] = {
    {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "},  // 0
    {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "},  // 1
    {" ### ", "#   #", "    #", "   # ", "  #  ", " #   ", "#####"},  // 2
    {"#####", "   # ", "  #  ", "   # ", "    #", "#   #", " ### "},  // 3
    {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "},  // 4
    {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "},  // 5
    {"  ## ", " #   ", "#    ", "#### ", "#   #", "#   #", " ### "},  // 6
    {"#####", "    #", "   # ", "  #  ", "  #  ", "  #  ", "  #  "},  // 7
    {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "},  // 8
    {" ### ", "#   #", "#   #", " ####", "    #", "   # ", " ##  "},  // 9
};

double glyph_bit(const std::array<std::array<int, 5>, 7>& glyph, long row,
                 long col) {
  if (row < 0 || row >= 7 || col < 0 || col >= 5) return 0.0;
  return static_cast<double>(glyph[static_cast<std::size_t>(row)]
                                  [static_cast<std::size_t>(col)]);
}

}  // namespace

std::array<std::array<int, 5>, 7> digit_glyph(int digit) {
  if (digit < 0 || digit > 9) {
    throw InputError("digit_glyph: digit " + std::to_string(digit) +
                     " out of range");
  }
  std::array<std::array<int, 5>, 7> glyph{};
  for (std::size_t r = 0; r < 7; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      glyph[r][c] = kFont[digit][r][c] == '#' ? 1 : 0;
    }
  }
  return glyph;
}

Tensor render_digit(int digit, double amp, double offset_x, double offset_y) {
  const auto glyph = digit_glyph(digit);
  const std::size_t n = kDigitImageSize;
  Tensor image({1, n, n});
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      // Glyph-cell coordinates of this pixel center, relative to cell
      // centers, for bilinear interpolation over the bitmap.
      const double u =
          (static_cast<double>(x) + 0.5 - offset_x) / kScale - 0.5;
      const double v =
          (static_cast<double>(y) + 0.5 - offset_y) / kScale - 0.5;
      const long col = static_cast<long>(std::floor(u));
      const long row = static_cast<long>(std::floor(v));
      const double fu = u - static_cast<double>(col);
      const double fv = v - static_cast<double>(row);
      const double g =
          (1.0 - fv) * ((1.0 - fu) * glyph_bit(glyph, row, col) +
                        fu * glyph_bit(glyph, row, col + 1)) +
          fv * ((1.0 - fu) * glyph_bit(glyph, row + 1, col) +
                fu * glyph_bit(glyph, row + 1, col + 1));
      image.at(0, y, x) = amp * g;
    }
  }
  return image;
}

Dataset make_digit_dataset(std::size_t count, std::uint64_t seed,
                           std::string split) {
  Dataset dataset;
  dataset.split = std::move(split);
  dataset.images.reserve(count);
  dataset.labels.reserve(count);

  const double n = static_cast<double>(kDigitImageSize);
  const double glyph_w = 5.0 * kScale;
  const double glyph_h = 7.0 * kScale;

  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed({seed, i}));
    const int digit = static_cast<int>(i % kDigitClasses);
    const double amp = rng.uniform(kAmpLo, kAmpHi);
    const double ox = rng.uniform(2.0, n - glyph_w - 2.0);
    const double oy = rng.uniform(2.0, n - glyph_h - 2.0);
    Tensor image = render_digit(digit, amp, ox, oy);
    for (std::size_t p = 0; p < image.size(); ++p) {
      image[p] += rng.uniform(0.0, kNoise);
    }
    dataset.images.push_back(std::move(image));
    dataset.labels.push_back(digit);
  }
  return dataset;
}

}  // namespace gauntlet::harness
