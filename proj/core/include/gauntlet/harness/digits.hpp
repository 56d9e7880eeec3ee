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

#include <array>
#include <cstdint>
#include <string>

#include "gauntlet/harness/dataset.hpp"

namespace gauntlet::harness {

inline constexpr std::size_t kDigitImageSize = 32;
inline constexpr std::size_t kDigitClasses = 10;

/// 5x7 bitmap of one digit glyph, row-major, values 0/1.
std::array<std::array<int, 5>, 7> digit_glyph(int digit);

/// Procedural digit image: glyph `digit` scaled 3x and placed at a
/// continuous (sub-pixel) offset with bilinear sampling, at amplitude
/// `amp`, on a black background. No noise; values in [0, amp].
Tensor render_digit(int digit, double amp, double offset_x, double offset_y);

/// Deterministic synthetic 32x32 grayscale digit dataset. Image i has label
/// i mod 10 and derives its own rng from (seed, i), drawing in order:
/// amplitude in [0.30, 0.45), offsets, then one uniform noise value in
/// [0, 0.10) per pixel. Amplitude plus noise never exceeds 1, so no pixel
/// clips. Images are stable under count changes: image i is the same in any
/// dataset with more than i examples and the same seed.
Dataset make_digit_dataset(std::size_t count, std::uint64_t seed,
                           std::string split = {});

}  // namespace gauntlet::harness
