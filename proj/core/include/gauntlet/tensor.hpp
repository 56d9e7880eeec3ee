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

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace gauntlet {

using Shape = std::vector<std::size_t>;

/// Renders a shape as "[2x3x4]" for error messages.
std::string shape_string(const Shape& shape);

std::size_t shape_size(const Shape& shape);

/// Dense n-dimensional array of 64-bit floats, row-major.
///
/// A Tensor is a plain value: copying copies the data, and a constructed
/// tensor is never mutated by the library except through its own non-const
/// methods. Public operations either produce all-finite values or raise.
class Tensor {
 public:
  Tensor() = default;

  /// Zero-filled tensor of the given shape.
  explicit Tensor(Shape shape);

  /// Tensor with explicit contents; data.size() must equal product(shape).
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor full(Shape shape, double value);
  static Tensor scalar(double value) { return Tensor({1}, {value}); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(std::size_t i);
  double at(std::size_t i) const;
  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;
  double& at(std::size_t c, std::size_t h, std::size_t w);
  double at(std::size_t c, std::size_t h, std::size_t w) const;
  double& at(std::size_t o, std::size_t c, std::size_t h, std::size_t w);
  double at(std::size_t o, std::size_t c, std::size_t h, std::size_t w) const;

  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;

  /// Raises NumericError if any element is NaN or infinite.
  void require_finite(const char* context) const;

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Elementwise value helpers (not recorded on any tape).

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor clamp(const Tensor& a, double lo, double hi);

/// max_i |a_i - b_i|; shapes must match.
double linf_distance(const Tensor& a, const Tensor& b);

/// Index of the largest element; lowest index wins ties.
std::size_t argmax(const Tensor& a);

}  // namespace gauntlet
