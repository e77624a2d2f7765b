// src/tensor.cc

// Copyright 2026  mfc-mdd authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "mdd/tensor.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "mdd/error.h"

namespace mdd {

std::size_t ShapeSize(const Tensor::Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string ShapeString(const Tensor::Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(ShapeSize(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (ShapeSize(shape_) != values_.size()) {
    throw DimensionError("Tensor: shape " + ShapeString(shape_) + " needs " +
                         std::to_string(ShapeSize(shape_)) + " values, got " +
                         std::to_string(values_.size()));
  }
}

Tensor Tensor::Matrix(std::size_t rows, std::size_t cols,
                      std::initializer_list<double> values) {
  return Tensor({rows, cols}, std::vector<double>(values));
}

Tensor Tensor::Row(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({1, n}, std::move(values));
}

double Tensor::item() const {
  if (values_.size() != 1) {
    throw DimensionError("Tensor::item: tensor of shape " + ShapeString(shape_) +
                         " is not a single value");
  }
  return values_[0];
}

void Tensor::Fill(double value) { std::fill(values_.begin(), values_.end(), value); }

bool Tensor::AllFinite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Tensor::CheckFinite(const char* where) const {
  if (!AllFinite())
    throw NumericError(std::string(where) + ": non-finite value in tensor of shape " +
                       ShapeString(shape_));
}

Tensor Tensor::RowAt(std::size_t r) const {
  const std::size_t c = cols();
  Tensor out({1, c});
  std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(r * c), c, out.data());
  return out;
}

}  // namespace mdd
