// mdd/tape.h

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

#ifndef MDD_TAPE_H_
#define MDD_TAPE_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "mdd/tensor.h"

namespace mdd {

class Tape;

/// Handle to one recorded value on a Tape.
class Var {
 public:
  Var() = default;

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }
  const Tensor& value() const;
  /// Shortcut for single-value tensors.
  double item() const { return value().item(); }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

/**
   Records a computation as a list of nodes in creation order, so every
   node's inputs precede it. Backward() walks the nodes once in reverse order
   and accumulates gradients into every node that requires them.

   A Tape is single-threaded. Separate Tapes may borrow the same immutable
   parameter tensors concurrently.
*/
class Tape {
 public:
  /// Called during Backward() with the gradient of the node's output.
  using BackwardFn = std::function<void(Tape& tape, const Tensor& out_grad)>;

  /// In checked mode every recorded value must be finite.
  explicit Tape(bool checked = false) : checked_(checked) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Leaf(Tensor value, bool requires_grad = true);
  /// Records a reference to `value`, which must outlive the tape.
  Var Borrow(const Tensor& value, bool requires_grad = false);
  Var Constant(Tensor value) { return Leaf(std::move(value), false); }

  /// Appends an operation node. `backward` is dropped when no input needs a
  /// gradient.
  Var Record(const char* op, Tensor value, std::span<const Var> inputs,
             BackwardFn backward);
  Var Record(const char* op, Tensor value, std::initializer_list<Var> inputs,
             BackwardFn backward) {
    return Record(op, std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                  std::move(backward));
  }

  const Tensor& Value(int id) const;
  bool RequiresGrad(int id) const { return nodes_[id].requires_grad; }
  /// Gradient accumulator of node `id`, zero-initialised on first use, or
  /// nullptr when the node does not require a gradient.
  Tensor* MutableGrad(int id);
  /// Gradient of `v` after Backward(); zeros when nothing flowed into it.
  Tensor Grad(Var v) const;

  /// Seeds d(root)/d(root) = 1 and back-propagates. root must hold one value.
  void Backward(Var root);

  std::size_t size() const { return nodes_.size(); }
  bool checked() const { return checked_; }

 private:
  struct Node {
    Tensor owned;
    const Tensor* borrowed = nullptr;
    Tensor grad;
    bool requires_grad = false;
    bool has_grad = false;
    BackwardFn backward;
  };

  const Tensor& NodeValue(const Node& n) const { return n.borrowed ? *n.borrowed : n.owned; }

  std::vector<Node> nodes_;
  bool checked_ = false;
};

// Primitives. Shapes must match exactly except where noted; mismatches throw
// DimensionError naming the primitive. Axis arguments index the tensor shape.

/// x [n x k] * w [k x m] + b (b holds m values, added to every row).
Var Affine(Var x, Var w, Var b);
Var MatMul(Var a, Var b);
/// x [n x m] + b broadcast over rows.
Var AddBias(Var x, Var b);
Var Tanh(Var x);
Var Sigmoid(Var x);
Var Softmax(Var x, int axis);
Var LogSoftmax(Var x, int axis);
/// Reduces `axis` away; the result has rank one lower.
Var LogSumExp(Var x, int axis);
Var Concat(std::span<const Var> xs, int axis);
inline Var Concat(std::initializer_list<Var> xs, int axis) {
  return Concat(std::span<const Var>(xs.begin(), xs.size()), axis);
}
Var Slice(Var x, int axis, std::size_t begin, std::size_t end);
/// Row `index` of table [V x E], as a 1 x E tensor.
Var Embed(Var table, int index);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var x, double factor);
Var Sum(Var x);
Var Mean(Var x);
/// Element at flat index `index`, as a scalar.
Var Pick(Var x, std::size_t index);
Var Reshape(Var x, Tensor::Shape shape);

/// Scalar-valued function of its leaf inputs, used by GradCheck.
using ScalarFunction = std::function<Var(Tape& tape, std::span<const Var> inputs)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

/**
   Compares reverse-mode gradients of f against central finite differences.
   The error of one coordinate is |analytic - numeric| / max(|analytic|,
   |numeric|, 1e-8); the report carries the maximum over all coordinates of
   all inputs. Throws ContractError when f does not return a single value.
   `floor` replaces the 1e-8 in the denominator; raising it turns the check
   into an absolute one for gradients below the floor.
*/
GradCheckReport GradCheckDetailed(const ScalarFunction& f, std::span<const Tensor> inputs,
                                  double step = 1e-5, double floor = 1e-8);
double GradCheck(const ScalarFunction& f, std::span<const Tensor> inputs, double step = 1e-5);

}  // namespace mdd

#endif  // MDD_TAPE_H_
