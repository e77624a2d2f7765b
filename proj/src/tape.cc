// src/tape.cc

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

#include "mdd/tape.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mdd/error.h"

namespace mdd {

namespace {

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t n = 1;
  std::size_t inner = 1;
};

AxisSplit SplitAxis(const Tensor::Shape& shape, int axis, const char* op) {
  if (axis < 0 || static_cast<std::size_t>(axis) >= shape.size()) {
    throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for shape " + ShapeString(shape));
  }
  AxisSplit s;
  for (int i = 0; i < axis; ++i) s.outer *= shape[i];
  s.n = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

Tape& SameTape(const char* op, Var a, Var b) {
  if (!a.valid() || a.tape() != b.tape())
    throw ContractError(std::string(op) + ": operands live on different tapes");
  return *a.tape();
}

void RequireShape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.SameShape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + ShapeString(a.shape()) +
                         " vs " + ShapeString(b.shape()));
  }
}

void RequireRank2(const char* op, const Tensor& t) {
  if (t.rank() != 2)
    throw DimensionError(std::string(op) + ": expected a matrix, got shape " +
                         ShapeString(t.shape()));
}

// out [n x m] = a [n x k] * b [k x m]
void GemmAccumulate(const double* a, const double* b, double* out, std::size_t n,
                    std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    double* o = out + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      const double* br = b + p * m;
      for (std::size_t j = 0; j < m; ++j) o[j] += av * br[j];
    }
  }
}

// ga [n x k] += g [n x m] * b^T ; gb [k x m] += a^T * g
void GemmBackward(const double* a, const double* b, const double* g, double* ga, double* gb,
                  std::size_t n, std::size_t k, std::size_t m) {
  if (ga) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* gr = g + i * m;
      for (std::size_t p = 0; p < k; ++p) {
        const double* br = b + p * m;
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += gr[j] * br[j];
        ga[i * k + p] += acc;
      }
    }
  }
  if (gb) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* gr = g + i * m;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = a[i * k + p];
        if (av == 0.0) continue;
        double* gbr = gb + p * m;
        for (std::size_t j = 0; j < m; ++j) gbr[j] += av * gr[j];
      }
    }
  }
}

}  // namespace

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("Var: value of an unbound variable");
  return tape_->Value(id_);
}

Var Tape::Leaf(Tensor value, bool requires_grad) {
  if (checked_) value.CheckFinite("Tape::Leaf");
  Node n;
  n.owned = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Borrow(const Tensor& value, bool requires_grad) {
  if (checked_) value.CheckFinite("Tape::Borrow");
  Node n;
  n.borrowed = &value;
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Record(const char* op, Tensor value, std::span<const Var> inputs,
                 BackwardFn backward) {
  if (checked_) value.CheckFinite(op);
  Node n;
  n.owned = std::move(value);
  for (const Var& v : inputs) {
    if (v.tape() != this) throw ContractError(std::string(op) + ": input from another tape");
    n.requires_grad = n.requires_grad || nodes_[v.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

const Tensor& Tape::Value(int id) const { return NodeValue(nodes_.at(id)); }

Tensor* Tape::MutableGrad(int id) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return nullptr;
  if (!n.has_grad) {
    n.grad = Tensor(NodeValue(n).shape(), 0.0);
    n.has_grad = true;
  }
  return &n.grad;
}

Tensor Tape::Grad(Var v) const {
  const Node& n = nodes_.at(v.id());
  if (n.has_grad) return n.grad;
  return Tensor(NodeValue(n).shape(), 0.0);
}

void Tape::Backward(Var root) {
  if (root.tape() != this) throw ContractError("Tape::Backward: root from another tape");
  if (Value(root.id()).size() != 1)
    throw ContractError("Tape::Backward: root must be a single value, got shape " +
                        ShapeString(Value(root.id()).shape()));
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  Tensor* seed = MutableGrad(root.id());
  if (!seed) return;
  (*seed)[0] = 1.0;
  for (int i = root.id(); i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.backward) continue;
    // The closure may grow other nodes' gradients but never this one.
    n.backward(*this, n.grad);
  }
}

Var Affine(Var x, Var w, Var b) {
  Tape& tape = SameTape("Affine", x, w);
  SameTape("Affine", x, b);
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  RequireRank2("Affine", xv);
  RequireRank2("Affine", wv);
  const std::size_t n = xv.dim(0), k = xv.dim(1), m = wv.dim(1);
  if (wv.dim(0) != k || bv.size() != m) {
    throw DimensionError("Affine: x " + ShapeString(xv.shape()) + ", w " +
                         ShapeString(wv.shape()) + ", b " + ShapeString(bv.shape()));
  }
  Tensor out({n, m});
  for (std::size_t i = 0; i < n; ++i) std::copy_n(bv.data(), m, out.data() + i * m);
  GemmAccumulate(xv.data(), wv.data(), out.data(), n, k, m);
  const int xi = x.id(), wi = w.id(), bi = b.id();
  return tape.Record("Affine", std::move(out), {x, w, b},
                     [xi, wi, bi, n, k, m](Tape& t, const Tensor& g) {
                       Tensor* gx = t.MutableGrad(xi);
                       Tensor* gw = t.MutableGrad(wi);
                       GemmBackward(t.Value(xi).data(), t.Value(wi).data(), g.data(),
                                    gx ? gx->data() : nullptr, gw ? gw->data() : nullptr, n, k,
                                    m);
                       if (Tensor* gb = t.MutableGrad(bi)) {
                         for (std::size_t i = 0; i < n; ++i)
                           for (std::size_t j = 0; j < m; ++j) (*gb)[j] += g[i * m + j];
                       }
                     });
}

Var MatMul(Var a, Var b) {
  Tape& tape = SameTape("MatMul", a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  RequireRank2("MatMul", av);
  RequireRank2("MatMul", bv);
  const std::size_t n = av.dim(0), k = av.dim(1), m = bv.dim(1);
  if (bv.dim(0) != k)
    throw DimensionError("MatMul: " + ShapeString(av.shape()) + " x " + ShapeString(bv.shape()));
  Tensor out({n, m});
  GemmAccumulate(av.data(), bv.data(), out.data(), n, k, m);
  const int ai = a.id(), bi = b.id();
  return tape.Record("MatMul", std::move(out), {a, b},
                     [ai, bi, n, k, m](Tape& t, const Tensor& g) {
                       Tensor* ga = t.MutableGrad(ai);
                       Tensor* gb = t.MutableGrad(bi);
                       GemmBackward(t.Value(ai).data(), t.Value(bi).data(), g.data(),
                                    ga ? ga->data() : nullptr, gb ? gb->data() : nullptr, n, k,
                                    m);
                     });
}

Var AddBias(Var x, Var b) {
  Tape& tape = SameTape("AddBias", x, b);
  const Tensor& xv = x.value();
  const Tensor& bv = b.value();
  RequireRank2("AddBias", xv);
  const std::size_t n = xv.dim(0), m = xv.dim(1);
  if (bv.size() != m)
    throw DimensionError("AddBias: x " + ShapeString(xv.shape()) + ", b " +
                         ShapeString(bv.shape()));
  Tensor out = xv;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] += bv[j];
  const int xi = x.id(), bi = b.id();
  return tape.Record("AddBias", std::move(out), {x, b}, [xi, bi, n, m](Tape& t, const Tensor& g) {
    if (Tensor* gx = t.MutableGrad(xi))
      for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i];
    if (Tensor* gb = t.MutableGrad(bi))
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) (*gb)[j] += g[i * m + j];
  });
}

Var Tanh(Var x) {
  const Tensor& xv = x.value();
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(xv[i]);
  const int xi = x.id();
  Tape& tape = *x.tape();
  const int oi = static_cast<int>(tape.size());
  return tape.Record("Tanh", std::move(out), {x}, [xi, oi](Tape& t, const Tensor& g) {
    Tensor* gx = t.MutableGrad(xi);
    if (!gx) return;
    const Tensor& y = t.Value(oi);
    for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var Sigmoid(Var x) {
  const Tensor& xv = x.value();
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = xv[i];
    // Branches keep exp() from overflowing for large |v|.
    out[i] = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  const int xi = x.id();
  Tape& tape = *x.tape();
  const int oi = static_cast<int>(tape.size());
  return tape.Record("Sigmoid", std::move(out), {x}, [xi, oi](Tape& t, const Tensor& g) {
    Tensor* gx = t.MutableGrad(xi);
    if (!gx) return;
    const Tensor& y = t.Value(oi);
    for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var Softmax(Var x, int axis) {
  const Tensor& xv = x.value();
  const AxisSplit s = SplitAxis(xv.shape(), axis, "Softmax");
  Tensor out(xv.shape());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.n * s.inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < s.n; ++j) mx = std::max(mx, xv[base + j * s.inner]);
      double z = 0.0;
      for (std::size_t j = 0; j < s.n; ++j) {
        const double e = std::exp(xv[base + j * s.inner] - mx);
        out[base + j * s.inner] = e;
        z += e;
      }
      for (std::size_t j = 0; j < s.n; ++j) out[base + j * s.inner] /= z;
    }
  }
  const int xi = x.id();
  Tape& tape = *x.tape();
  const int oi = static_cast<int>(tape.size());
  return tape.Record("Softmax", std::move(out), {x}, [xi, oi, s](Tape& t, const Tensor& g) {
    Tensor* gx = t.MutableGrad(xi);
    if (!gx) return;
    const Tensor& y = t.Value(oi);
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t in = 0; in < s.inner; ++in) {
        const std::size_t base = o * s.n * s.inner + in;
        double dot = 0.0;
        for (std::size_t j = 0; j < s.n; ++j) {
          const std::size_t idx = base + j * s.inner;
          dot += g[idx] * y[idx];
        }
        for (std::size_t j = 0; j < s.n; ++j) {
          const std::size_t idx = base + j * s.inner;
          (*gx)[idx] += y[idx] * (g[idx] - dot);
        }
      }
    }
  });
}

Var LogSoftmax(Var x, int axis) {
  const Tensor& xv = x.value();
  const AxisSplit s = SplitAxis(xv.shape(), axis, "LogSoftmax");
  Tensor out(xv.shape());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.n * s.inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < s.n; ++j) mx = std::max(mx, xv[base + j * s.inner]);
      double z = 0.0;
      for (std::size_t j = 0; j < s.n; ++j) z += std::exp(xv[base + j * s.inner] - mx);
      const double lse = mx + std::log(z);
      for (std::size_t j = 0; j < s.n; ++j) out[base + j * s.inner] = xv[base + j * s.inner] - lse;
    }
  }
  const int xi = x.id();
  Tape& tape = *x.tape();
  const int oi = static_cast<int>(tape.size());
  return tape.Record("LogSoftmax", std::move(out), {x}, [xi, oi, s](Tape& t, const Tensor& g) {
    Tensor* gx = t.MutableGrad(xi);
    if (!gx) return;
    const Tensor& y = t.Value(oi);
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t in = 0; in < s.inner; ++in) {
        const std::size_t base = o * s.n * s.inner + in;
        double gsum = 0.0;
        for (std::size_t j = 0; j < s.n; ++j) gsum += g[base + j * s.inner];
        for (std::size_t j = 0; j < s.n; ++j) {
          const std::size_t idx = base + j * s.inner;
          (*gx)[idx] += g[idx] - std::exp(y[idx]) * gsum;
        }
      }
    }
  });
}

Var LogSumExp(Var x, int axis) {
  const Tensor& xv = x.value();
  const AxisSplit s = SplitAxis(xv.shape(), axis, "LogSumExp");
  Tensor::Shape out_shape = xv.shape();
  out_shape.erase(out_shape.begin() + axis);
  Tensor out(out_shape);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.n * s.inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < s.n; ++j) mx = std::max(mx, xv[base + j * s.inner]);
      double z = 0.0;
      for (std::size_t j = 0; j < s.n; ++j) z += std::exp(xv[base + j * s.inner] - mx);
      out[o * s.inner + in] = mx + std::log(z);
    }
  }
  const int xi = x.id();
  Tape& tape = *x.tape();
  const int oi = static_cast<int>(tape.size());
  return tape.Record("LogSumExp", std::move(out), {x}, [xi, oi, s](Tape& t, const Tensor& g) {
    Tensor* gx = t.MutableGrad(xi);
    if (!gx) return;
    const Tensor& xv = t.Value(xi);
    const Tensor& y = t.Value(oi);
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t in = 0; in < s.inner; ++in) {
        const std::size_t base = o * s.n * s.inner + in;
        const double lse = y[o * s.inner + in];
        const double go = g[o * s.inner + in];
        for (std::size_t j = 0; j < s.n; ++j) {
          const std::size_t idx = base + j * s.inner;
          (*gx)[idx] += go * std::exp(xv[idx] - lse);
        }
      }
    }
  });
}

Var Concat(std::span<const Var> xs, int axis) {
  if (xs.empty()) throw DimensionError("Concat: no inputs");
  Tape& tape = *xs[0].tape();
  const Tensor::Shape& first = xs[0].value().shape();
  const AxisSplit s0 = SplitAxis(first, axis, "Concat");
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Var& v : xs) {
    SameTape("Concat", xs[0], v);
    const Tensor::Shape& sh = v.value().shape();
    if (sh.size() != first.size())
      throw DimensionError("Concat: rank mismatch " + ShapeString(first) + " vs " + ShapeString(sh));
    for (std::size_t d = 0; d < sh.size(); ++d) {
      if (d != static_cast<std::size_t>(axis) && sh[d] != first[d])
        throw DimensionError("Concat: shape mismatch " + ShapeString(first) + " vs " +
                             ShapeString(sh));
    }
    widths.push_back(sh[axis]);
    total += sh[axis];
  }
  Tensor::Shape out_shape = first;
  out_shape[axis] = total;
  Tensor out(out_shape);
  const std::size_t outer = s0.outer, inner = s0.inner;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const Tensor& v = xs[k].value();
    const std::size_t w = widths[k] * inner;
    for (std::size_t o = 0; o < outer; ++o)
      std::copy_n(v.data() + o * w, w, out.data() + o * total * inner + offset);
    offset += w;
  }
  std::vector<int> ids;
  ids.reserve(xs.size());
  for (const Var& v : xs) ids.push_back(v.id());
  return tape.Record("Concat", std::move(out), xs,
                     [ids = std::move(ids), widths = std::move(widths), outer, inner, total](
                         Tape& t, const Tensor& g) {
                       std::size_t offset = 0;
                       for (std::size_t k = 0; k < ids.size(); ++k) {
                         const std::size_t w = widths[k] * inner;
                         if (Tensor* gx = t.MutableGrad(ids[k])) {
                           for (std::size_t o = 0; o < outer; ++o) {
                             const double* src = g.data() + o * total * inner + offset;
                             double* dst = gx->data() + o * w;
                             for (std::size_t i = 0; i < w; ++i) dst[i] += src[i];
                           }
                         }
                         offset += w;
                       }
                     });
}

Var Slice(Var x, int axis, std::size_t begin, std::size_t end) {
  const Tensor& xv = x.value();
  const AxisSplit s = SplitAxis(xv.shape(), axis, "Slice");
  if (begin > end || end > s.n)
    throw DimensionError("Slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") outside axis of extent " + std::to_string(s.n));
  Tensor::Shape out_shape = xv.shape();
  out_shape[axis] = end - begin;
  Tensor out(out_shape);
  const std::size_t w = (end - begin) * s.inner;
  for (std::size_t o = 0; o < s.outer; ++o)
    std::copy_n(xv.data() + o * s.n * s.inner + begin * s.inner, w, out.data() + o * w);
  const int xi = x.id();
  return x.tape()->Record("Slice", std::move(out), {x},
                          [xi, s, begin, w](Tape& t, const Tensor& g) {
                            Tensor* gx = t.MutableGrad(xi);
                            if (!gx) return;
                            for (std::size_t o = 0; o < s.outer; ++o) {
                              double* dst = gx->data() + o * s.n * s.inner + begin * s.inner;
                              const double* src = g.data() + o * w;
                              for (std::size_t i = 0; i < w; ++i) dst[i] += src[i];
                            }
                          });
}

Var Embed(Var table, int index) {
  const Tensor& tv = table.value();
  RequireRank2("Embed", tv);
  if (index < 0 || static_cast<std::size_t>(index) >= tv.dim(0))
    throw DimensionError("Embed: index " + std::to_string(index) + " outside table of " +
                         std::to_string(tv.dim(0)) + " rows");
  const std::size_t e = tv.dim(1);
  Tensor out = tv.RowAt(static_cast<std::size_t>(index));
  const int ti = table.id();
  return table.tape()->Record("Embed", std::move(out), {table},
                              [ti, index, e](Tape& t, const Tensor& g) {
                                Tensor* gt = t.MutableGrad(ti);
                                if (!gt) return;
                                double* row = gt->data() + static_cast<std::size_t>(index) * e;
                                for (std::size_t j = 0; j < e; ++j) row[j] += g[j];
                              });
}

Var Add(Var a, Var b) {
  Tape& tape = SameTape("Add", a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  RequireShape("Add", av, bv);
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  const int ai = a.id(), bi = b.id();
  return tape.Record("Add", std::move(out), {a, b}, [ai, bi](Tape& t, const Tensor& g) {
    if (Tensor* ga = t.MutableGrad(ai))
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
    if (Tensor* gb = t.MutableGrad(bi))
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i];
  });
}

Var Sub(Var a, Var b) {
  Tape& tape = SameTape("Sub", a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  RequireShape("Sub", av, bv);
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  const int ai = a.id(), bi = b.id();
  return tape.Record("Sub", std::move(out), {a, b}, [ai, bi](Tape& t, const Tensor& g) {
    if (Tensor* ga = t.MutableGrad(ai))
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
    if (Tensor* gb = t.MutableGrad(bi))
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] -= g[i];
  });
}

Var Mul(Var a, Var b) {
  Tape& tape = SameTape("Mul", a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  RequireShape("Mul", av, bv);
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const int ai = a.id(), bi = b.id();
  return tape.Record("Mul", std::move(out), {a, b}, [ai, bi](Tape& t, const Tensor& g) {
    if (Tensor* ga = t.MutableGrad(ai)) {
      const Tensor& bv = t.Value(bi);
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * bv[i];
    }
    if (Tensor* gb = t.MutableGrad(bi)) {
      const Tensor& av = t.Value(ai);
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * av[i];
    }
  });
}

Var Scale(Var x, double factor) {
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
  const int xi = x.id();
  return x.tape()->Record("Scale", std::move(out), {x}, [xi, factor](Tape& t, const Tensor& g) {
    if (Tensor* gx = t.MutableGrad(xi))
      for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i] * factor;
  });
}

Var Sum(Var x) {
  const Tensor& xv = x.value();
  double total = 0.0;
  for (double v : xv.values()) total += v;
  const int xi = x.id();
  return x.tape()->Record("Sum", Tensor::Scalar(total), {x}, [xi](Tape& t, const Tensor& g) {
    if (Tensor* gx = t.MutableGrad(xi))
      for (std::size_t i = 0; i < gx->size(); ++i) (*gx)[i] += g[0];
  });
}

Var Mean(Var x) {
  const Tensor& xv = x.value();
  if (xv.size() == 0) throw DimensionError("Mean: empty tensor");
  double total = 0.0;
  for (double v : xv.values()) total += v;
  const double n = static_cast<double>(xv.size());
  const int xi = x.id();
  return x.tape()->Record("Mean", Tensor::Scalar(total / n), {x},
                          [xi, n](Tape& t, const Tensor& g) {
                            if (Tensor* gx = t.MutableGrad(xi))
                              for (std::size_t i = 0; i < gx->size(); ++i) (*gx)[i] += g[0] / n;
                          });
}

Var Pick(Var x, std::size_t index) {
  const Tensor& xv = x.value();
  if (index >= xv.size())
    throw DimensionError("Pick: index " + std::to_string(index) + " outside tensor of shape " +
                         ShapeString(xv.shape()));
  const int xi = x.id();
  return x.tape()->Record("Pick", Tensor::Scalar(xv[index]), {x},
                          [xi, index](Tape& t, const Tensor& g) {
                            if (Tensor* gx = t.MutableGrad(xi)) (*gx)[index] += g[0];
                          });
}

Var Reshape(Var x, Tensor::Shape shape) {
  const Tensor& xv = x.value();
  if (ShapeSize(shape) != xv.size())
    throw DimensionError("Reshape: " + ShapeString(xv.shape()) + " to " + ShapeString(shape));
  Tensor out(std::move(shape), xv.storage());
  const int xi = x.id();
  return x.tape()->Record("Reshape", std::move(out), {x}, [xi](Tape& t, const Tensor& g) {
    if (Tensor* gx = t.MutableGrad(xi))
      for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i];
  });
}

namespace {

double Evaluate(const ScalarFunction& f, std::span<const Tensor> inputs) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(inputs.size());
  for (const Tensor& t : inputs) leaves.push_back(tape.Borrow(t, false));
  return f(tape, leaves).value().item();
}

}  // namespace

GradCheckReport GradCheckDetailed(const ScalarFunction& f, std::span<const Tensor> inputs,
                                  double step, double floor) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(inputs.size());
  for (const Tensor& t : inputs) leaves.push_back(tape.Borrow(t, true));
  Var out = f(tape, leaves);
  if (out.value().size() != 1)
    throw ContractError("GradCheck: function output has shape " +
                        ShapeString(out.value().shape()) + ", expected a single value");
  tape.Backward(out);

  std::vector<Tensor> work(inputs.begin(), inputs.end());
  GradCheckReport report;
  for (std::size_t k = 0; k < work.size(); ++k) {
    const Tensor analytic = tape.Grad(leaves[k]);
    for (std::size_t i = 0; i < work[k].size(); ++i) {
      const double saved = work[k][i];
      work[k][i] = saved + step;
      const double up = Evaluate(f, work);
      work[k][i] = saved - step;
      const double down = Evaluate(f, work);
      work[k][i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[i];
      const double denom = std::max({std::fabs(a), std::fabs(numeric), floor});
      const double err = std::fabs(a - numeric) / denom;
      if (err > report.max_relative_error || std::isnan(err)) {
        report.max_relative_error = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
        report.worst_input = k;
        report.worst_index = i;
        report.analytic = a;
        report.numeric = numeric;
      }
    }
  }
  return report;
}

double GradCheck(const ScalarFunction& f, std::span<const Tensor> inputs, double step) {
  return GradCheckDetailed(f, inputs, step).max_relative_error;
}

}  // namespace mdd
