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

#include "gauntlet/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gauntlet/errors.hpp"

namespace gauntlet {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
}

}  // namespace

const Tape::Node& Tape::node(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
    throw ContractError("tape: variable does not belong to this tape");
  }
  return nodes_[static_cast<std::size_t>(id)];
}

Var Tape::record(Node node, const char* op_name) {
  node.value.require_finite(op_name);
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Tensor value) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  return record(std::move(n), "leaf");
}

Var Tape::add(Var a, Var b) {
  const Tensor& x = value(a);
  const Tensor& y = value(b);
  require_same_shape(x, y, "add");
  Node n;
  n.op = Op::kAdd;
  n.a = a.id;
  n.b = b.id;
  n.value = Tensor(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) n.value[i] = x[i] + y[i];
  return record(std::move(n), "add");
}

Var Tape::sub(Var a, Var b) {
  const Tensor& x = value(a);
  const Tensor& y = value(b);
  require_same_shape(x, y, "sub");
  Node n;
  n.op = Op::kSub;
  n.a = a.id;
  n.b = b.id;
  n.value = Tensor(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) n.value[i] = x[i] - y[i];
  return record(std::move(n), "sub");
}

Var Tape::mul(Var a, Var b) {
  const Tensor& x = value(a);
  const Tensor& y = value(b);
  require_same_shape(x, y, "mul");
  Node n;
  n.op = Op::kMul;
  n.a = a.id;
  n.b = b.id;
  n.value = Tensor(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) n.value[i] = x[i] * y[i];
  return record(std::move(n), "mul");
}

Var Tape::scale(Var a, double factor) {
  const Tensor& x = value(a);
  Node n;
  n.op = Op::kScale;
  n.a = a.id;
  n.daux = factor;
  n.value = Tensor(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) n.value[i] = x[i] * factor;
  return record(std::move(n), "scale");
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& x = value(a);
  const Tensor& y = value(b);
  if (x.rank() != 2 || y.rank() != 2 || x.dim(1) != y.dim(0)) {
    throw DimensionError("matmul: incompatible shapes " +
                         shape_string(x.shape()) + " vs " +
                         shape_string(y.shape()));
  }
  const std::size_t m = x.dim(0), k = x.dim(1), p = y.dim(1);
  Node n;
  n.op = Op::kMatmul;
  n.a = a.id;
  n.b = b.id;
  n.value = Tensor({m, p});
  const double* xd = x.data();
  const double* yd = y.data();
  double* out = n.value.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      const double xv = xd[i * k + l];
      const double* yrow = yd + l * p;
      double* orow = out + i * p;
      for (std::size_t j = 0; j < p; ++j) orow[j] += xv * yrow[j];
    }
  }
  return record(std::move(n), "matmul");
}

Var Tape::conv2d(Var input, Var kernels, int padding) {
  const Tensor& x = value(input);
  const Tensor& k = value(kernels);
  if (x.rank() != 3 || k.rank() != 4) {
    throw DimensionError("conv2d: expected input [CxHxW] and kernels "
                         "[OxCxKhxKw], got " +
                         shape_string(x.shape()) + " and " +
                         shape_string(k.shape()));
  }
  if (padding < 0) throw DimensionError("conv2d: negative padding");
  const std::size_t c_in = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::size_t c_out = k.dim(0), kh = k.dim(2), kw = k.dim(3);
  if (k.dim(1) != c_in) {
    throw DimensionError("conv2d: input channels " + shape_string(x.shape()) +
                         " do not match kernels " + shape_string(k.shape()));
  }
  const long oh = static_cast<long>(h) + 2 * padding - static_cast<long>(kh) + 1;
  const long ow = static_cast<long>(w) + 2 * padding - static_cast<long>(kw) + 1;
  if (oh < 1 || ow < 1) {
    throw DimensionError("conv2d: non-positive output dims for input " +
                         shape_string(x.shape()) + " and kernels " +
                         shape_string(k.shape()) + " at padding " +
                         std::to_string(padding));
  }
  const std::size_t out_h = static_cast<std::size_t>(oh);
  const std::size_t out_w = static_cast<std::size_t>(ow);

  Node n;
  n.op = Op::kConv2d;
  n.a = input.id;
  n.b = kernels.id;
  n.iaux = padding;
  n.value = Tensor({c_out, out_h, out_w});
  const double* xd = x.data();
  const double* kd = k.data();
  double* out = n.value.data();
  for (std::size_t co = 0; co < c_out; ++co) {
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      for (std::size_t ky = 0; ky < kh; ++ky) {
        for (std::size_t kx = 0; kx < kw; ++kx) {
          const double kv = kd[((co * c_in + ci) * kh + ky) * kw + kx];
          // Valid output columns keep ix = ox - padding + kx inside [0, w).
          const long ox_lo = std::max<long>(0, padding - static_cast<long>(kx));
          const long ox_hi = std::min<long>(
              static_cast<long>(out_w),
              static_cast<long>(w) + padding - static_cast<long>(kx));
          const long shift = static_cast<long>(kx) - padding;
          for (std::size_t oy = 0; oy < out_h; ++oy) {
            const long iy =
                static_cast<long>(oy) - padding + static_cast<long>(ky);
            if (iy < 0 || iy >= static_cast<long>(h)) continue;
            const double* xrow =
                xd + (ci * h + static_cast<std::size_t>(iy)) * w;
            double* orow = out + (co * out_h + oy) * out_w;
            for (long ox = ox_lo; ox < ox_hi; ++ox) {
              orow[ox] += kv * xrow[ox + shift];
            }
          }
        }
      }
    }
  }
  return record(std::move(n), "conv2d");
}

Var Tape::bias_channel(Var input, Var bias) {
  const Tensor& x = value(input);
  const Tensor& b = value(bias);
  if (x.rank() != 3 || b.rank() != 1 || b.dim(0) != x.dim(0)) {
    throw DimensionError("bias_channel: input " + shape_string(x.shape()) +
                         " vs bias " + shape_string(b.shape()));
  }
  const std::size_t c = x.dim(0), plane = x.dim(1) * x.dim(2);
  Node n;
  n.op = Op::kBiasChannel;
  n.a = input.id;
  n.b = bias.id;
  n.value = Tensor(x.shape());
  for (std::size_t ci = 0; ci < c; ++ci) {
    const double bv = b[ci];
    for (std::size_t i = 0; i < plane; ++i) {
      n.value[ci * plane + i] = x[ci * plane + i] + bv;
    }
  }
  return record(std::move(n), "bias_channel");
}

Var Tape::relu(Var a) {
  const Tensor& x = value(a);
  Node n;
  n.op = Op::kRelu;
  n.a = a.id;
  n.value = Tensor(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    n.value[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
  return record(std::move(n), "relu");
}

Var Tape::abs(Var a) {
  const Tensor& x = value(a);
  Node n;
  n.op = Op::kAbs;
  n.a = a.id;
  n.value = Tensor(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) n.value[i] = std::fabs(x[i]);
  return record(std::move(n), "abs");
}

Var Tape::sum(Var a) {
  const Tensor& x = value(a);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += x[i];
  Node n;
  n.op = Op::kSum;
  n.a = a.id;
  n.value = Tensor::scalar(total);
  return record(std::move(n), "sum");
}

Var Tape::reshape(Var a, Shape shape) {
  const Tensor& x = value(a);
  if (shape_size(shape) != x.size()) {
    throw DimensionError("reshape: cannot view " + shape_string(x.shape()) +
                         " as " + shape_string(shape));
  }
  Node n;
  n.op = Op::kReshape;
  n.a = a.id;
  n.value = Tensor(std::move(shape), x.values());
  return record(std::move(n), "reshape");
}

Var Tape::clamp01(Var a) {
  const Tensor& x = value(a);
  Node n;
  n.op = Op::kClamp01;
  n.a = a.id;
  n.value = Tensor(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    n.value[i] = std::min(std::max(x[i], 0.0), 1.0);
  }
  return record(std::move(n), "clamp01");
}

Var Tape::softmax_cross_entropy(Var logits, int label) {
  const Tensor& z = value(logits);
  if (z.rank() != 1) {
    throw DimensionError("softmax_cross_entropy: logits must be rank 1, got " +
                         shape_string(z.shape()));
  }
  const std::size_t c = z.dim(0);
  if (label < 0 || static_cast<std::size_t>(label) >= c) {
    throw IndexError("softmax_cross_entropy: label " + std::to_string(label) +
                     " out of range for " + std::to_string(c) + " classes");
  }
  double zmax = z[0];
  for (std::size_t i = 1; i < c; ++i) zmax = std::max(zmax, z[i]);
  double denom = 0.0;
  Tensor probs({c});
  for (std::size_t i = 0; i < c; ++i) {
    probs[i] = std::exp(z[i] - zmax);
    denom += probs[i];
  }
  for (std::size_t i = 0; i < c; ++i) probs[i] /= denom;
  const double loss =
      (zmax + std::log(denom)) - z[static_cast<std::size_t>(label)];

  Node n;
  n.op = Op::kSoftmaxCrossEntropy;
  n.a = logits.id;
  n.iaux = label;
  n.value = Tensor::scalar(loss);
  n.saved = std::move(probs);
  return record(std::move(n), "softmax_cross_entropy");
}

namespace {

// d_input and d_kernels for conv2d; mirrors the forward loop structure.
void conv2d_backward(const Tensor& x, const Tensor& k, int padding,
                     const Tensor& g, Tensor* dx, Tensor* dk) {
  const std::size_t c_in = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::size_t c_out = k.dim(0), kh = k.dim(2), kw = k.dim(3);
  const std::size_t out_h = g.dim(1), out_w = g.dim(2);
  const double* xd = x.data();
  const double* kd = k.data();
  const double* gd = g.data();
  double* dxd = dx->data();
  double* dkd = dk->data();
  for (std::size_t co = 0; co < c_out; ++co) {
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      for (std::size_t ky = 0; ky < kh; ++ky) {
        for (std::size_t kx = 0; kx < kw; ++kx) {
          const std::size_t kidx = ((co * c_in + ci) * kh + ky) * kw + kx;
          const double kv = kd[kidx];
          double ksum = 0.0;
          const long ox_lo = std::max<long>(0, padding - static_cast<long>(kx));
          const long ox_hi = std::min<long>(
              static_cast<long>(out_w),
              static_cast<long>(w) + padding - static_cast<long>(kx));
          const long shift = static_cast<long>(kx) - padding;
          for (std::size_t oy = 0; oy < out_h; ++oy) {
            const long iy =
                static_cast<long>(oy) - padding + static_cast<long>(ky);
            if (iy < 0 || iy >= static_cast<long>(h)) continue;
            const std::size_t row_base =
                (ci * h + static_cast<std::size_t>(iy)) * w;
            const double* grow = gd + (co * out_h + oy) * out_w;
            const double* xrow = xd + row_base;
            double* dxrow = dxd + row_base;
            for (long ox = ox_lo; ox < ox_hi; ++ox) {
              dxrow[ox + shift] += kv * grow[ox];
              ksum += xrow[ox + shift] * grow[ox];
            }
          }
          dkd[kidx] += ksum;
        }
      }
    }
  }
}

}  // namespace

Gradients Tape::backward(Var loss) const {
  const Node& top = node(loss.id);
  if (top.value.size() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " +
                        shape_string(top.value.shape()));
  }

  std::vector<Tensor> grads(nodes_.size());
  auto grad_of = [&](int id) -> Tensor& {
    Tensor& g = grads[static_cast<std::size_t>(id)];
    if (g.empty() && nodes_[static_cast<std::size_t>(id)].value.size() != 0) {
      g = Tensor(nodes_[static_cast<std::size_t>(id)].value.shape());
    }
    return g;
  };

  grad_of(loss.id)[0] = 1.0;

  for (int id = loss.id; id >= 0; --id) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    const Tensor& g = grads[static_cast<std::size_t>(id)];
    if (g.empty()) continue;  // loss does not depend on this node
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kAdd: {
        Tensor& da = grad_of(n.a);
        Tensor& db = grad_of(n.b);
        for (std::size_t i = 0; i < g.size(); ++i) {
          da[i] += g[i];
          db[i] += g[i];
        }
        break;
      }
      case Op::kSub: {
        Tensor& da = grad_of(n.a);
        Tensor& db = grad_of(n.b);
        for (std::size_t i = 0; i < g.size(); ++i) {
          da[i] += g[i];
          db[i] -= g[i];
        }
        break;
      }
      case Op::kMul: {
        const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
        const Tensor& y = nodes_[static_cast<std::size_t>(n.b)].value;
        Tensor& da = grad_of(n.a);
        Tensor& db = grad_of(n.b);
        for (std::size_t i = 0; i < g.size(); ++i) {
          da[i] += g[i] * y[i];
          db[i] += g[i] * x[i];
        }
        break;
      }
      case Op::kScale: {
        Tensor& da = grad_of(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * n.daux;
        break;
      }
      case Op::kMatmul: {
        const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
        const Tensor& y = nodes_[static_cast<std::size_t>(n.b)].value;
        const std::size_t m = x.dim(0), k = x.dim(1), p = y.dim(1);
        Tensor& da = grad_of(n.a);  // g . y^T
        Tensor& db = grad_of(n.b);  // x^T . g
        const double* gd = g.data();
        const double* xd = x.data();
        const double* yd = y.data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < p; ++j) {
            const double gv = gd[i * p + j];
            for (std::size_t l = 0; l < k; ++l) {
              da[i * k + l] += gv * yd[l * p + j];
            }
          }
          for (std::size_t l = 0; l < k; ++l) {
            const double xv = xd[i * k + l];
            double* dbrow = db.data() + l * p;
            const double* grow = gd + i * p;
            for (std::size_t j = 0; j < p; ++j) dbrow[j] += xv * grow[j];
          }
        }
        break;
      }
      case Op::kConv2d: {
        const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
        const Tensor& k = nodes_[static_cast<std::size_t>(n.b)].value;
        conv2d_backward(x, k, n.iaux, g, &grad_of(n.a), &grad_of(n.b));
        break;
      }
      case Op::kBiasChannel: {
        Tensor& da = grad_of(n.a);
        Tensor& db = grad_of(n.b);
        const std::size_t c = n.value.dim(0);
        const std::size_t plane = n.value.dim(1) * n.value.dim(2);
        for (std::size_t ci = 0; ci < c; ++ci) {
          double bsum = 0.0;
          for (std::size_t i = 0; i < plane; ++i) {
            da[ci * plane + i] += g[ci * plane + i];
            bsum += g[ci * plane + i];
          }
          db[ci] += bsum;
        }
        break;
      }
      case Op::kRelu: {
        const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
        Tensor& da = grad_of(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (x[i] > 0.0) da[i] += g[i];
        }
        break;
      }
      case Op::kAbs: {
        const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
        Tensor& da = grad_of(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (x[i] > 0.0) {
            da[i] += g[i];
          } else if (x[i] < 0.0) {
            da[i] -= g[i];
          }
        }
        break;
      }
      case Op::kSum: {
        Tensor& da = grad_of(n.a);
        const double gv = g[0];
        for (std::size_t i = 0; i < da.size(); ++i) da[i] += gv;
        break;
      }
      case Op::kReshape: {
        Tensor& da = grad_of(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
        break;
      }
      case Op::kClamp01: {
        const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
        Tensor& da = grad_of(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (x[i] >= 0.0 && x[i] <= 1.0) da[i] += g[i];
        }
        break;
      }
      case Op::kSoftmaxCrossEntropy: {
        Tensor& da = grad_of(n.a);
        const double gv = g[0];
        const std::size_t label = static_cast<std::size_t>(n.iaux);
        for (std::size_t i = 0; i < da.size(); ++i) {
          da[i] += gv * (n.saved[i] - (i == label ? 1.0 : 0.0));
        }
        break;
      }
    }
  }

  for (const Tensor& g : grads) {
    if (!g.empty()) g.require_finite("backward");
  }
  return Gradients(this, std::move(grads));
}

double Tape::kink_margin() const {
  double margin = std::numeric_limits<double>::infinity();
  for (const Node& n : nodes_) {
    if (n.op != Op::kRelu && n.op != Op::kClamp01) continue;
    const Tensor& x = nodes_[static_cast<std::size_t>(n.a)].value;
    for (std::size_t i = 0; i < x.size(); ++i) {
      margin = std::min(margin, std::fabs(x[i]));
      if (n.op == Op::kClamp01) {
        margin = std::min(margin, std::fabs(x[i] - 1.0));
      }
    }
  }
  return margin;
}

const Tensor& Gradients::grad(Var v) const {
  const Tape::Node& n = tape_->node(v.id);
  Tensor& g = grads_[static_cast<std::size_t>(v.id)];
  if (g.empty() && n.value.size() != 0) {
    g = Tensor(n.value.shape());  // loss independent of v: zero gradient
  }
  return g;
}

}  // namespace gauntlet
