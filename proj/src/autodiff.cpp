#include "cfgx/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "cfgx/errors.hpp"

namespace cfgx {

namespace {

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b))
    throw ValidationError(std::string(op) + " shape mismatch: " + a.shape_str() +
                          " vs " + b.shape_str());
}

Tensor softmax_rows(const Tensor& a) {
  Tensor out(a.rows, a.cols);
  for (std::size_t r = 0; r < a.rows; ++r) {
    double mx = -1e300;
    for (std::size_t c = 0; c < a.cols; ++c) mx = std::max(mx, a(r, c));
    double sum = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) {
      out(r, c) = std::exp(a(r, c) - mx);
      sum += out(r, c);
    }
    for (std::size_t c = 0; c < a.cols; ++c) out(r, c) /= sum;
  }
  return out;
}

}  // namespace

Tape::Id Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::input(Tensor v) {
  Node n;
  n.op = Op::leaf;
  n.requires_grad = true;
  n.value = std::move(v);
  return push(std::move(n));
}

Tape::Id Tape::constant(Tensor v) {
  Node n;
  n.op = Op::leaf;
  n.requires_grad = false;
  n.value = std::move(v);
  return push(std::move(n));
}

Tape::Id Tape::matmul(Id a, Id b) {
  Node n;
  n.op = Op::matmul;
  n.a = a;
  n.b = b;
  n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
  n.value = cfgx::matmul(nodes_[a].value, nodes_[b].value);
  return push(std::move(n));
}

Tape::Id Tape::add(Id a, Id b) {
  const Tensor& va = nodes_[a].value;
  const Tensor& vb = nodes_[b].value;
  Node n;
  n.op = Op::add;
  n.a = a;
  n.b = b;
  n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
  if (vb.is_scalar() && !va.is_scalar()) {
    n.value = va;
    for (double& v : n.value.data) v += vb.data[0];
  } else if (vb.rows == 1 && vb.cols == va.cols && va.rows != 1) {
    n.value = va;
    for (std::size_t r = 0; r < va.rows; ++r)
      for (std::size_t c = 0; c < va.cols; ++c) n.value(r, c) += vb(0, c);
  } else {
    check_same_shape("add", va, vb);
    n.value = va;
    for (std::size_t i = 0; i < vb.size(); ++i) n.value.data[i] += vb.data[i];
  }
  return push(std::move(n));
}

Tape::Id Tape::mul(Id a, Id b) {
  const Tensor& va = nodes_[a].value;
  const Tensor& vb = nodes_[b].value;
  Node n;
  n.op = Op::mul;
  n.a = a;
  n.b = b;
  n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
  if (vb.is_scalar() && !va.is_scalar()) {
    n.value = va;
    for (double& v : n.value.data) v *= vb.data[0];
  } else {
    check_same_shape("mul", va, vb);
    n.value = va;
    for (std::size_t i = 0; i < vb.size(); ++i) n.value.data[i] *= vb.data[i];
  }
  return push(std::move(n));
}

Tape::Id Tape::relu(Id a) {
  Node n;
  n.op = Op::relu;
  n.a = a;
  n.requires_grad = nodes_[a].requires_grad;
  n.value = nodes_[a].value;
  for (double& v : n.value.data) v = v > 0.0 ? v : 0.0;
  return push(std::move(n));
}

Tape::Id Tape::sigmoid(Id a) {
  Node n;
  n.op = Op::sigmoid;
  n.a = a;
  n.requires_grad = nodes_[a].requires_grad;
  n.value = nodes_[a].value;
  for (double& v : n.value.data) v = 1.0 / (1.0 + std::exp(-v));
  return push(std::move(n));
}

Tape::Id Tape::log(Id a) {
  Node n;
  n.op = Op::log_;
  n.a = a;
  n.requires_grad = nodes_[a].requires_grad;
  n.value = nodes_[a].value;
  for (double& v : n.value.data) v = std::log(v);
  return push(std::move(n));
}

Tape::Id Tape::rsqrt(Id a) {
  Node n;
  n.op = Op::rsqrt;
  n.a = a;
  n.requires_grad = nodes_[a].requires_grad;
  n.value = nodes_[a].value;
  for (double& v : n.value.data) v = 1.0 / std::sqrt(v);
  return push(std::move(n));
}

Tape::Id Tape::clamp(Id a, double lo, double hi) {
  Node n;
  n.op = Op::clamp;
  n.a = a;
  n.lo = lo;
  n.hi = hi;
  n.requires_grad = nodes_[a].requires_grad;
  n.value = nodes_[a].value;
  for (double& v : n.value.data) v = std::min(hi, std::max(lo, v));
  return push(std::move(n));
}

Tape::Id Tape::transpose(Id a) {
  Node n;
  n.op = Op::transpose_;
  n.a = a;
  n.requires_grad = nodes_[a].requires_grad;
  n.value = cfgx::transpose(nodes_[a].value);
  return push(std::move(n));
}

Tape::Id Tape::softmax(Id a) {
  Node n;
  n.op = Op::softmax;
  n.a = a;
  n.requires_grad = nodes_[a].requires_grad;
  n.value = softmax_rows(nodes_[a].value);
  return push(std::move(n));
}

Tape::Id Tape::softmax_cross_entropy(Id logits, std::vector<int> labels) {
  const Tensor& v = nodes_[logits].value;
  if (labels.size() != v.rows)
    throw ValidationError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                          " labels for logits " + v.shape_str());
  Tensor p = softmax_rows(v);
  double loss = 0.0;
  for (std::size_t r = 0; r < v.rows; ++r) {
    int y = labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= v.cols)
      throw ValidationError("softmax_cross_entropy: label out of range");
    loss += -std::log(std::max(p(r, static_cast<std::size_t>(y)), 1e-300));
  }
  loss /= static_cast<double>(v.rows);
  Node n;
  n.op = Op::softmax_ce;
  n.a = logits;
  n.labels = std::move(labels);
  n.requires_grad = nodes_[logits].requires_grad;
  n.value = Tensor::scalar(loss);
  return push(std::move(n));
}

Tape::Id Tape::mean_reduce(Id a) {
  const Tensor& v = nodes_[a].value;
  double s = 0.0;
  for (double x : v.data) s += x;
  Node n;
  n.op = Op::mean;
  n.a = a;
  n.requires_grad = nodes_[a].requires_grad;
  n.value = Tensor::scalar(v.size() ? s / static_cast<double>(v.size()) : 0.0);
  return push(std::move(n));
}

Tape::Id Tape::sum_reduce(Id a) {
  const Tensor& v = nodes_[a].value;
  double s = 0.0;
  for (double x : v.data) s += x;
  Node n;
  n.op = Op::sum;
  n.a = a;
  n.requires_grad = nodes_[a].requires_grad;
  n.value = Tensor::scalar(s);
  return push(std::move(n));
}

Tape::Id Tape::concat_cols(Id a, Id b) {
  const Tensor& va = nodes_[a].value;
  const Tensor& vb = nodes_[b].value;
  if (va.rows != vb.rows)
    throw ValidationError("concat_cols row mismatch: " + va.shape_str() + " vs " +
                          vb.shape_str());
  Node n;
  n.op = Op::concat;
  n.a = a;
  n.b = b;
  n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
  n.value = Tensor(va.rows, va.cols + vb.cols);
  for (std::size_t r = 0; r < va.rows; ++r) {
    for (std::size_t c = 0; c < va.cols; ++c) n.value(r, c) = va(r, c);
    for (std::size_t c = 0; c < vb.cols; ++c) n.value(r, va.cols + c) = vb(r, c);
  }
  return push(std::move(n));
}

Tape::Id Tape::gather_rows(Id a, std::vector<std::size_t> idx) {
  const Tensor& v = nodes_[a].value;
  Node n;
  n.op = Op::gather;
  n.a = a;
  n.requires_grad = nodes_[a].requires_grad;
  n.value = Tensor(idx.size(), v.cols);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] >= v.rows)
      throw ValidationError("gather_rows: index " + std::to_string(idx[r]) +
                            " out of range for " + v.shape_str());
    for (std::size_t c = 0; c < v.cols; ++c) n.value(r, c) = v(idx[r], c);
  }
  n.gather_idx = std::move(idx);
  return push(std::move(n));
}

Tape::Id Tape::weighted_adjacency(Id edge_w, std::size_t n_nodes,
                                  std::vector<std::pair<int, int>> edges) {
  const Tensor& w = nodes_[edge_w].value;
  if (w.size() != edges.size())
    throw ValidationError("weighted_adjacency: " + std::to_string(edges.size()) +
                          " edges but weights " + w.shape_str());
  Node n;
  n.op = Op::adjacency;
  n.a = edge_w;
  n.requires_grad = nodes_[edge_w].requires_grad;
  n.value = Tensor(n_nodes, n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) n.value(i, i) = 1.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [u, v] = edges[e];
    n.value(u, v) += w.data[e];
    if (u != v) n.value(v, u) += w.data[e];
  }
  n.edges = std::move(edges);
  return push(std::move(n));
}

Tape::Id Tape::pick(Id row_vec, std::size_t index) {
  const Tensor& v = nodes_[row_vec].value;
  if (v.rows != 1 || index >= v.cols)
    throw ValidationError("pick: index " + std::to_string(index) +
                          " invalid for " + v.shape_str());
  Tensor onehot(1, v.cols);
  onehot(0, index) = 1.0;
  return sum_reduce(mul(row_vec, constant(std::move(onehot))));
}

std::vector<Tensor> Tape::gradients(Id out, const std::vector<Id>& wrt,
                                    ReluMode relu_mode) {
  if (!nodes_[out].value.is_scalar())
    throw ValidationError("gradients: output must be scalar, got " +
                          nodes_[out].value.shape_str());

  std::vector<Tensor> grads(nodes_.size());
  auto grad_of = [&](Id id) -> Tensor& {
    if (grads[id].size() == 0)
      grads[id] = Tensor(nodes_[id].value.rows, nodes_[id].value.cols);
    return grads[id];
  };
  grad_of(out).data[0] = 1.0;

  for (Id id = out + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || grads[id].size() == 0) continue;
    const Tensor& g = grads[id];
    switch (n.op) {
      case Op::leaf:
        break;
      case Op::matmul: {
        if (nodes_[n.a].requires_grad) {
          Tensor da = cfgx::matmul(g, cfgx::transpose(nodes_[n.b].value));
          Tensor& acc = grad_of(n.a);
          for (std::size_t i = 0; i < da.size(); ++i) acc.data[i] += da.data[i];
        }
        if (nodes_[n.b].requires_grad) {
          Tensor db = cfgx::matmul(cfgx::transpose(nodes_[n.a].value), g);
          Tensor& acc = grad_of(n.b);
          for (std::size_t i = 0; i < db.size(); ++i) acc.data[i] += db.data[i];
        }
        break;
      }
      case Op::add: {
        const Tensor& va = nodes_[n.a].value;
        const Tensor& vb = nodes_[n.b].value;
        if (nodes_[n.a].requires_grad) {
          Tensor& acc = grad_of(n.a);
          for (std::size_t i = 0; i < g.size(); ++i) acc.data[i] += g.data[i];
        }
        if (nodes_[n.b].requires_grad) {
          Tensor& acc = grad_of(n.b);
          if (vb.is_scalar() && !va.is_scalar()) {
            for (double gv : g.data) acc.data[0] += gv;
          } else if (vb.rows == 1 && vb.cols == va.cols && va.rows != 1) {
            for (std::size_t r = 0; r < g.rows; ++r)
              for (std::size_t c = 0; c < g.cols; ++c) acc(0, c) += g(r, c);
          } else {
            for (std::size_t i = 0; i < g.size(); ++i) acc.data[i] += g.data[i];
          }
        }
        break;
      }
      case Op::mul: {
        const Tensor& va = nodes_[n.a].value;
        const Tensor& vb = nodes_[n.b].value;
        bool scalar_b = vb.is_scalar() && !va.is_scalar();
        if (nodes_[n.a].requires_grad) {
          Tensor& acc = grad_of(n.a);
          if (scalar_b) {
            for (std::size_t i = 0; i < g.size(); ++i)
              acc.data[i] += g.data[i] * vb.data[0];
          } else {
            for (std::size_t i = 0; i < g.size(); ++i)
              acc.data[i] += g.data[i] * vb.data[i];
          }
        }
        if (nodes_[n.b].requires_grad) {
          Tensor& acc = grad_of(n.b);
          if (scalar_b) {
            for (std::size_t i = 0; i < g.size(); ++i)
              acc.data[0] += g.data[i] * va.data[i];
          } else {
            for (std::size_t i = 0; i < g.size(); ++i)
              acc.data[i] += g.data[i] * va.data[i];
          }
        }
        break;
      }
      case Op::relu: {
        Tensor& acc = grad_of(n.a);
        const Tensor& x = nodes_[n.a].value;
        for (std::size_t i = 0; i < g.size(); ++i) {
          double up = g.data[i];
          if (relu_mode == ReluMode::guided && up < 0.0) up = 0.0;
          if (x.data[i] > 0.0) acc.data[i] += up;
        }
        break;
      }
      case Op::sigmoid: {
        Tensor& acc = grad_of(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) {
          double s = n.value.data[i];
          acc.data[i] += g.data[i] * s * (1.0 - s);
        }
        break;
      }
      case Op::log_: {
        Tensor& acc = grad_of(n.a);
        const Tensor& x = nodes_[n.a].value;
        for (std::size_t i = 0; i < g.size(); ++i)
          acc.data[i] += g.data[i] / x.data[i];
        break;
      }
      case Op::rsqrt: {
        Tensor& acc = grad_of(n.a);
        const Tensor& x = nodes_[n.a].value;
        for (std::size_t i = 0; i < g.size(); ++i)
          acc.data[i] += g.data[i] * (-0.5) * std::pow(x.data[i], -1.5);
        break;
      }
      case Op::clamp: {
        Tensor& acc = grad_of(n.a);
        const Tensor& x = nodes_[n.a].value;
        for (std::size_t i = 0; i < g.size(); ++i)
          if (x.data[i] > n.lo && x.data[i] < n.hi) acc.data[i] += g.data[i];
        break;
      }
      case Op::transpose_: {
        Tensor& acc = grad_of(n.a);
        for (std::size_t r = 0; r < g.rows; ++r)
          for (std::size_t c = 0; c < g.cols; ++c) acc(c, r) += g(r, c);
        break;
      }
      case Op::softmax: {
        Tensor& acc = grad_of(n.a);
        const Tensor& p = n.value;
        for (std::size_t r = 0; r < p.rows; ++r) {
          double dot = 0.0;
          for (std::size_t c = 0; c < p.cols; ++c) dot += g(r, c) * p(r, c);
          for (std::size_t c = 0; c < p.cols; ++c)
            acc(r, c) += p(r, c) * (g(r, c) - dot);
        }
        break;
      }
      case Op::softmax_ce: {
        Tensor& acc = grad_of(n.a);
        Tensor p = softmax_rows(nodes_[n.a].value);
        double scale = g.data[0] / static_cast<double>(p.rows);
        for (std::size_t r = 0; r < p.rows; ++r)
          for (std::size_t c = 0; c < p.cols; ++c) {
            double onehot = (static_cast<int>(c) == n.labels[r]) ? 1.0 : 0.0;
            acc(r, c) += scale * (p(r, c) - onehot);
          }
        break;
      }
      case Op::mean: {
        Tensor& acc = grad_of(n.a);
        double s = g.data[0] / static_cast<double>(acc.size());
        for (double& v : acc.data) v += s;
        break;
      }
      case Op::sum: {
        Tensor& acc = grad_of(n.a);
        for (double& v : acc.data) v += g.data[0];
        break;
      }
      case Op::concat: {
        const Tensor& va = nodes_[n.a].value;
        const Tensor& vb = nodes_[n.b].value;
        if (nodes_[n.a].requires_grad) {
          Tensor& acc = grad_of(n.a);
          for (std::size_t r = 0; r < va.rows; ++r)
            for (std::size_t c = 0; c < va.cols; ++c) acc(r, c) += g(r, c);
        }
        if (nodes_[n.b].requires_grad) {
          Tensor& acc = grad_of(n.b);
          for (std::size_t r = 0; r < vb.rows; ++r)
            for (std::size_t c = 0; c < vb.cols; ++c)
              acc(r, c) += g(r, va.cols + c);
        }
        break;
      }
      case Op::gather: {
        Tensor& acc = grad_of(n.a);
        for (std::size_t r = 0; r < n.gather_idx.size(); ++r)
          for (std::size_t c = 0; c < g.cols; ++c)
            acc(n.gather_idx[r], c) += g(r, c);
        break;
      }
      case Op::adjacency: {
        Tensor& acc = grad_of(n.a);
        for (std::size_t e = 0; e < n.edges.size(); ++e) {
          auto [u, v] = n.edges[e];
          acc.data[e] += g(u, v);
          if (u != v) acc.data[e] += g(v, u);
        }
        break;
      }
    }
  }

  std::vector<Tensor> out_grads;
  out_grads.reserve(wrt.size());
  for (Id id : wrt) {
    if (grads[id].size() == 0)
      grads[id] = Tensor(nodes_[id].value.rows, nodes_[id].value.cols);
    out_grads.push_back(std::move(grads[id]));
  }
  return out_grads;
}

}  // namespace cfgx
