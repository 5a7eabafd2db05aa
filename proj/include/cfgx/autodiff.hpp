#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cfgx/tensor.hpp"

namespace cfgx {

enum class ReluMode { standard, guided };

// Eager reverse-mode tape over dense 2-D tensors. Values are computed at
// op-creation time; gradients() walks the tape backwards from a scalar.
// ReLU backward in guided mode zeroes negative upstream gradients on top of
// the usual input-sign gate.
class Tape {
 public:
  using Id = std::uint32_t;

  Id input(Tensor v);     // differentiable leaf
  Id constant(Tensor v);  // non-differentiable leaf

  Id matmul(Id a, Id b);
  Id add(Id a, Id b);  // same shape, b = [1xC] row broadcast, or b = scalar
  Id mul(Id a, Id b);  // same shape, or b = scalar
  Id relu(Id a);
  Id sigmoid(Id a);
  Id log(Id a);
  Id rsqrt(Id a);
  Id clamp(Id a, double lo, double hi);
  Id transpose(Id a);
  Id softmax(Id a);  // row-wise
  Id softmax_cross_entropy(Id logits, std::vector<int> labels);  // mean over rows
  Id mean_reduce(Id a);
  Id sum_reduce(Id a);
  Id concat_cols(Id a, Id b);
  Id gather_rows(Id a, std::vector<std::size_t> idx);
  // Dense [n x n] symmetrized adjacency with unit self-loops: each directed
  // edge (u,v) contributes w_e to entries (u,v) and (v,u) (once for u==v).
  Id weighted_adjacency(Id edge_w, std::size_t n_nodes,
                        std::vector<std::pair<int, int>> edges);

  // conveniences built on the primitives above
  Id scale(Id a, double s) { return mul(a, constant(Tensor::scalar(s))); }
  Id sub(Id a, Id b) { return add(a, scale(b, -1.0)); }
  Id pick(Id row_vec, std::size_t index);  // scalar entry of a 1xC value

  const Tensor& value(Id id) const { return nodes_[id].value; }
  std::size_t size() const { return nodes_.size(); }

  // d(out)/d(wrt_i) for a scalar out. One reverse sweep.
  std::vector<Tensor> gradients(Id out, const std::vector<Id>& wrt,
                                ReluMode relu_mode = ReluMode::standard);

 private:
  enum class Op {
    leaf,
    matmul,
    add,
    mul,
    relu,
    sigmoid,
    log_,
    rsqrt,
    clamp,
    transpose_,
    softmax,
    softmax_ce,
    mean,
    sum,
    concat,
    gather,
    adjacency,
  };

  struct Node {
    Op op = Op::leaf;
    bool requires_grad = false;
    Id a = 0, b = 0;
    Tensor value;
    // op-specific payloads
    std::vector<int> labels;
    std::vector<std::size_t> gather_idx;
    std::vector<std::pair<int, int>> edges;
    double lo = 0.0, hi = 0.0;
  };

  Id push(Node n);
  std::vector<Node> nodes_;
};

}  // namespace cfgx
