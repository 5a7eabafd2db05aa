#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cfgx/autodiff.hpp"
#include "cfgx/graph.hpp"
#include "cfgx/tensor.hpp"

namespace cfgx {

// Three graph-convolution layers (64 hidden units), mean-pool readout,
// dropout 0.2 on the pooled embedding in train mode, linear classifier.
struct GCNParams {
  Tensor w1, w2, w3;  // 64x64
  Tensor wc;          // 2x64
  Tensor bc;          // 1x2
};

GCNParams init_gcn(std::uint64_t seed);

enum class RunMode { train, eval };

struct ModelOutput {
  std::vector<double> logits;           // 2
  std::vector<double> probs;            // 2, sums to 1
  std::vector<double> graph_embedding;  // 64, pre-dropout mean pool
  Tensor node_embeddings;               // |V| x 64 after layer 3

  int predicted() const { return probs[1] > probs[0] ? 1 : 0; }
};

// Message passing over the symmetrized edge set with weight-1 self-loops.
// Per-edge weight alpha_e scales both directed messages of edge e, and the
// degree normalization uses weighted degrees (d_i = 1 + sum of incident
// alpha), so alpha = 0 on a set S reproduces complement_graph(g, S) exactly.
// edge_weights must align with the canonical edge order; null means all 1.
ModelOutput gcn_forward(const CFGraph& g, const Tensor& x,
                        const std::vector<double>* edge_weights,
                        const GCNParams& p, RunMode mode = RunMode::eval,
                        ReluMode relu_mode = ReluMode::standard,
                        std::uint64_t dropout_seed = 0,
                        double dropout_rate = 0.2);

// Convenience: uses g.features and all-ones edge weights, eval mode.
ModelOutput gcn_eval(const CFGraph& g, const GCNParams& p);

struct GnnHyperparams {
  int epochs = 50;
  double lr = 1e-4;
  double weight_decay = 5e-4;
  double dropout = 0.2;
};

struct EpochMetrics {
  int epoch;  // 0 = initialization, before any update
  double train_loss, train_acc;
  double test_loss, test_acc;
};

struct GnnTrainResult {
  GCNParams params;
  std::vector<EpochMetrics> metrics;
};

// Graphs must carry 64-dim features. One Adam step per graph, seeded
// shuffle per epoch; cross-entropy loss.
GnnTrainResult train_gnn(const std::vector<CFGraph>& train_set,
                         const std::vector<CFGraph>& test_set,
                         const GnnHyperparams& hp, std::uint64_t seed);

// d(logit of target class)/d(alpha_e) at alpha = 1, eval mode.
std::vector<double> grad_edge_weights(const CFGraph& g, const Tensor& x,
                                      const GCNParams& p, int target,
                                      ReluMode relu_mode = ReluMode::standard);

// d(logit of target class)/d(x), eval mode, alpha = 1.
Tensor grad_node_features(const CFGraph& g, const Tensor& x, const GCNParams& p,
                          int target, ReluMode relu_mode = ReluMode::standard);

// Shared tape builder used by training, gradients and the explainers.
struct GcnBuildOpts {
  RunMode mode = RunMode::eval;
  double dropout_rate = 0.2;
  std::uint64_t dropout_seed = 0;
  bool params_as_inputs = false;
  bool x_as_input = false;
  bool alpha_as_input = false;
  const std::vector<double>* alpha_values = nullptr;  // default all-ones
  std::optional<Tape::Id> alpha_node;  // reuse an existing tape value
};

struct GcnBuild {
  Tape::Id alpha = 0;
  bool has_alpha = false;
  Tape::Id x = 0;
  Tape::Id w1 = 0, w2 = 0, w3 = 0, wc = 0, bc = 0;
  Tape::Id node_embeddings = 0;
  Tape::Id graph_embedding = 0;  // pre-dropout
  Tape::Id logits = 0;
  Tape::Id probs = 0;
  std::vector<Tape::Id> param_ids() const { return {w1, w2, w3, wc, bc}; }
};

// Requires |V| >= 1; callers handle the 0-node case (logits = bc).
GcnBuild build_gcn_graph(Tape& tape, const CFGraph& g, const Tensor& x,
                         const GCNParams& p, const GcnBuildOpts& opts);

const Tensor& features_of(const CFGraph& g);  // throws when absent

}  // namespace cfgx
