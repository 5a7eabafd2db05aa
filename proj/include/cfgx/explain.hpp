#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfgx/gcn.hpp"
#include "cfgx/graph.hpp"

namespace cfgx {

enum class Method {
  gnnexplainer,
  pgexplainer,
  saliency,
  ig,
  gbp,
  rankfusion,
  mean_agg,
  rank_vote,
  random_scores,
};

std::string method_name(Method m);
Method method_from_string(const std::string& s);

// Per-edge importance aligned to the canonical edge order.
struct Explanation {
  Method method;
  std::vector<double> edge_scores;
  std::uint64_t seed = 0;
  std::string config_echo;  // JSON text of the effective config
};

// Gradient attribution target: pre-softmax logit of the predicted class.
Explanation explain_saliency(const CFGraph& g, const Tensor& x, const GCNParams& p);
Explanation explain_gbp(const CFGraph& g, const Tensor& x, const GCNParams& p);

// Midpoint-rule integrated gradients along the all-edges-off -> on path.
Explanation explain_ig(const CFGraph& g, const Tensor& x, const GCNParams& p,
                       int m = 50);
// Signed variant used for the completeness identity.
std::vector<double> ig_signed(const CFGraph& g, const Tensor& x,
                              const GCNParams& p, int target, int m);

struct GnnExplainerConfig {
  int epochs = 100;
  double lr = 0.01;
  double size_coef = 0.005;
  double ent_coef = 1.0;
  std::uint64_t seed = 0;
};

Explanation explain_gnnexplainer(const CFGraph& g, const Tensor& x,
                                 const GCNParams& p,
                                 const GnnExplainerConfig& cfg);

// Shared edge-scoring MLP on concatenated endpoint embeddings (128->64->1).
struct PGExplainerParams {
  Tensor w1;  // 128x64
  Tensor b1;  // 1x64
  Tensor w2;  // 64x1
  Tensor b2;  // 1x1
};

struct PGExplainerConfig {
  int epochs = 30;
  double lr = 0.003;
  int samples_per_graph = 1;  // K
  double temp_start = 5.0;
  double temp_end = 1.0;  // geometric anneal
  double size_coef = 0.005;
  double ent_coef = 1.0;
  std::uint64_t seed = 0;
};

struct PGExplainerTrainResult {
  PGExplainerParams psi;
  std::vector<double> loss_history;  // mean per-graph loss per epoch
};

PGExplainerParams init_pgexplainer(std::uint64_t seed);

PGExplainerTrainResult train_pgexplainer(const std::vector<CFGraph>& train_set,
                                         const GCNParams& p,
                                         const PGExplainerConfig& cfg);

Explanation explain_pgexplainer(const CFGraph& g, const Tensor& x,
                                const PGExplainerParams& psi, const GCNParams& p);

// Deterministic per-graph loss at evaluation temperature (no sampling).
double pgexplainer_loss(const CFGraph& g, const Tensor& x,
                        const PGExplainerParams& psi, const GCNParams& p,
                        const PGExplainerConfig& cfg);

Explanation explain_random(const CFGraph& g, std::uint64_t seed);

}  // namespace cfgx
