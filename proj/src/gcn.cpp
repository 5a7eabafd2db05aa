#include "cfgx/gcn.hpp"

#include <algorithm>
#include <cmath>

#include "cfgx/errors.hpp"
#include "cfgx/optim.hpp"
#include "cfgx/rng.hpp"

namespace cfgx {

namespace {
constexpr std::size_t kHidden = 64;

std::vector<double> softmax2(const std::vector<double>& logits) {
  double mx = std::max(logits[0], logits[1]);
  double e0 = std::exp(logits[0] - mx), e1 = std::exp(logits[1] - mx);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}
}  // namespace

GCNParams init_gcn(std::uint64_t seed) {
  GCNParams p;
  p.w1 = glorot_uniform(kHidden, kHidden, derive_seed(seed, "gcn-w", 1));
  p.w2 = glorot_uniform(kHidden, kHidden, derive_seed(seed, "gcn-w", 2));
  p.w3 = glorot_uniform(kHidden, kHidden, derive_seed(seed, "gcn-w", 3));
  p.wc = glorot_uniform(2, kHidden, derive_seed(seed, "gcn-wc"));
  p.bc = Tensor(1, 2);
  return p;
}

const Tensor& features_of(const CFGraph& g) {
  if (!g.features)
    throw ValidationError("graph '" + g.id + "' has no node features attached");
  return *g.features;
}

GcnBuild build_gcn_graph(Tape& t, const CFGraph& g, const Tensor& x,
                         const GCNParams& p, const GcnBuildOpts& opts) {
  std::size_t n = g.num_nodes();
  if (n == 0) throw ValidationError("build_gcn_graph: empty graph");
  if (x.rows != n || x.cols != kHidden)
    throw ValidationError("build_gcn_graph: features " + x.shape_str() +
                          " for |V|=" + std::to_string(n));

  GcnBuild b;
  auto leaf = [&](const Tensor& v, bool as_input) {
    return as_input ? t.input(v) : t.constant(v);
  };
  b.w1 = leaf(p.w1, opts.params_as_inputs);
  b.w2 = leaf(p.w2, opts.params_as_inputs);
  b.w3 = leaf(p.w3, opts.params_as_inputs);
  b.wc = leaf(p.wc, opts.params_as_inputs);
  b.bc = leaf(p.bc, opts.params_as_inputs);
  b.x = leaf(x, opts.x_as_input);

  std::size_t n_edges = g.num_edges();
  if (opts.alpha_node) {
    b.alpha = *opts.alpha_node;
    b.has_alpha = true;
  } else {
    Tensor aw(n_edges, 1);
    if (opts.alpha_values) {
      if (opts.alpha_values->size() != n_edges)
        throw ValidationError("edge weights size " +
                              std::to_string(opts.alpha_values->size()) +
                              " != |E| " + std::to_string(n_edges));
      aw.data = *opts.alpha_values;
    } else {
      std::fill(aw.data.begin(), aw.data.end(), 1.0);
    }
    b.alpha = leaf(aw, opts.alpha_as_input);
    b.has_alpha = true;
  }

  Tape::Id adj = t.weighted_adjacency(b.alpha, n, g.edges);
  Tape::Id ones = t.constant(Tensor::full(n, 1, 1.0));
  Tape::Id deg = t.matmul(adj, ones);
  Tape::Id dinv = t.rsqrt(deg);
  Tape::Id norm = t.mul(adj, t.matmul(dinv, t.transpose(dinv)));

  Tape::Id h = b.x;
  for (Tape::Id w : {b.w1, b.w2, b.w3}) h = t.relu(t.matmul(norm, t.matmul(h, w)));
  b.node_embeddings = h;

  Tape::Id pool = t.constant(Tensor::full(1, n, 1.0 / static_cast<double>(n)));
  b.graph_embedding = t.matmul(pool, h);

  Tape::Id hg = b.graph_embedding;
  if (opts.mode == RunMode::train && opts.dropout_rate > 0.0) {
    Rng rng(opts.dropout_seed);
    Tensor mask(1, kHidden);
    double keep = 1.0 - opts.dropout_rate;
    for (double& m : mask.data) m = rng.uniform() < keep ? 1.0 / keep : 0.0;
    hg = t.mul(hg, t.constant(std::move(mask)));
  }
  b.logits = t.add(t.matmul(hg, t.transpose(b.wc)), b.bc);
  b.probs = t.softmax(b.logits);
  return b;
}

ModelOutput gcn_forward(const CFGraph& g, const Tensor& x,
                        const std::vector<double>* edge_weights,
                        const GCNParams& p, RunMode mode, ReluMode /*relu_mode*/,
                        std::uint64_t dropout_seed, double dropout_rate) {
  ModelOutput out;
  if (g.num_nodes() == 0) {
    out.logits = {p.bc(0, 0), p.bc(0, 1)};
    out.probs = softmax2(out.logits);
    out.graph_embedding.assign(kHidden, 0.0);
    out.node_embeddings = Tensor(0, kHidden);
    return out;
  }
  Tape t;
  GcnBuildOpts opts;
  opts.mode = mode;
  opts.dropout_seed = dropout_seed;
  opts.dropout_rate = dropout_rate;
  opts.alpha_values = edge_weights;
  GcnBuild b = build_gcn_graph(t, g, x, p, opts);
  out.logits = t.value(b.logits).data;
  out.probs = t.value(b.probs).data;
  out.graph_embedding = t.value(b.graph_embedding).data;
  out.node_embeddings = t.value(b.node_embeddings);
  return out;
}

ModelOutput gcn_eval(const CFGraph& g, const GCNParams& p) {
  return gcn_forward(g, features_of(g), nullptr, p, RunMode::eval);
}

namespace {

struct EvalStats {
  double loss = 0.0;
  double acc = 0.0;
};

EvalStats evaluate(const std::vector<CFGraph>& set, const GCNParams& p) {
  EvalStats s;
  if (set.empty()) return s;
  for (const CFGraph& g : set) {
    ModelOutput out = gcn_eval(g, p);
    double py = out.probs[g.label];
    s.loss += -std::log(std::max(py, 1e-300));
    s.acc += out.predicted() == g.label ? 1.0 : 0.0;
  }
  s.loss /= static_cast<double>(set.size());
  s.acc /= static_cast<double>(set.size());
  return s;
}

}  // namespace

GnnTrainResult train_gnn(const std::vector<CFGraph>& train_set,
                         const std::vector<CFGraph>& test_set,
                         const GnnHyperparams& hp, std::uint64_t seed) {
  if (train_set.empty()) throw ValidationError("train_gnn: empty training set");
  bool has0 = false, has1 = false;
  for (const CFGraph& g : train_set) (g.label ? has1 : has0) = true;
  if (!has0 || !has1)
    warn("train_gnn: training set contains a single class; proceeding");

  GnnTrainResult res;
  res.params = init_gcn(derive_seed(seed, "gcn-init"));

  std::vector<Tensor*> params = {&res.params.w1, &res.params.w2, &res.params.w3,
                                 &res.params.wc, &res.params.bc};
  std::vector<const Tensor*> cps(params.begin(), params.end());
  AdamState adam = AdamState::create(hp.lr, hp.weight_decay, cps);

  auto record = [&](int epoch) {
    EvalStats tr = evaluate(train_set, res.params);
    EvalStats te = evaluate(test_set, res.params);
    res.metrics.push_back({epoch, tr.loss, tr.acc, te.loss, te.acc});
  };
  record(0);

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(seed, "gcn-shuffle", epoch));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    for (std::size_t step = 0; step < order.size(); ++step) {
      const CFGraph& g = train_set[order[step]];
      Tape t;
      GcnBuildOpts opts;
      opts.mode = RunMode::train;
      opts.dropout_rate = hp.dropout;
      opts.dropout_seed = derive_seed(
          seed, "gcn-dropout",
          static_cast<std::uint64_t>(epoch) * order.size() + step);
      opts.params_as_inputs = true;
      GcnBuild b = build_gcn_graph(t, g, features_of(g), res.params, opts);
      Tape::Id loss = t.softmax_cross_entropy(b.logits, {g.label});
      std::vector<Tensor> grads = t.gradients(loss, b.param_ids());
      adam_step(params, grads, adam);
    }
    record(epoch);
  }
  return res;
}

std::vector<double> grad_edge_weights(const CFGraph& g, const Tensor& x,
                                      const GCNParams& p, int target,
                                      ReluMode relu_mode) {
  if (g.num_edges() == 0) return {};
  Tape t;
  GcnBuildOpts opts;
  opts.alpha_as_input = true;
  GcnBuild b = build_gcn_graph(t, g, x, p, opts);
  Tape::Id out = t.pick(b.logits, static_cast<std::size_t>(target));
  std::vector<Tensor> grads = t.gradients(out, {b.alpha}, relu_mode);
  return grads[0].data;
}

Tensor grad_node_features(const CFGraph& g, const Tensor& x, const GCNParams& p,
                          int target, ReluMode relu_mode) {
  if (g.num_nodes() == 0) return Tensor(0, kHidden);
  Tape t;
  GcnBuildOpts opts;
  opts.x_as_input = true;
  GcnBuild b = build_gcn_graph(t, g, x, p, opts);
  Tape::Id out = t.pick(b.logits, static_cast<std::size_t>(target));
  std::vector<Tensor> grads = t.gradients(out, {b.x}, relu_mode);
  return grads[0];
}

}  // namespace cfgx
