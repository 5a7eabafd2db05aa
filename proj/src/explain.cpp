#include "cfgx/explain.hpp"

#include <algorithm>
#include <cmath>

#include "cfgx/errors.hpp"
#include "cfgx/optim.hpp"
#include "cfgx/rng.hpp"

namespace cfgx {

std::string method_name(Method m) {
  switch (m) {
    case Method::gnnexplainer: return "gnnexplainer";
    case Method::pgexplainer: return "pgexplainer";
    case Method::saliency: return "saliency";
    case Method::ig: return "ig";
    case Method::gbp: return "gbp";
    case Method::rankfusion: return "rankfusion";
    case Method::mean_agg: return "mean_agg";
    case Method::rank_vote: return "rank_vote";
    case Method::random_scores: return "random";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  for (Method m : {Method::gnnexplainer, Method::pgexplainer, Method::saliency,
                   Method::ig, Method::gbp, Method::rankfusion, Method::mean_agg,
                   Method::rank_vote, Method::random_scores})
    if (method_name(m) == s) return m;
  throw ValidationError("unknown explainer method '" + s + "'");
}

namespace {

std::vector<double> abs_all(std::vector<double> v) {
  for (double& x : v) x = std::fabs(x);
  return v;
}

// -(p log p + (1-p) log(1-p)) with clamping against saturated masks
Tape::Id binary_entropy(Tape& t, Tape::Id p) {
  Tape::Id pc = t.clamp(p, 1e-12, 1.0 - 1e-12);
  Tape::Id one = t.constant(Tensor::full(t.value(pc).rows, t.value(pc).cols, 1.0));
  Tape::Id q = t.sub(one, pc);
  return t.scale(t.add(t.mul(pc, t.log(pc)), t.mul(q, t.log(q))), -1.0);
}

}  // namespace

Explanation explain_saliency(const CFGraph& g, const Tensor& x, const GCNParams& p) {
  Explanation e{Method::saliency, {}, 0, "{}"};
  if (g.num_edges() == 0) return e;
  int target = gcn_forward(g, x, nullptr, p).predicted();
  e.edge_scores = abs_all(grad_edge_weights(g, x, p, target, ReluMode::standard));
  return e;
}

Explanation explain_gbp(const CFGraph& g, const Tensor& x, const GCNParams& p) {
  Explanation e{Method::gbp, {}, 0, "{}"};
  if (g.num_edges() == 0) return e;
  int target = gcn_forward(g, x, nullptr, p).predicted();
  e.edge_scores = abs_all(grad_edge_weights(g, x, p, target, ReluMode::guided));
  return e;
}

std::vector<double> ig_signed(const CFGraph& g, const Tensor& x,
                              const GCNParams& p, int target, int m) {
  if (m < 1) throw ValidationError("explain_ig: step count m must be >= 1");
  std::size_t n_edges = g.num_edges();
  std::vector<double> acc(n_edges, 0.0);
  if (n_edges == 0) return acc;
  for (int k = 1; k <= m; ++k) {
    double a = (static_cast<double>(k) - 0.5) / static_cast<double>(m);
    std::vector<double> alpha(n_edges, a);
    Tape t;
    GcnBuildOpts opts;
    opts.alpha_as_input = true;
    opts.alpha_values = &alpha;
    GcnBuild b = build_gcn_graph(t, g, x, p, opts);
    Tape::Id out = t.pick(b.logits, static_cast<std::size_t>(target));
    std::vector<Tensor> grads = t.gradients(out, {b.alpha});
    for (std::size_t e = 0; e < n_edges; ++e) acc[e] += grads[0].data[e];
  }
  for (double& v : acc) v /= static_cast<double>(m);
  return acc;
}

Explanation explain_ig(const CFGraph& g, const Tensor& x, const GCNParams& p,
                       int m) {
  Explanation e{Method::ig, {}, 0, "{\"m\":" + std::to_string(m) + "}"};
  if (g.num_edges() == 0) {
    if (m < 1) throw ValidationError("explain_ig: step count m must be >= 1");
    return e;
  }
  int target = gcn_forward(g, x, nullptr, p).predicted();
  e.edge_scores = abs_all(ig_signed(g, x, p, target, m));
  return e;
}

Explanation explain_gnnexplainer(const CFGraph& g, const Tensor& x,
                                 const GCNParams& p,
                                 const GnnExplainerConfig& cfg) {
  Explanation e{Method::gnnexplainer, {}, cfg.seed,
                "{\"epochs\":" + std::to_string(cfg.epochs) +
                    ",\"lr\":" + std::to_string(cfg.lr) + "}"};
  std::size_t n_edges = g.num_edges();
  if (n_edges == 0) return e;

  int y = gcn_forward(g, x, nullptr, p).predicted();

  Tensor mask(n_edges, 1);
  Rng rng(derive_seed(cfg.seed, "gnnex-init"));
  for (double& v : mask.data) v = rng.normal(0.0, 0.1);

  std::vector<Tensor*> params = {&mask};
  AdamState adam = AdamState::create(cfg.lr, 0.0, {&mask});

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Tape t;
    Tape::Id mid = t.input(mask);
    Tape::Id sig = t.sigmoid(mid);
    GcnBuildOpts opts;
    opts.alpha_node = sig;
    GcnBuild b = build_gcn_graph(t, g, x, p, opts);
    Tape::Id loss = t.softmax_cross_entropy(b.logits, {y});
    loss = t.add(loss, t.scale(t.mean_reduce(sig), cfg.size_coef));
    loss = t.add(loss, t.scale(t.mean_reduce(binary_entropy(t, sig)), cfg.ent_coef));
    std::vector<Tensor> grads = t.gradients(loss, {mid});
    adam_step(params, grads, adam);
  }

  e.edge_scores.resize(n_edges);
  for (std::size_t i = 0; i < n_edges; ++i)
    e.edge_scores[i] = 1.0 / (1.0 + std::exp(-mask.data[i]));
  return e;
}

PGExplainerParams init_pgexplainer(std::uint64_t seed) {
  PGExplainerParams psi;
  psi.w1 = glorot_uniform(128, 64, derive_seed(seed, "pg-w", 1));
  psi.b1 = Tensor(1, 64);
  psi.w2 = glorot_uniform(64, 1, derive_seed(seed, "pg-w", 2));
  psi.b2 = Tensor(1, 1);
  return psi;
}

namespace {

// [E x 128] endpoint-embedding pairs on the final GCN layer
Tensor edge_embedding_matrix(const CFGraph& g, const Tensor& z) {
  Tensor out(g.num_edges(), 128);
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    auto [u, v] = g.edges[e];
    for (std::size_t c = 0; c < 64; ++c) {
      out(e, c) = z(static_cast<std::size_t>(u), c);
      out(e, 64 + c) = z(static_cast<std::size_t>(v), c);
    }
  }
  return out;
}

struct PgGraphCtx {
  const CFGraph* g;
  const Tensor* x;
  Tensor edge_emb;           // E x 128
  std::vector<double> probs;  // model output on the original graph
};

Tape::Id pg_edge_logits(Tape& t, const Tensor& edge_emb, Tape::Id w1, Tape::Id b1,
                        Tape::Id w2, Tape::Id b2) {
  Tape::Id z = t.constant(edge_emb);
  Tape::Id h = t.relu(t.add(t.matmul(z, w1), b1));
  return t.add(t.matmul(h, w2), b2);
}

}  // namespace

PGExplainerTrainResult train_pgexplainer(const std::vector<CFGraph>& train_set,
                                         const GCNParams& p,
                                         const PGExplainerConfig& cfg) {
  if (train_set.empty()) throw ValidationError("train_pgexplainer: empty training set");

  std::vector<PgGraphCtx> ctx;
  for (const CFGraph& g : train_set) {
    if (g.num_edges() == 0) continue;
    ModelOutput out = gcn_eval(g, p);
    ctx.push_back(PgGraphCtx{&g, &*g.features,
                             edge_embedding_matrix(g, out.node_embeddings),
                             out.probs});
  }
  if (ctx.empty())
    throw ValidationError("train_pgexplainer: no graphs with edges in training set");

  PGExplainerTrainResult res;
  res.psi = init_pgexplainer(derive_seed(cfg.seed, "pg-init"));
  std::vector<Tensor*> params = {&res.psi.w1, &res.psi.b1, &res.psi.w2, &res.psi.b2};
  std::vector<const Tensor*> cps(params.begin(), params.end());
  AdamState adam = AdamState::create(cfg.lr, 0.0, cps);

  std::vector<std::size_t> order(ctx.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double temp = cfg.temp_start;
    if (cfg.epochs > 1)
      temp = cfg.temp_start *
             std::pow(cfg.temp_end / cfg.temp_start,
                      static_cast<double>(epoch) / static_cast<double>(cfg.epochs - 1));
    Rng shuffle_rng(derive_seed(cfg.seed, "pg-shuffle", epoch));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    double epoch_loss = 0.0;
    for (std::size_t step = 0; step < order.size(); ++step) {
      PgGraphCtx& c = ctx[order[step]];
      std::size_t n_edges = c.g->num_edges();
      Tape t;
      Tape::Id w1 = t.input(res.psi.w1), b1 = t.input(res.psi.b1);
      Tape::Id w2 = t.input(res.psi.w2), b2 = t.input(res.psi.b2);
      Tape::Id elog = pg_edge_logits(t, c.edge_emb, w1, b1, w2, b2);

      Rng noise_rng(derive_seed(cfg.seed, "pg-noise",
                                static_cast<std::uint64_t>(epoch) * ctx.size() + step));
      Tape::Id q = t.constant(Tensor::row(c.probs));
      Tape::Id total = t.constant(Tensor::scalar(0.0));
      Tape::Id last_alpha = elog;
      for (int k = 0; k < cfg.samples_per_graph; ++k) {
        Tensor noise(n_edges, 1);
        for (double& v : noise.data) {
          double u = std::min(std::max(noise_rng.uniform(), 1e-12), 1.0 - 1e-12);
          v = std::log(u) - std::log(1.0 - u);
        }
        Tape::Id s = t.scale(t.add(elog, t.constant(std::move(noise))), 1.0 / temp);
        Tape::Id alpha = t.sigmoid(s);
        last_alpha = alpha;
        GcnBuildOpts opts;
        opts.alpha_node = alpha;
        GcnBuild b = build_gcn_graph(t, *c.g, *c.x, p, opts);
        Tape::Id lp = t.log(t.clamp(b.probs, 1e-12, 1.0));
        total = t.add(total, t.scale(t.sum_reduce(t.mul(lp, q)), -1.0));
      }
      total = t.add(total, t.scale(t.mean_reduce(last_alpha), cfg.size_coef));
      Tape::Id ent = binary_entropy(t, t.sigmoid(elog));
      total = t.add(total, t.scale(t.mean_reduce(ent), cfg.ent_coef));

      epoch_loss += t.value(total).data[0];
      std::vector<Tensor> grads = t.gradients(total, {w1, b1, w2, b2});
      adam_step(params, grads, adam);
    }
    res.loss_history.push_back(epoch_loss / static_cast<double>(ctx.size()));
  }
  return res;
}

Explanation explain_pgexplainer(const CFGraph& g, const Tensor& x,
                                const PGExplainerParams& psi, const GCNParams& p) {
  Explanation e{Method::pgexplainer, {}, 0, "{}"};
  if (g.num_edges() == 0) return e;
  ModelOutput out = gcn_forward(g, x, nullptr, p);
  Tensor emb = edge_embedding_matrix(g, out.node_embeddings);
  Tape t;
  Tape::Id elog = pg_edge_logits(t, emb, t.constant(psi.w1), t.constant(psi.b1),
                                 t.constant(psi.w2), t.constant(psi.b2));
  const Tensor& logits = t.value(elog);
  e.edge_scores.resize(g.num_edges());
  for (std::size_t i = 0; i < e.edge_scores.size(); ++i)
    e.edge_scores[i] = 1.0 / (1.0 + std::exp(-logits.data[i]));
  return e;
}

double pgexplainer_loss(const CFGraph& g, const Tensor& x,
                        const PGExplainerParams& psi, const GCNParams& p,
                        const PGExplainerConfig& cfg) {
  if (g.num_edges() == 0) return 0.0;
  ModelOutput out = gcn_forward(g, x, nullptr, p);
  Tensor emb = edge_embedding_matrix(g, out.node_embeddings);
  Tape t;
  Tape::Id elog = pg_edge_logits(t, emb, t.constant(psi.w1), t.constant(psi.b1),
                                 t.constant(psi.w2), t.constant(psi.b2));
  Tape::Id alpha = t.sigmoid(elog);
  GcnBuildOpts opts;
  opts.alpha_node = alpha;
  GcnBuild b = build_gcn_graph(t, g, x, p, opts);
  Tape::Id q = t.constant(Tensor::row(out.probs));
  Tape::Id lp = t.log(t.clamp(b.probs, 1e-12, 1.0));
  Tape::Id total = t.scale(t.sum_reduce(t.mul(lp, q)), -1.0);
  total = t.add(total, t.scale(t.mean_reduce(alpha), cfg.size_coef));
  total = t.add(total, t.scale(t.mean_reduce(binary_entropy(t, alpha)), cfg.ent_coef));
  return t.value(total).data[0];
}

Explanation explain_random(const CFGraph& g, std::uint64_t seed) {
  Explanation e{Method::random_scores, {}, seed, "{}"};
  Rng rng(derive_seed(seed, "random-expl"));
  e.edge_scores.resize(g.num_edges());
  for (double& v : e.edge_scores) v = rng.uniform();
  return e;
}

}  // namespace cfgx
