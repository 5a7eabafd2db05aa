#include "cfgx/autoencoder.hpp"

#include <algorithm>
#include <cmath>

#include "cfgx/autodiff.hpp"
#include "cfgx/errors.hpp"
#include "cfgx/insn.hpp"
#include "cfgx/optim.hpp"
#include "cfgx/rng.hpp"

namespace cfgx {

namespace {

constexpr std::size_t kDims[4] = {kInstrDim, 256, 128, 64};

struct AeGraph {
  Tape::Id loss;
  Tape::Id code;
  Tape::Id recon;
  std::vector<Tape::Id> params;
};

// Builds encoder+decoder on the tape; x is a constant batch.
AeGraph build_ae(Tape& t, const AEParams& p, const Tensor& x, bool params_as_inputs) {
  auto leaf = [&](const Tensor& v) {
    return params_as_inputs ? t.input(v) : t.constant(v);
  };
  AeGraph g;
  Tape::Id ids[12];
  const Tensor* tensors[12] = {&p.ew1, &p.eb1, &p.ew2, &p.eb2, &p.ew3, &p.eb3,
                               &p.dw1, &p.db1, &p.dw2, &p.db2, &p.dw3, &p.db3};
  for (int i = 0; i < 12; ++i) {
    ids[i] = leaf(*tensors[i]);
    g.params.push_back(ids[i]);
  }
  Tape::Id xid = t.constant(x);
  Tape::Id h = xid;
  for (int l = 0; l < 3; ++l)
    h = t.relu(t.add(t.matmul(h, ids[2 * l]), ids[2 * l + 1]));
  g.code = h;
  for (int l = 0; l < 3; ++l)
    h = t.relu(t.add(t.matmul(h, ids[6 + 2 * l]), ids[6 + 2 * l + 1]));
  g.recon = h;
  Tape::Id diff = t.sub(g.recon, xid);
  g.loss = t.mean_reduce(t.mul(diff, diff));
  return g;
}

Tensor batch_from(const std::vector<std::vector<double>>& data,
                  const std::vector<std::size_t>& idx) {
  Tensor x(idx.size(), kInstrDim);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto& v = data[idx[r]];
    if (v.size() != kInstrDim)
      throw ValidationError("train_ae: vector length " + std::to_string(v.size()) +
                            " != " + std::to_string(kInstrDim));
    std::copy(v.begin(), v.end(), x.data.begin() + r * kInstrDim);
  }
  return x;
}

}  // namespace

AEParams init_ae(std::uint64_t seed) {
  AEParams p;
  Tensor* ws[6] = {&p.ew1, &p.ew2, &p.ew3, &p.dw1, &p.dw2, &p.dw3};
  Tensor* bs[6] = {&p.eb1, &p.eb2, &p.eb3, &p.db1, &p.db2, &p.db3};
  std::size_t dims_in[6] = {kDims[0], kDims[1], kDims[2], kDims[3], kDims[2], kDims[1]};
  std::size_t dims_out[6] = {kDims[1], kDims[2], kDims[3], kDims[2], kDims[1], kDims[0]};
  for (int i = 0; i < 6; ++i) {
    *ws[i] = glorot_uniform(dims_in[i], dims_out[i], derive_seed(seed, "ae-w", i));
    *bs[i] = Tensor(1, dims_out[i]);
  }
  return p;
}

AETrainResult train_ae(const std::vector<std::vector<double>>& dataset,
                       const AETrainConfig& cfg) {
  if (dataset.empty()) throw ValidationError("train_ae: empty dataset");
  AETrainResult res;
  res.params = init_ae(derive_seed(cfg.seed, "ae-init"));

  std::size_t n = dataset.size();
  std::size_t batch = std::min<std::size_t>(std::max(cfg.batch_size, 1), n);
  std::size_t steps_per_epoch = (n + batch - 1) / batch;

  // validation subset for the plateau rule (not held out; purely a monitor)
  std::size_t n_val = std::max<std::size_t>(1, static_cast<std::size_t>(
                          std::floor(cfg.val_fraction * static_cast<double>(n))));
  Rng vrng(derive_seed(cfg.seed, "ae-val"));
  std::vector<std::size_t> val_idx;
  {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    for (std::size_t i = 0; i < n_val && i + 1 < n + 1; ++i) {
      std::size_t j = i + vrng.below(n - i);
      std::swap(all[i], all[j]);
      val_idx.push_back(all[i]);
    }
  }
  Tensor val_x = batch_from(dataset, val_idx);

  std::vector<Tensor*> param_ptrs = {
      &res.params.ew1, &res.params.eb1, &res.params.ew2, &res.params.eb2,
      &res.params.ew3, &res.params.eb3, &res.params.dw1, &res.params.db1,
      &res.params.dw2, &res.params.db2, &res.params.dw3, &res.params.db3};
  std::vector<const Tensor*> cps(param_ptrs.begin(), param_ptrs.end());
  AdamState adam = AdamState::create(cfg.lr, 0.0, cps);

  int below = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    Rng brng(derive_seed(cfg.seed, "ae-batch", static_cast<std::uint64_t>(epoch)));
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      std::vector<std::size_t> idx(batch);
      for (auto& i : idx) i = brng.below(n);
      Tensor x = batch_from(dataset, idx);
      Tape tape;
      AeGraph g = build_ae(tape, res.params, x, true);
      epoch_loss += tape.value(g.loss).data[0];
      std::vector<Tensor> grads = tape.gradients(g.loss, g.params);
      adam_step(param_ptrs, grads, adam);
    }
    res.loss_history.push_back(epoch_loss / static_cast<double>(steps_per_epoch));
    double val = ae_loss(res.params, val_x);
    res.val_history.push_back(val);

    if (cfg.plateau_threshold > 0.0) {
      below = val < cfg.plateau_threshold ? below + 1 : 0;
      if (below >= cfg.plateau_window) {
        res.early_stopped = true;
        break;
      }
    }
  }
  return res;
}

Tensor ae_encode_batch(const AEParams& p, const Tensor& x) {
  Tape t;
  AeGraph g = build_ae(t, p, x, false);
  return t.value(g.code);
}

Tensor ae_reconstruct(const AEParams& p, const Tensor& x) {
  Tape t;
  AeGraph g = build_ae(t, p, x, false);
  return t.value(g.recon);
}

double ae_loss(const AEParams& p, const Tensor& x) {
  Tape t;
  AeGraph g = build_ae(t, p, x, false);
  return t.value(g.loss).data[0];
}

std::vector<double> ae_encode(const AEParams& p, std::span<const double> v) {
  Tensor x(1, kInstrDim, std::vector<double>(v.begin(), v.end()));
  Tensor code = ae_encode_batch(p, x);
  return code.data;
}

}  // namespace cfgx
