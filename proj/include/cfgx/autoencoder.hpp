#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cfgx/tensor.hpp"

namespace cfgx {

// Symmetric autoencoder 439 -> 256 -> 128 -> 64 -> 128 -> 256 -> 439,
// ReLU after every layer. Weights use the x @ W + b layout.
struct AEParams {
  Tensor ew1, eb1, ew2, eb2, ew3, eb3;
  Tensor dw1, db1, dw2, db2, dw3, db3;
};

AEParams init_ae(std::uint64_t seed);

struct AETrainConfig {
  int epochs = 5000;
  double lr = 1e-4;
  int batch_size = 256;
  std::uint64_t seed = 0;
  // early stop: validation MSE below threshold for `plateau_window`
  // consecutive epochs; threshold <= 0 disables.
  double plateau_threshold = 1e-4;
  int plateau_window = 200;
  double val_fraction = 0.1;
};

struct AETrainResult {
  AEParams params;
  std::vector<double> loss_history;  // one entry per epoch actually run
  std::vector<double> val_history;
  bool early_stopped = false;
};

// MSE here is the mean over all entries (samples x 439).
AETrainResult train_ae(const std::vector<std::vector<double>>& dataset,
                       const AETrainConfig& cfg);

std::vector<double> ae_encode(const AEParams& p, std::span<const double> v);
Tensor ae_encode_batch(const AEParams& p, const Tensor& x);
Tensor ae_reconstruct(const AEParams& p, const Tensor& x);
double ae_loss(const AEParams& p, const Tensor& x);

}  // namespace cfgx
