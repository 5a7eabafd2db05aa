#pragma once

#include <cstdint>
#include <vector>

#include "cfgx/tensor.hpp"

namespace cfgx {

// Adam with bias correction and decoupled weight decay
// (lr * wd * param subtracted per step, outside the moment update).
struct AdamState {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  std::int64_t t = 0;
  std::vector<Tensor> m;  // first moments, one per parameter
  std::vector<Tensor> v;  // second moments

  static AdamState create(double lr, double weight_decay,
                          const std::vector<const Tensor*>& params);
};

// One update over all parameters; throws NumericError on non-finite gradients.
void adam_step(std::vector<Tensor*> params, const std::vector<Tensor>& grads,
               AdamState& state);

}  // namespace cfgx
