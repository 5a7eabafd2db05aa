#include "cfgx/optim.hpp"

#include <cmath>

#include "cfgx/errors.hpp"

namespace cfgx {

AdamState AdamState::create(double lr, double weight_decay,
                            const std::vector<const Tensor*>& params) {
  AdamState st;
  st.lr = lr;
  st.weight_decay = weight_decay;
  for (const Tensor* p : params) {
    st.m.emplace_back(p->rows, p->cols);
    st.v.emplace_back(p->rows, p->cols);
  }
  return st;
}

void adam_step(std::vector<Tensor*> params, const std::vector<Tensor>& grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw ValidationError("adam_step: parameter/gradient/state count mismatch");
  state.t += 1;
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = grads[i];
    if (!p.same_shape(g))
      throw ValidationError("adam_step: param " + p.shape_str() +
                            " vs grad " + g.shape_str());
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      double gj = g.data[j];
      if (!std::isfinite(gj))
        throw NumericError("adam_step: non-finite gradient at parameter " +
                           std::to_string(i) + " index " + std::to_string(j));
      m.data[j] = state.beta1 * m.data[j] + (1.0 - state.beta1) * gj;
      v.data[j] = state.beta2 * v.data[j] + (1.0 - state.beta2) * gj * gj;
      double mhat = m.data[j] / bc1;
      double vhat = v.data[j] / bc2;
      p.data[j] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
      if (state.weight_decay != 0.0)
        p.data[j] -= state.lr * state.weight_decay * p.data[j];
    }
  }
}

}  // namespace cfgx
