#include "cfgx/tensor.hpp"

#include <Eigen/Core>
#include <cmath>

#include "cfgx/errors.hpp"
#include "cfgx/rng.hpp"

namespace cfgx {

namespace {
using MatMap = Eigen::Map<
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatMap = Eigen::Map<
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
}  // namespace

Tensor::Tensor(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
  if (data.size() != r * c)
    throw ValidationError("tensor data length " + std::to_string(data.size()) +
                          " does not match shape " + shape_str());
}

Tensor Tensor::full(std::size_t r, std::size_t c, double v) {
  Tensor t(r, c);
  std::fill(t.data.begin(), t.data.end(), v);
  return t;
}

Tensor Tensor::scalar(double v) { return Tensor(1, 1, {v}); }

Tensor Tensor::row(std::vector<double> v) {
  std::size_t n = v.size();
  return Tensor(1, n, std::move(v));
}

Tensor Tensor::column(std::vector<double> v) {
  std::size_t n = v.size();
  return Tensor(n, 1, std::move(v));
}

std::string Tensor::shape_str() const {
  return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols != b.rows)
    throw ValidationError("matmul shape mismatch: " + a.shape_str() + " x " +
                          b.shape_str());
  Tensor out(a.rows, b.cols);
  if (a.rows == 0 || b.cols == 0 || a.cols == 0) return out;
  ConstMatMap ma(a.data.data(), a.rows, a.cols);
  ConstMatMap mb(b.data.data(), b.rows, b.cols);
  MatMap mo(out.data.data(), out.rows, out.cols);
  mo.noalias() = ma * mb;
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols, a.rows);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) out(c, r) = a(r, c);
  return out;
}

bool all_finite(const Tensor& t) {
  for (double v : t.data)
    if (!std::isfinite(v)) return false;
  return true;
}

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::uint64_t seed) {
  double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Rng rng(seed);
  Tensor t(fan_in, fan_out);
  for (double& v : t.data) v = rng.uniform(-bound, bound);
  return t;
}

WarnHandler& warn_handler_ref() {
  static WarnHandler handler;
  return handler;
}

void warn(const std::string& msg) {
  if (warn_handler_ref()) {
    warn_handler_ref()(msg);
  } else {
    std::fputs(("warning: " + msg + "\n").c_str(), stderr);
  }
}

WarnHandler set_warn_handler(WarnHandler h) {
  WarnHandler old = warn_handler_ref();
  warn_handler_ref() = std::move(h);
  return old;
}

}  // namespace cfgx
