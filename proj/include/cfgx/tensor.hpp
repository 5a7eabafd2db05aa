#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace cfgx {

// Dense row-major 2-D tensor of doubles. Vectors are 1xN or Nx1.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Tensor(std::size_t r, std::size_t c, std::vector<double> d);

  static Tensor zeros(std::size_t r, std::size_t c) { return Tensor(r, c); }
  static Tensor full(std::size_t r, std::size_t c, double v);
  static Tensor scalar(double v);
  static Tensor row(std::vector<double> v);
  static Tensor column(std::vector<double> v);

  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  bool is_scalar() const { return rows == 1 && cols == 1; }

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::string shape_str() const;
};

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

bool all_finite(const Tensor& t);

// Parameter init: uniform in +-sqrt(6/(fan_in+fan_out)).
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::uint64_t seed);

}  // namespace cfgx
