#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bagnet::nn {

// Dense row-major tensor of 64-bit reals. Shapes are lists of positive
// dimension sizes; a scalar is represented as shape {1}.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor scalar(double v);
  static Tensor vector(std::vector<double> v);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Rank-2 accessors.
  std::size_t rows() const;
  std::size_t cols() const;
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  void fill(double v);
  double item() const;  // value of a scalar tensor

  // Throws NumericalError if any entry is NaN or infinite.
  void ensure_finite(const std::string& what) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

}  // namespace bagnet::nn
