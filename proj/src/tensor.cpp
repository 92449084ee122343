#include "bagnet/tensor.hpp"

#include <cmath>
#include <stdexcept>

#include "bagnet/errors.hpp"

namespace bagnet::nn {

namespace {
std::size_t shape_count(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw std::invalid_argument("Tensor: empty shape");
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0) throw std::invalid_argument("Tensor: zero dimension");
    n *= d;
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_count(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (shape_count(shape_) != data_.size())
    throw std::invalid_argument("Tensor: data length does not match shape");
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::vector(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor({n}, std::move(v));
}

std::size_t Tensor::rows() const {
  if (rank() != 2) throw std::invalid_argument("Tensor: rows() requires rank 2");
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw std::invalid_argument("Tensor: cols() requires rank 2");
  return shape_[1];
}

void Tensor::fill(double v) {
  for (double& x : data_) x = v;
}

double Tensor::item() const {
  if (size() != 1) throw std::invalid_argument("Tensor: item() requires a scalar");
  return data_[0];
}

void Tensor::ensure_finite(const std::string& what) const {
  for (double x : data_) {
    if (!std::isfinite(x)) throw NumericalError("non-finite value in " + what);
  }
}

}  // namespace bagnet::nn
