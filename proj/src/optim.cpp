#include "bagnet/optim.hpp"

#include <cmath>

#include "bagnet/errors.hpp"

namespace bagnet::nn {

AdaGrad::AdaGrad(std::vector<Parameter*> params, double lr, double eps)
    : params_(std::move(params)), lr_(lr), eps_(eps) {
  if (lr_ <= 0.0) throw NumericalError("AdaGrad: learning rate must be positive");
  accum_.reserve(params_.size());
  for (const Parameter* p : params_) accum_.emplace_back(p->value.shape());
}

void AdaGrad::step() {
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Parameter& p = *params_[pi];
    Tensor& acc = accum_[pi];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad[j];
      if (!std::isfinite(g))
        throw NumericalError("non-finite gradient in parameter " + p.name);
      acc[j] += g * g;
      p.value[j] -= lr_ * g / std::sqrt(acc[j] + eps_);
      p.grad[j] = 0.0;
    }
  }
  ++steps_;
}

}  // namespace bagnet::nn
