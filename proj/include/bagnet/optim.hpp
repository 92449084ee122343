#pragma once

#include <cstdint>
#include <vector>

#include "bagnet/autograd.hpp"

namespace bagnet::nn {

// Adaptive per-parameter step: accumulate squared gradients and scale the
// learning rate by 1/sqrt(accum + eps). Gradients are zeroed after each step.
class AdaGrad {
 public:
  explicit AdaGrad(std::vector<Parameter*> params, double lr = 0.1,
                   double eps = 1e-8);

  // Throws NumericalError naming the parameter if any gradient is NaN/Inf.
  void step();

  double learning_rate() const { return lr_; }
  std::uint64_t steps() const { return steps_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor> accum_;
  double lr_;
  double eps_;
  std::uint64_t steps_ = 0;
};

}  // namespace bagnet::nn
