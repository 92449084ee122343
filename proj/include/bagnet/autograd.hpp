#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bagnet/tensor.hpp"

namespace bagnet::nn {

// A named trainable tensor together with its gradient accumulator.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

  void zero_grad() { grad.fill(0.0); }
};

// Handle to a node on a Tape.
struct Var {
  std::uint32_t id = 0xffffffff;
};

// Reverse-mode tape. Forward calls append nodes in execution order;
// backward() walks them in reverse and accumulates gradients of the scalar
// loss into every Parameter that was brought onto the tape via param().
// A tape is built per training example and discarded afterwards.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor v);
  Var param(Parameter& p);  // memoized: one node per parameter per tape

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }
  std::size_t size() const { return nodes_.size(); }

  // loss must be a scalar node. Seeds d(loss)/d(loss)=1 and sweeps backward.
  void backward(Var loss);

  Var matmul(Var a, Var b);
  Var matvec(Var m, Var x);
  Var dot(Var x, Var y);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double c);
  Var smul(Var scalar, Var x);  // scalar Var times tensor
  Var sum(Var x);
  Var mean(Var x);
  Var concat(const std::vector<Var>& parts);  // rank-1 result
  Var slice(Var x, std::size_t start, std::size_t len);  // rank-1 window
  Var row(Var m, std::size_t i);
  Var pick(Var x, std::size_t i);
  Var relu(Var x);
  Var tanh(Var x);
  Var sigmoid(Var x);
  Var softmax(Var x);
  Var conv1d_narrow(Var embeds, Var filter);
  Var kmax_pool(Var x, int k);
  Var max1(Var x) { return pick_max_as_scalar(x); }
  Var bce(double y, Var yhat);  // y in {0,1}; yhat scalar probability
  Var neg_log(Var p);           // -log(max(p, eps))

  static constexpr double kBceEps = 1e-7;

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&)> backward;
    Parameter* bound = nullptr;
  };

  Var push(Tensor value, std::function<void(Tape&)> bw, Parameter* bound = nullptr);
  Var pick_max_as_scalar(Var x);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::uint32_t> leaves_;
};

// Central finite differences (h defaults to 1e-5) against analytic gradients
// for every entry of every parameter; returns the worst relative error.
// loss_fn must be deterministic, and each call must recompute the loss and
// accumulate its gradients into the given parameters.
struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst;  // "param[index]"
};

GradCheckResult grad_check(const std::function<double()>& loss_fn,
                           const std::vector<Parameter*>& params,
                           double step = 1e-5);

}  // namespace bagnet::nn
