#include "bagnet/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bagnet/kernels.hpp"

namespace bagnet::nn {

Var Tape::push(Tensor value, std::function<void(Tape&)> bw, Parameter* bound) {
  Node node;
  node.grad = Tensor(value.shape());
  node.value = std::move(value);
  node.backward = std::move(bw);
  node.bound = bound;
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::constant(Tensor v) { return push(std::move(v), nullptr); }

Var Tape::param(Parameter& p) {
  auto it = leaves_.find(&p);
  if (it != leaves_.end()) return Var{it->second};
  Var v = push(p.value, nullptr, &p);
  leaves_.emplace(&p, v.id);
  return v;
}

void Tape::backward(Var loss) {
  if (nodes_[loss.id].value.size() != 1)
    throw std::invalid_argument("backward: loss must be scalar");
  nodes_[loss.id].grad[0] = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& node = nodes_[i];
    if (node.backward) node.backward(*this);
    if (node.bound) {
      const std::size_t n = node.grad.size();
      for (std::size_t j = 0; j < n; ++j) node.bound->grad[j] += node.grad[j];
    }
  }
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& ta = nodes_[a.id].value;
  const Tensor& tb = nodes_[b.id].value;
  if (ta.rank() != 2 || tb.rank() != 2 || ta.cols() != tb.rows())
    throw std::invalid_argument("matmul: dimension mismatch");
  const std::size_t m = ta.rows(), k = ta.cols(), n = tb.cols();
  Tensor out({m, n});
  kernels::matmul(ta.data(), tb.data(), out.data(), m, k, n);
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [a, b, out_id, m, k, n](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    kernels::matmul_grad_a(g.data(), t.nodes_[b.id].value.data(),
                           t.nodes_[a.id].grad.data(), m, k, n);
    kernels::matmul_grad_b(t.nodes_[a.id].value.data(), g.data(),
                           t.nodes_[b.id].grad.data(), m, k, n);
  });
}

Var Tape::matvec(Var mv, Var x) {
  const Tensor& tm = nodes_[mv.id].value;
  const Tensor& tx = nodes_[x.id].value;
  if (tm.rank() != 2 || tx.rank() != 1 || tm.cols() != tx.size())
    throw std::invalid_argument("matvec: dimension mismatch");
  const std::size_t r = tm.rows(), c = tm.cols();
  Tensor out({r});
  kernels::matmul(tm.data(), tx.data(), out.data(), r, c, 1);
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [mv, x, out_id, r, c](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    kernels::matmul_grad_a(g.data(), t.nodes_[x.id].value.data(),
                           t.nodes_[mv.id].grad.data(), r, c, 1);
    kernels::matmul_grad_b(t.nodes_[mv.id].value.data(), g.data(),
                           t.nodes_[x.id].grad.data(), r, c, 1);
  });
}

Var Tape::dot(Var x, Var y) {
  const Tensor& tx = nodes_[x.id].value;
  const Tensor& ty = nodes_[y.id].value;
  if (tx.rank() != 1 || ty.rank() != 1 || tx.size() != ty.size())
    throw std::invalid_argument("dot: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < tx.size(); ++i) acc += tx[i] * ty[i];
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(Tensor::scalar(acc), [x, y, out_id](Tape& t) {
    const double g = t.nodes_[out_id].grad[0];
    const Tensor& vx = t.nodes_[x.id].value;
    const Tensor& vy = t.nodes_[y.id].value;
    Tensor& gx = t.nodes_[x.id].grad;
    Tensor& gy = t.nodes_[y.id].grad;
    for (std::size_t i = 0; i < vx.size(); ++i) {
      gx[i] += g * vy[i];
      gy[i] += g * vx[i];
    }
  });
}

Var Tape::add(Var a, Var b) {
  const Tensor& ta = nodes_[a.id].value;
  const Tensor& tb = nodes_[b.id].value;
  if (!ta.same_shape(tb)) throw std::invalid_argument("add: shape mismatch");
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i] + tb[i];
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [a, b, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    Tensor& ga = t.nodes_[a.id].grad;
    Tensor& gb = t.nodes_[b.id].grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] += g[i];
    }
  });
}

Var Tape::sub(Var a, Var b) {
  const Tensor& ta = nodes_[a.id].value;
  const Tensor& tb = nodes_[b.id].value;
  if (!ta.same_shape(tb)) throw std::invalid_argument("sub: shape mismatch");
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i] - tb[i];
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [a, b, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    Tensor& ga = t.nodes_[a.id].grad;
    Tensor& gb = t.nodes_[b.id].grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] -= g[i];
    }
  });
}

Var Tape::mul(Var a, Var b) {
  const Tensor& ta = nodes_[a.id].value;
  const Tensor& tb = nodes_[b.id].value;
  if (!ta.same_shape(tb)) throw std::invalid_argument("mul: shape mismatch");
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i] * tb[i];
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [a, b, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    const Tensor& va = t.nodes_[a.id].value;
    const Tensor& vb = t.nodes_[b.id].value;
    Tensor& ga = t.nodes_[a.id].grad;
    Tensor& gb = t.nodes_[b.id].grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * vb[i];
      gb[i] += g[i] * va[i];
    }
  });
}

Var Tape::scale(Var a, double c) {
  const Tensor& ta = nodes_[a.id].value;
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i] * c;
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [a, c, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    Tensor& ga = t.nodes_[a.id].grad;
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * c;
  });
}

Var Tape::smul(Var scalar, Var x) {
  const Tensor& ts = nodes_[scalar.id].value;
  const Tensor& tx = nodes_[x.id].value;
  if (ts.size() != 1) throw std::invalid_argument("smul: first operand must be scalar");
  Tensor out(tx.shape());
  const double s = ts[0];
  for (std::size_t i = 0; i < tx.size(); ++i) out[i] = s * tx[i];
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [scalar, x, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    const double s = t.nodes_[scalar.id].value[0];
    const Tensor& vx = t.nodes_[x.id].value;
    Tensor& gs = t.nodes_[scalar.id].grad;
    Tensor& gx = t.nodes_[x.id].grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      gs[0] += g[i] * vx[i];
      gx[i] += g[i] * s;
    }
  });
}

Var Tape::sum(Var x) {
  const Tensor& tx = nodes_[x.id].value;
  double acc = 0.0;
  for (std::size_t i = 0; i < tx.size(); ++i) acc += tx[i];
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(Tensor::scalar(acc), [x, out_id](Tape& t) {
    const double g = t.nodes_[out_id].grad[0];
    Tensor& gx = t.nodes_[x.id].grad;
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
}

Var Tape::mean(Var x) {
  const std::size_t n = nodes_[x.id].value.size();
  return scale(sum(x), 1.0 / static_cast<double>(n));
}

Var Tape::concat(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no parts");
  std::size_t total = 0;
  for (Var p : parts) total += nodes_[p.id].value.size();
  Tensor out({total});
  std::size_t off = 0;
  for (Var p : parts) {
    const Tensor& tp = nodes_[p.id].value;
    for (std::size_t i = 0; i < tp.size(); ++i) out[off + i] = tp[i];
    off += tp.size();
  }
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [parts, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    std::size_t off = 0;
    for (Var p : parts) {
      Tensor& gp = t.nodes_[p.id].grad;
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[off + i];
      off += gp.size();
    }
  });
}

Var Tape::slice(Var x, std::size_t start, std::size_t len) {
  const Tensor& tx = nodes_[x.id].value;
  if (tx.rank() != 1 || len == 0 || start + len > tx.size())
    throw std::invalid_argument("slice: out of range");
  Tensor out({len});
  for (std::size_t i = 0; i < len; ++i) out[i] = tx[start + i];
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [x, start, len, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    Tensor& gx = t.nodes_[x.id].grad;
    for (std::size_t i = 0; i < len; ++i) gx[start + i] += g[i];
  });
}

Var Tape::row(Var m, std::size_t i) {
  const Tensor& tm = nodes_[m.id].value;
  if (tm.rank() != 2 || i >= tm.rows()) throw std::invalid_argument("row: out of range");
  const std::size_t c = tm.cols();
  Tensor out({c});
  for (std::size_t j = 0; j < c; ++j) out[j] = tm.at(i, j);
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [m, i, c, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    Tensor& gm = t.nodes_[m.id].grad;
    for (std::size_t j = 0; j < c; ++j) gm.at(i, j) += g[j];
  });
}

Var Tape::pick(Var x, std::size_t i) {
  const Tensor& tx = nodes_[x.id].value;
  if (i >= tx.size()) throw std::invalid_argument("pick: out of range");
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(Tensor::scalar(tx[i]), [x, i, out_id](Tape& t) {
    t.nodes_[x.id].grad[i] += t.nodes_[out_id].grad[0];
  });
}

Var Tape::relu(Var x) {
  const Tensor& tx = nodes_[x.id].value;
  Tensor out(tx.shape());
  for (std::size_t i = 0; i < tx.size(); ++i) out[i] = tx[i] > 0.0 ? tx[i] : 0.0;
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [x, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    const Tensor& vx = t.nodes_[x.id].value;
    Tensor& gx = t.nodes_[x.id].grad;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (vx[i] > 0.0) gx[i] += g[i];
  });
}

Var Tape::tanh(Var x) {
  const Tensor& tx = nodes_[x.id].value;
  Tensor out(tx.shape());
  for (std::size_t i = 0; i < tx.size(); ++i) out[i] = std::tanh(tx[i]);
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [x, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    const Tensor& y = t.nodes_[out_id].value;
    Tensor& gx = t.nodes_[x.id].grad;
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var Tape::sigmoid(Var x) {
  const Tensor& tx = nodes_[x.id].value;
  Tensor out(tx.shape());
  for (std::size_t i = 0; i < tx.size(); ++i) {
    const double v = tx[i];
    out[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                      : std::exp(v) / (1.0 + std::exp(v));
  }
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [x, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    const Tensor& y = t.nodes_[out_id].value;
    Tensor& gx = t.nodes_[x.id].grad;
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var Tape::softmax(Var x) {
  const Tensor& tx = nodes_[x.id].value;
  if (tx.rank() != 1 || tx.size() == 0)
    throw std::invalid_argument("softmax: rank-1 input required");
  Tensor out(tx.shape());
  double mx = tx[0];
  for (std::size_t i = 1; i < tx.size(); ++i) mx = std::max(mx, tx[i]);
  double denom = 0.0;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    out[i] = std::exp(tx[i] - mx);
    denom += out[i];
  }
  for (std::size_t i = 0; i < tx.size(); ++i) out[i] /= denom;
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [x, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    const Tensor& y = t.nodes_[out_id].value;
    Tensor& gx = t.nodes_[x.id].grad;
    double gy = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gy += g[i] * y[i];
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += y[i] * (g[i] - gy);
  });
}

Var Tape::conv1d_narrow(Var embeds, Var filter) {
  const Tensor& te = nodes_[embeds.id].value;
  const Tensor& th = nodes_[filter.id].value;
  if (te.rank() != 2 || th.rank() != 2 || te.rows() != th.rows())
    throw std::invalid_argument("conv1d_narrow: dimension mismatch");
  const std::size_t d = te.rows(), s = te.cols(), w = th.cols();
  if (w > s)
    throw std::invalid_argument("conv1d_narrow: filter wider than context (degenerate context)");
  Tensor out({s - w + 1});
  kernels::conv1d_narrow(te.data(), th.data(), out.data(), d, s, w);
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [embeds, filter, out_id, d, s, w](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    kernels::conv1d_grad_e(g.data(), t.nodes_[filter.id].value.data(),
                           t.nodes_[embeds.id].grad.data(), d, s, w);
    kernels::conv1d_grad_h(g.data(), t.nodes_[embeds.id].value.data(),
                           t.nodes_[filter.id].grad.data(), d, s, w);
  });
}

Var Tape::kmax_pool(Var x, int k) {
  if (k <= 0) throw std::invalid_argument("kmax_pool: k must be positive");
  const Tensor& tx = nodes_[x.id].value;
  if (tx.rank() != 1 || tx.size() == 0)
    throw std::invalid_argument("kmax_pool: non-empty rank-1 input required");
  const std::size_t n = tx.size();
  const auto kk = static_cast<std::size_t>(k);

  // Rank positions by (value desc, index asc): leftmost wins ties.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return tx[a] > tx[b]; });
  std::vector<std::size_t> selected(order.begin(),
                                    order.begin() + std::min(kk, n));
  std::sort(selected.begin(), selected.end());  // original left-to-right order

  Tensor out({kk});
  for (std::size_t i = 0; i < kk; ++i)
    out[i] = i < selected.size() ? tx[selected[i]]
                                 : std::numeric_limits<double>::lowest();
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(std::move(out), [x, selected, out_id](Tape& t) {
    const Tensor& g = t.nodes_[out_id].grad;
    Tensor& gx = t.nodes_[x.id].grad;
    for (std::size_t i = 0; i < selected.size(); ++i) gx[selected[i]] += g[i];
  });
}

Var Tape::pick_max_as_scalar(Var x) {
  const Tensor& tx = nodes_[x.id].value;
  if (tx.rank() != 1 || tx.size() == 0)
    throw std::invalid_argument("max1: non-empty rank-1 input required");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < tx.size(); ++i)
    if (tx[i] > tx[arg]) arg = i;
  return pick(x, arg);
}

Var Tape::bce(double y, Var yhat) {
  if (y != 0.0 && y != 1.0) throw std::invalid_argument("bce: y must be 0 or 1");
  const Tensor& tp = nodes_[yhat.id].value;
  if (tp.size() != 1) throw std::invalid_argument("bce: yhat must be scalar");
  const double p = std::clamp(tp[0], kBceEps, 1.0 - kBceEps);
  const double loss = -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(Tensor::scalar(loss), [yhat, y, p, out_id](Tape& t) {
    const double g = t.nodes_[out_id].grad[0];
    t.nodes_[yhat.id].grad[0] += g * (-(y / p) + (1.0 - y) / (1.0 - p));
  });
}

Var Tape::neg_log(Var p) {
  const Tensor& tp = nodes_[p.id].value;
  if (tp.size() != 1) throw std::invalid_argument("neg_log: scalar required");
  const double v = std::max(tp[0], kBceEps);
  const auto out_id = static_cast<std::uint32_t>(nodes_.size());
  return push(Tensor::scalar(-std::log(v)), [p, v, out_id](Tape& t) {
    t.nodes_[p.id].grad[0] += t.nodes_[out_id].grad[0] * (-1.0 / v);
  });
}

GradCheckResult grad_check(const std::function<double()>& loss_fn,
                           const std::vector<Parameter*>& params, double step) {
  for (Parameter* p : params) p->zero_grad();
  loss_fn();
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (Parameter* p : params) analytic.push_back(p->grad);

  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter& p = *params[pi];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double saved = p.value[j];
      p.value[j] = saved + step;
      const double up = loss_fn();
      p.value[j] = saved - step;
      const double down = loss_fn();
      p.value[j] = saved;
      const double fd = (up - down) / (2.0 * step);
      const double a = analytic[pi][j];
      const double denom = std::max({std::fabs(a), std::fabs(fd), 1e-6});
      const double rel = std::fabs(a - fd) / denom;
      if (rel > result.max_rel_err) {
        result.max_rel_err = rel;
        result.worst = p.name + "[" + std::to_string(j) + "]";
      }
    }
  }
  return result;
}

}  // namespace bagnet::nn
