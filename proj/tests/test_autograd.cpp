#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "bagnet/autograd.hpp"
#include "bagnet/rng.hpp"

using namespace bagnet::nn;
using bagnet::Rng;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("matmul identity and hand-checked product") {
  Tape tape;
  Var identity = tape.constant(Tensor({2, 2}, {1, 0, 0, 1}));
  Var a = tape.constant(Tensor({2, 2}, {3, 1, 4, 1}));
  CHECK(tape.value(tape.matmul(identity, a)).values() == std::vector<double>{3, 1, 4, 1});

  Var m = tape.constant(Tensor({2, 2}, {1, 2, 3, 4}));
  Var v = tape.constant(Tensor({2, 1}, {1, 1}));
  CHECK(tape.value(tape.matmul(m, v)).values() == std::vector<double>{3, 7});

  CHECK_THROWS_AS((void)tape.matmul(m, tape.constant(Tensor({3, 1}))),
                  std::invalid_argument);
}

TEST_CASE("matmul backward matches finite differences") {
  Rng rng(1);
  Parameter a("a", random_tensor({3, 4}, rng));
  Parameter b("b", random_tensor({4, 2}, rng));
  auto loss = [&] {
    Tape tape;
    Var prod = tape.matmul(tape.param(a), tape.param(b));
    // Weighted sum keeps every entry in play.
    Var weights = tape.constant(Tensor({3, 2}, {0.3, -0.7, 1.1, 0.2, -0.4, 0.9}));
    Var out = tape.sum(tape.mul(prod, weights));
    tape.backward(out);
    return tape.value(out).item();
  };
  const auto report = grad_check(loss, {&a, &b});
  CHECK(report.max_rel_err < 1e-5);
}

TEST_CASE("conv1d_narrow constant and zero cases") {
  Tape tape;
  Var e = tape.constant(Tensor({2, 4}, std::vector<double>(8, 1.0)));
  Var h = tape.constant(Tensor({2, 2}, std::vector<double>(4, 1.0)));
  CHECK(tape.value(tape.conv1d_narrow(e, h)).values() == std::vector<double>{4, 4, 4});

  Var hz = tape.constant(Tensor({2, 2}));
  CHECK(tape.value(tape.conv1d_narrow(e, hz)).values() == std::vector<double>{0, 0, 0});

  // Filter wider than the context is a degenerate-context error.
  Var wide = tape.constant(Tensor({2, 5}));
  CHECK_THROWS_AS((void)tape.conv1d_narrow(e, wide), std::invalid_argument);
}

TEST_CASE("conv1d_narrow gradients match finite differences") {
  Rng rng(2);
  Parameter e("e", random_tensor({3, 6}, rng));
  Parameter h("h", random_tensor({3, 3}, rng));
  auto loss = [&] {
    Tape tape;
    Var map = tape.conv1d_narrow(tape.param(e), tape.param(h));
    Var weights = tape.constant(Tensor({4}, {0.5, -1.0, 0.25, 2.0}));
    Var out = tape.sum(tape.mul(map, weights));
    tape.backward(out);
    return tape.value(out).item();
  };
  CHECK(grad_check(loss, {&e, &h}).max_rel_err < 1e-5);
}

TEST_CASE("kmax_pool selects top-k in original order") {
  Tape tape;
  Var x = tape.constant(Tensor::vector({3, 1, 4, 1, 5}));
  CHECK(tape.value(tape.kmax_pool(x, 1)).values() == std::vector<double>{5});
  CHECK(tape.value(tape.kmax_pool(x, 3)).values() == std::vector<double>{3, 4, 5});
  CHECK_THROWS_AS((void)tape.kmax_pool(x, 0), std::invalid_argument);
}

TEST_CASE("kmax_pool ties break leftmost and gradient is k-sparse") {
  Tape tape;
  Var x = tape.constant(Tensor::vector({2, 2, 1}));
  Var pooled = tape.kmax_pool(x, 2);
  CHECK(tape.value(pooled).values() == std::vector<double>{2, 2});

  Var weights = tape.constant(Tensor::vector({1.0, 3.0}));
  Var loss = tape.sum(tape.mul(pooled, weights));
  tape.backward(loss);
  CHECK(tape.grad(x).values() == std::vector<double>{1.0, 3.0, 0.0});
}

TEST_CASE("kmax_pool pads short inputs with the lowest sentinel, no gradient") {
  Tape tape;
  Var x = tape.constant(Tensor::vector({7, 9}));
  Var pooled = tape.kmax_pool(x, 4);
  const auto& v = tape.value(pooled);
  CHECK(v[0] == 7);
  CHECK(v[1] == 9);
  CHECK(v[2] == std::numeric_limits<double>::lowest());
  CHECK(v[3] == std::numeric_limits<double>::lowest());
  Var loss = tape.sum(pooled);
  tape.backward(loss);
  CHECK(tape.grad(x).values() == std::vector<double>{1.0, 1.0});
}

TEST_CASE("kmax_pool gradient sparsity on random inputs") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.uniform_index(8);
    const int k = 1 + static_cast<int>(rng.uniform_index(n));
    Tape tape;
    Var x = tape.constant(random_tensor({n}, rng));
    Var pooled = tape.kmax_pool(x, k);
    Var weights = tape.constant(random_tensor({static_cast<std::size_t>(k)}, rng, 0.5, 2.0));
    tape.backward(tape.sum(tape.mul(pooled, weights)));
    int nonzero = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (tape.grad(x)[i] != 0.0) ++nonzero;
    CHECK(nonzero == k);
  }
}

TEST_CASE("activation values and gradients") {
  Tape tape;
  Var zero = tape.constant(Tensor::vector({0.0}));
  CHECK(tape.value(tape.sigmoid(zero))[0] == 0.5);

  Var neg = tape.constant(Tensor::vector({-1.0}));
  Var r = tape.relu(neg);
  CHECK(tape.value(r)[0] == 0.0);
  tape.backward(tape.sum(r));
  CHECK(tape.grad(neg)[0] == 0.0);
}

TEST_CASE("tanh/sigmoid/relu gradients match finite differences") {
  Rng rng(4);
  Parameter x("x", random_tensor({6}, rng, -2.0, 2.0));
  for (int which = 0; which < 3; ++which) {
    auto loss = [&] {
      Tape tape;
      Var v = tape.param(x);
      Var y = which == 0 ? tape.tanh(v) : which == 1 ? tape.sigmoid(v) : tape.relu(v);
      Var w = tape.constant(Tensor::vector({0.9, -0.3, 0.4, 1.2, -0.8, 0.1}));
      Var out = tape.sum(tape.mul(y, w));
      tape.backward(out);
      return tape.value(out).item();
    };
    CHECK(grad_check(loss, {&x}).max_rel_err < 1e-6);
  }
}

TEST_CASE("softmax symmetry, stability, normalization") {
  Tape tape;
  Var equal = tape.constant(Tensor::vector({0, 0, 0}));
  for (double p : tape.value(tape.softmax(equal)).values())
    CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  Var big = tape.constant(Tensor::vector({1000, 0}));
  const auto& probs = tape.value(tape.softmax(big));
  CHECK(probs[0] == doctest::Approx(1.0));
  CHECK(probs[1] == doctest::Approx(0.0));
  CHECK(std::isfinite(probs[0]));

  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Tape t2;
    Var x = t2.constant(random_tensor({7}, rng, -30.0, 30.0));
    const auto& y = t2.value(t2.softmax(x));
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) total += y[i];
    CHECK(std::fabs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("softmax Jacobian matches finite differences") {
  Rng rng(6);
  Parameter x("x", random_tensor({5}, rng, -2.0, 2.0));
  auto loss = [&] {
    Tape tape;
    Var y = tape.softmax(tape.param(x));
    Var w = tape.constant(Tensor::vector({1.5, -0.5, 0.7, 0.1, -1.1}));
    Var out = tape.sum(tape.mul(y, w));
    tape.backward(out);
    return tape.value(out).item();
  };
  CHECK(grad_check(loss, {&x}).max_rel_err < 1e-5);
}

TEST_CASE("bce values") {
  Tape tape;
  Var almost_one = tape.constant(Tensor::scalar(1.0 - 1e-7));
  CHECK(tape.value(tape.bce(1.0, almost_one)).item() == doctest::Approx(0.0).epsilon(1e-6));

  Var half = tape.constant(Tensor::scalar(0.5));
  CHECK(tape.value(tape.bce(0.0, half)).item() == doctest::Approx(std::log(2.0)));

  CHECK_THROWS_AS((void)tape.bce(0.5, half), std::invalid_argument);
}

TEST_CASE("bce gradient matches finite differences on 100 random pairs") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const double y = rng.bernoulli(0.5) ? 1.0 : 0.0;
    Parameter p("p", Tensor::scalar(rng.uniform(0.05, 0.95)));
    auto loss = [&] {
      Tape tape;
      Var out = tape.bce(y, tape.param(p));
      tape.backward(out);
      return tape.value(out).item();
    };
    CHECK(grad_check(loss, {&p}).max_rel_err < 1e-5);
  }
}

TEST_CASE("grad_check on a linear layer is tight") {
  Rng rng(8);
  Parameter w("w", random_tensor({4, 6}, rng));
  Parameter b("b", random_tensor({4}, rng));
  const Tensor x = random_tensor({6}, rng);
  auto loss = [&] {
    Tape tape;
    Var y = tape.add(tape.matvec(tape.param(w), tape.constant(x)), tape.param(b));
    Var weights = tape.constant(Tensor::vector({0.25, -1.0, 0.5, 2.0}));
    Var out = tape.sum(tape.mul(y, weights));
    tape.backward(out);
    return tape.value(out).item();
  };
  CHECK(grad_check(loss, {&w, &b}).max_rel_err < 1e-7);
}

TEST_CASE("composite ops: slice/concat/row/pick/dot/smul gradients") {
  Rng rng(9);
  Parameter m("m", random_tensor({3, 4}, rng));
  Parameter v("v", random_tensor({4}, rng));
  auto loss = [&] {
    Tape tape;
    Var r1 = tape.row(tape.param(m), 1);
    Var s = tape.dot(r1, tape.param(v));
    Var joined = tape.concat({r1, tape.param(v)});
    Var window = tape.slice(joined, 2, 4);
    Var scaled = tape.smul(s, window);
    Var out = tape.add(tape.sum(scaled), tape.pick(tape.param(v), 2));
    tape.backward(out);
    return tape.value(out).item();
  };
  CHECK(grad_check(loss, {&m, &v}).max_rel_err < 1e-6);
}

TEST_CASE("forward passes are deterministic given identical parameters") {
  Rng rng(10);
  const Tensor w = random_tensor({5, 5}, rng);
  const Tensor x = random_tensor({5}, rng);
  std::vector<double> first;
  for (int rep = 0; rep < 3; ++rep) {
    Tape tape;
    Var y = tape.softmax(tape.tanh(tape.matvec(tape.constant(w), tape.constant(x))));
    if (rep == 0) first = tape.value(y).values();
    else CHECK(tape.value(y).values() == first);
  }
}
