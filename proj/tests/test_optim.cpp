#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "bagnet/autograd.hpp"
#include "bagnet/checkpoint.hpp"
#include "bagnet/errors.hpp"
#include "bagnet/optim.hpp"

using namespace bagnet::nn;

TEST_CASE("zero gradient leaves parameters unchanged") {
  Parameter p("p", Tensor::vector({1.0, -2.0, 3.0}));
  AdaGrad opt({&p}, 0.1);
  opt.step();
  CHECK(p.value.values() == std::vector<double>{1.0, -2.0, 3.0});
}

TEST_CASE("single adagrad step follows the update rule") {
  Parameter p("p", Tensor::scalar(1.0));
  AdaGrad opt({&p}, 0.1);
  p.grad[0] = 1.0;
  opt.step();
  const double expected = 1.0 - 0.1 / std::sqrt(1.0 + 1e-8);
  CHECK(p.value[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(p.grad[0] == 0.0);  // gradients zeroed after the step
}

TEST_CASE("loss on a quadratic decreases monotonically over 100 steps") {
  // f(a, b) = (a - 3)^2 + 2 (b + 1)^2
  Parameter a("a", Tensor::scalar(10.0));
  Parameter b("b", Tensor::scalar(-5.0));
  AdaGrad opt({&a, &b}, 0.5);
  auto f = [&] {
    const double da = a.value[0] - 3.0, db = b.value[0] + 1.0;
    return da * da + 2.0 * db * db;
  };
  double prev = f();
  for (int i = 0; i < 100; ++i) {
    a.grad[0] = 2.0 * (a.value[0] - 3.0);
    b.grad[0] = 4.0 * (b.value[0] + 1.0);
    opt.step();
    const double now = f();
    CHECK(now <= prev);
    prev = now;
  }
  CHECK(prev < 1.0);
}

TEST_CASE("NaN gradient raises a numerical failure naming the parameter") {
  Parameter p("the.culprit", Tensor::scalar(1.0));
  AdaGrad opt({&p}, 0.1);
  p.grad[0] = std::nan("");
  CHECK_THROWS_WITH_AS(opt.step(),
                       doctest::Contains("the.culprit"), bagnet::NumericalError);
}

TEST_CASE("checkpoint round-trips names, shapes and exact values") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "bagnet_ckpt_test.bin";
  Parameter w("layer.w", Tensor({2, 3}, {0.1, -0.25, 1e-300, 3.125, -7.5, 0.0}));
  Parameter b("layer.b", Tensor::vector({42.0}));
  save_checkpoint(path.string(), {&w, &b});

  auto entries = load_checkpoint(path.string());
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].first == "layer.w");
  CHECK(entries[0].second.shape() == std::vector<std::size_t>{2, 3});
  CHECK(entries[0].second.values() == w.value.values());
  CHECK(entries[1].first == "layer.b");
  CHECK(entries[1].second.values() == b.value.values());

  Parameter w2("layer.w", Tensor({2, 3}));
  Parameter b2("layer.b", Tensor({1}));
  load_checkpoint_into(path.string(), {&w2, &b2});
  CHECK(w2.value.values() == w.value.values());
  CHECK(b2.value[0] == 42.0);

  Parameter other("missing", Tensor({1}));
  CHECK_THROWS_AS(load_checkpoint_into(path.string(), {&other}), bagnet::DataError);
  fs::remove(path);
}

TEST_CASE("checkpoint header carries the magic bytes") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "bagnet_ckpt_magic.bin";
  Parameter p("x", Tensor::scalar(1.0));
  save_checkpoint(path.string(), {&p});
  FILE* f = std::fopen(path.string().c_str(), "rb");
  char magic[9] = {};
  REQUIRE(std::fread(magic, 1, 8, f) == 8);
  std::fclose(f);
  CHECK(std::string(magic, 8) == "BAGNET01");
  fs::remove(path);
}
