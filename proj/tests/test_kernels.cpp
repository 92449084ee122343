#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "bagnet/kernels.hpp"
#include "bagnet/rng.hpp"

using bagnet::Rng;
namespace kernels = bagnet::nn::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

TEST_CASE("openmp matmul is bit-identical to the serial reference") {
  Rng rng(42);
  // Both below and above the parallel grain size.
  for (auto [m, k, n] : {std::tuple<std::size_t, std::size_t, std::size_t>{3, 4, 2},
                         {7, 9, 5},
                         {64, 64, 64},
                         {130, 40, 33}}) {
    const auto a = random_vec(m * k, rng);
    const auto b = random_vec(k * n, rng);
    std::vector<double> c(m * n), c_ref(m * n);
    kernels::matmul(a.data(), b.data(), c.data(), m, k, n);
    kernels::serial::matmul(a.data(), b.data(), c_ref.data(), m, k, n);
    CHECK(c == c_ref);

    const auto gc = random_vec(m * n, rng);
    std::vector<double> ga(m * k, 0.0), ga_ref(m * k, 0.0);
    kernels::matmul_grad_a(gc.data(), b.data(), ga.data(), m, k, n);
    kernels::serial::matmul_grad_a(gc.data(), b.data(), ga_ref.data(), m, k, n);
    CHECK(ga == ga_ref);

    std::vector<double> gb(k * n, 0.0), gb_ref(k * n, 0.0);
    kernels::matmul_grad_b(a.data(), gc.data(), gb.data(), m, k, n);
    kernels::serial::matmul_grad_b(a.data(), gc.data(), gb_ref.data(), m, k, n);
    CHECK(gb == gb_ref);
  }
}

TEST_CASE("openmp conv1d is bit-identical to the serial reference") {
  Rng rng(43);
  for (auto [d, s, w] : {std::tuple<std::size_t, std::size_t, std::size_t>{2, 4, 2},
                         {3, 10, 3},
                         {64, 300, 3}}) {
    const auto e = random_vec(d * s, rng);
    const auto h = random_vec(d * w, rng);
    const std::size_t len = s - w + 1;
    std::vector<double> out(len), out_ref(len);
    kernels::conv1d_narrow(e.data(), h.data(), out.data(), d, s, w);
    kernels::serial::conv1d_narrow(e.data(), h.data(), out_ref.data(), d, s, w);
    CHECK(out == out_ref);

    const auto gout = random_vec(len, rng);
    std::vector<double> ge(d * s, 0.0), ge_ref(d * s, 0.0);
    kernels::conv1d_grad_e(gout.data(), h.data(), ge.data(), d, s, w);
    kernels::serial::conv1d_grad_e(gout.data(), h.data(), ge_ref.data(), d, s, w);
    CHECK(ge == ge_ref);

    std::vector<double> gh(d * w, 0.0), gh_ref(d * w, 0.0);
    kernels::conv1d_grad_h(gout.data(), e.data(), gh.data(), d, s, w);
    kernels::serial::conv1d_grad_h(gout.data(), e.data(), gh_ref.data(), d, s, w);
    CHECK(gh == gh_ref);
  }
}

TEST_CASE("serial matmul against hand-written triple loop") {
  Rng rng(44);
  const std::size_t m = 5, k = 6, n = 4;
  const auto a = random_vec(m * k, rng);
  const auto b = random_vec(k * n, rng);
  std::vector<double> c(m * n);
  kernels::serial::matmul(a.data(), b.data(), c.data(), m, k, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      CHECK(c[i * n + j] == doctest::Approx(acc).epsilon(1e-14));
    }
  }
}
