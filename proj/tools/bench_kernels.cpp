// Benchmark comparing the serial reference kernels against the OpenMP
// entry points. The OpenMP versions fall back to the serial loop below a
// grain size, so small shapes should tie and large shapes should scale
// with the thread count.

#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

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

template <class F>
double time_ms(F&& fn, int reps) {
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(end - start).count() /
         static_cast<double>(reps);
}

void bench_matmul(std::size_t m, std::size_t k, std::size_t n, int reps) {
  Rng rng(7);
  const auto a = random_vec(m * k, rng);
  const auto b = random_vec(k * n, rng);
  std::vector<double> c(m * n), c_ref(m * n);

  const double serial =
      time_ms([&] { kernels::serial::matmul(a.data(), b.data(), c_ref.data(), m, k, n); },
              reps);
  const double parallel =
      time_ms([&] { kernels::matmul(a.data(), b.data(), c.data(), m, k, n); }, reps);

  bool equal = true;
  for (std::size_t i = 0; i < c.size(); ++i) equal = equal && c[i] == c_ref[i];
  std::printf("matmul %4zux%4zux%4zu  serial %8.3f ms  openmp %8.3f ms  x%.2f  %s\n",
              m, k, n, serial, parallel, serial / parallel,
              equal ? "bit-equal" : "MISMATCH");
}

void bench_conv(std::size_t d, std::size_t s, std::size_t w, int reps) {
  Rng rng(11);
  const auto e = random_vec(d * s, rng);
  const auto h = random_vec(d * w, rng);
  std::vector<double> out(s - w + 1), out_ref(s - w + 1);

  const double serial = time_ms(
      [&] { kernels::serial::conv1d_narrow(e.data(), h.data(), out_ref.data(), d, s, w); },
      reps);
  const double parallel = time_ms(
      [&] { kernels::conv1d_narrow(e.data(), h.data(), out.data(), d, s, w); }, reps);

  bool equal = true;
  for (std::size_t i = 0; i < out.size(); ++i) equal = equal && out[i] == out_ref[i];
  std::printf("conv1d d=%zu s=%6zu w=%zu  serial %8.3f ms  openmp %8.3f ms  x%.2f  %s\n",
              d, s, w, serial, parallel, serial / parallel,
              equal ? "bit-equal" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  bench_matmul(16, 16, 16, 200);
  bench_matmul(128, 128, 128, 20);
  bench_matmul(384, 384, 384, 5);
  bench_matmul(768, 768, 768, 2);
  bench_conv(100, 2000, 3, 50);
  bench_conv(100, 200000, 3, 5);
  return 0;
}
