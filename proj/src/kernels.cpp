#include "bagnet/kernels.hpp"

#include <cstdint>

namespace bagnet::nn::kernels {

// Parallelism only pays off above this many output elements; below it the
// OpenMP entry points fall through to the same loop on one thread.
constexpr std::size_t kGrain = 16384;

namespace serial {

void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void matmul_grad_a(const double* gc, const double* b, double* ga,
                   std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      double acc = 0.0;
      const double* gci = gc + i * n;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) acc += gci[j] * bp[j];
      ga[i * k + p] += acc;
    }
  }
}

void matmul_grad_b(const double* a, const double* gc, double* gb,
                   std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += a[i * k + p] * gc[i * n + j];
      gb[p * n + j] += acc;
    }
  }
}

void conv1d_narrow(const double* e, const double* h, double* out,
                   std::size_t d, std::size_t s, std::size_t w) {
  const std::size_t len = s - w + 1;
  for (std::size_t i = 0; i < len; ++i) {
    double acc = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      const double* er = e + r * s + i;
      const double* hr = h + r * w;
      for (std::size_t c = 0; c < w; ++c) acc += er[c] * hr[c];
    }
    out[i] = acc;
  }
}

void conv1d_grad_e(const double* gout, const double* h, double* ge,
                   std::size_t d, std::size_t s, std::size_t w) {
  const std::size_t len = s - w + 1;
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t j = 0; j < s; ++j) {
      double acc = 0.0;
      const std::size_t i_lo = (j + 1 > w) ? j + 1 - w : 0;
      const std::size_t i_hi = (j < len) ? j : len - 1;
      for (std::size_t i = i_lo; i <= i_hi; ++i) acc += gout[i] * h[r * w + (j - i)];
      ge[r * s + j] += acc;
    }
  }
}

void conv1d_grad_h(const double* gout, const double* e, double* gh,
                   std::size_t d, std::size_t s, std::size_t w) {
  const std::size_t len = s - w + 1;
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < len; ++i) acc += gout[i] * e[r * s + i + c];
      gh[r * w + c] += acc;
    }
  }
}

}  // namespace serial

void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n) {
  if (m * n * k < kGrain) {
    serial::matmul(a, b, c, m, k, n);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    double* ci = c + static_cast<std::size_t>(i) * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[static_cast<std::size_t>(i) * k + p];
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void matmul_grad_a(const double* gc, const double* b, double* ga,
                   std::size_t m, std::size_t k, std::size_t n) {
  if (m * n * k < kGrain) {
    serial::matmul_grad_a(gc, b, ga, m, k, n);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      double acc = 0.0;
      const double* gci = gc + static_cast<std::size_t>(i) * n;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) acc += gci[j] * bp[j];
      ga[static_cast<std::size_t>(i) * k + p] += acc;
    }
  }
}

void matmul_grad_b(const double* a, const double* gc, double* gb,
                   std::size_t m, std::size_t k, std::size_t n) {
  if (m * n * k < kGrain) {
    serial::matmul_grad_b(a, gc, gb, m, k, n);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < static_cast<std::int64_t>(k); ++p) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        acc += a[i * k + static_cast<std::size_t>(p)] * gc[i * n + j];
      gb[static_cast<std::size_t>(p) * n + j] += acc;
    }
  }
}

void conv1d_narrow(const double* e, const double* h, double* out,
                   std::size_t d, std::size_t s, std::size_t w) {
  const std::size_t len = s - w + 1;
  if (len * d * w < kGrain) {
    serial::conv1d_narrow(e, h, out, d, s, w);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(len); ++i) {
    double acc = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      const double* er = e + r * s + static_cast<std::size_t>(i);
      const double* hr = h + r * w;
      for (std::size_t c = 0; c < w; ++c) acc += er[c] * hr[c];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
}

void conv1d_grad_e(const double* gout, const double* h, double* ge,
                   std::size_t d, std::size_t s, std::size_t w) {
  if (d * s * w < kGrain) {
    serial::conv1d_grad_e(gout, h, ge, d, s, w);
    return;
  }
  const std::size_t len = s - w + 1;
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(d); ++r) {
    for (std::size_t j = 0; j < s; ++j) {
      double acc = 0.0;
      const std::size_t i_lo = (j + 1 > w) ? j + 1 - w : 0;
      const std::size_t i_hi = (j < len) ? j : len - 1;
      for (std::size_t i = i_lo; i <= i_hi; ++i)
        acc += gout[i] * h[static_cast<std::size_t>(r) * w + (j - i)];
      ge[static_cast<std::size_t>(r) * s + j] += acc;
    }
  }
}

void conv1d_grad_h(const double* gout, const double* e, double* gh,
                   std::size_t d, std::size_t s, std::size_t w) {
  if (d * s * w < kGrain) {
    serial::conv1d_grad_h(gout, e, gh, d, s, w);
    return;
  }
  const std::size_t len = s - w + 1;
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(d); ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < len; ++i)
        acc += gout[i] * e[static_cast<std::size_t>(r) * s + i + c];
      gh[static_cast<std::size_t>(r) * w + c] += acc;
    }
  }
}

}  // namespace bagnet::nn::kernels
