#pragma once

#include <cstddef>

// Inner-loop kernels behind the autograd ops. The default entry points are
// OpenMP-parallel; bagnet::nn::kernels::serial holds the plain reference
// used by the tests and the benchmark. Both variants compute each output
// element with the same serial inner loop, so their results are bit
// identical and independent of the thread count.

namespace bagnet::nn::kernels {

// c[m x n] = a[m x k] * b[k x n], row-major.
void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n);
// ga[m x k] += gc[m x n] * b^T
void matmul_grad_a(const double* gc, const double* b, double* ga,
                   std::size_t m, std::size_t k, std::size_t n);
// gb[k x n] += a^T * gc[m x n]
void matmul_grad_b(const double* a, const double* gc, double* gb,
                   std::size_t m, std::size_t k, std::size_t n);

// out[i] = sum_{r,c} e[r][i+c] * h[r][c] for i in [0, s-w+1); e is d x s,
// h is d x w, both row-major. Narrow convolution: requires w <= s.
void conv1d_narrow(const double* e, const double* h, double* out,
                   std::size_t d, std::size_t s, std::size_t w);
// ge[r][j] += sum over map positions i with i <= j < i+w of gout[i]*h[r][j-i]
void conv1d_grad_e(const double* gout, const double* h, double* ge,
                   std::size_t d, std::size_t s, std::size_t w);
// gh[r][c] += sum_i gout[i] * e[r][i+c]
void conv1d_grad_h(const double* gout, const double* e, double* gh,
                   std::size_t d, std::size_t s, std::size_t w);

namespace serial {
void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n);
void matmul_grad_a(const double* gc, const double* b, double* ga,
                   std::size_t m, std::size_t k, std::size_t n);
void matmul_grad_b(const double* a, const double* gc, double* gb,
                   std::size_t m, std::size_t k, std::size_t n);
void conv1d_narrow(const double* e, const double* h, double* out,
                   std::size_t d, std::size_t s, std::size_t w);
void conv1d_grad_e(const double* gout, const double* h, double* ge,
                   std::size_t d, std::size_t s, std::size_t w);
void conv1d_grad_h(const double* gout, const double* e, double* gh,
                   std::size_t d, std::size_t s, std::size_t w);
}  // namespace serial

}  // namespace bagnet::nn::kernels
