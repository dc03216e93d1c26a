#pragma once

#include <cstdint>
#include <span>

#include "smmf/sign_bitmap.hpp"

namespace smmf::kernels {

// OpenMP-parallel kernels. Accumulation order per output element is fixed
// and independent of the thread count: reductions either own one output
// element per work item (row/col sums scan in index order) or reduce
// fixed-size blocks whose partials are combined serially. Results are
// bit-identical to the serial reference kernels in kernels::serial.

// ---- elementwise (out may alias inputs) ----
void square(std::span<const double> a, std::span<double> out);
void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out);
// out = alpha*a + beta*b
void add_scaled(std::span<const double> a, std::span<const double> b,
                double alpha, double beta, std::span<double> out);
// m = beta*m + (1-beta)*g
void ema(std::span<double> m, std::span<const double> g, double beta);
// v = beta*v + (1-beta)*g*g
void ema_square(std::span<double> v, std::span<const double> g, double beta);
// out = a / sqrt(b + eps)
void div_sqrt_eps(std::span<const double> a, std::span<const double> b,
                  double eps, std::span<double> out);
// w -= eta*u
void scaled_sub(std::span<double> w, std::span<const double> u, double eta);
void scale(std::span<double> a, double factor);
void fill(std::span<double> a, double value);

// ---- outer products ----
// out[i*m + j] = r[i]*c[j]
void outer(std::span<const double> r, std::span<const double> c, std::span<double> out);
// out[i*m + j] = r[i]*c[j], negated where the sign bit is 0
void outer_signed(std::span<const double> r, std::span<const double> c,
                  const SignBitmap& signs, std::span<double> out);

// ---- reductions ----
void row_sums(std::span<const double> m, std::int64_t rows, std::int64_t cols,
              std::span<double> out);
void col_sums(std::span<const double> m, std::int64_t rows, std::int64_t cols,
              std::span<double> out);
// row/col sums of |m| in one sweep each, without materializing |m|
void row_sums_abs(std::span<const double> m, std::int64_t rows, std::int64_t cols,
                  std::span<double> out);
void col_sums_abs(std::span<const double> m, std::int64_t rows, std::int64_t cols,
                  std::span<double> out);
double sum(std::span<const double> a);
double sum_squares(std::span<const double> a);

// sign bit 1 where a[i] >= 0
void capture_signs(std::span<const double> a, SignBitmap& signs);

// ---- small matrix products (row-parallel, fixed k-order) ----
// c(n x m) = a(n x k) * b(k x m)
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::int64_t n, std::int64_t k, std::int64_t m);
// c(k x m) = a(n x k)^T * b(n x m)
void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::int64_t n, std::int64_t k, std::int64_t m);
// c(n x k) = a(n x m) * b(k x m)^T
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::int64_t n, std::int64_t m, std::int64_t k);

// Serial reference implementations, kept for correctness tests and the
// kernel benchmark. Same contracts as above.
namespace serial {

void square(std::span<const double> a, std::span<double> out);
void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out);
void add_scaled(std::span<const double> a, std::span<const double> b,
                double alpha, double beta, std::span<double> out);
void ema(std::span<double> m, std::span<const double> g, double beta);
void ema_square(std::span<double> v, std::span<const double> g, double beta);
void div_sqrt_eps(std::span<const double> a, std::span<const double> b,
                  double eps, std::span<double> out);
void scaled_sub(std::span<double> w, std::span<const double> u, double eta);
void outer(std::span<const double> r, std::span<const double> c, std::span<double> out);
void outer_signed(std::span<const double> r, std::span<const double> c,
                  const SignBitmap& signs, std::span<double> out);
void row_sums(std::span<const double> m, std::int64_t rows, std::int64_t cols,
              std::span<double> out);
void col_sums(std::span<const double> m, std::int64_t rows, std::int64_t cols,
              std::span<double> out);
void row_sums_abs(std::span<const double> m, std::int64_t rows, std::int64_t cols,
                  std::span<double> out);
void col_sums_abs(std::span<const double> m, std::int64_t rows, std::int64_t cols,
                  std::span<double> out);
double sum(std::span<const double> a);
double sum_squares(std::span<const double> a);
void capture_signs(std::span<const double> a, SignBitmap& signs);
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::int64_t n, std::int64_t k, std::int64_t m);

} // namespace serial

} // namespace smmf::kernels
