#include "smmf/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smmf::kernels {

namespace {

// Minimum element count before a loop goes parallel.
constexpr std::int64_t kGrain = 32768;
// Fixed reduction block size. Global sums reduce each block serially and
// combine the partials in block order, so the result does not depend on
// the thread count. The serial reference uses the same blocking.
constexpr std::int64_t kBlock = 65536;

} // namespace

void square(std::span<const double> a, std::span<double> out) {
  assert(a.size() == out.size());
  const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for if (n > kGrain)
  for (std::int64_t i = 0; i < n; ++i) out[i] = a[i] * a[i];
}

void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for if (n > kGrain)
  for (std::int64_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void add_scaled(std::span<const double> a, std::span<const double> b,
                double alpha, double beta, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for if (n > kGrain)
  for (std::int64_t i = 0; i < n; ++i) out[i] = alpha * a[i] + beta * b[i];
}

void ema(std::span<double> m, std::span<const double> g, double beta) {
  assert(m.size() == g.size());
  const std::int64_t n = static_cast<std::int64_t>(m.size());
  const double one_minus = 1.0 - beta;
#pragma omp parallel for if (n > kGrain)
  for (std::int64_t i = 0; i < n; ++i) m[i] = beta * m[i] + one_minus * g[i];
}

void ema_square(std::span<double> v, std::span<const double> g, double beta) {
  assert(v.size() == g.size());
  const std::int64_t n = static_cast<std::int64_t>(v.size());
  const double one_minus = 1.0 - beta;
#pragma omp parallel for if (n > kGrain)
  for (std::int64_t i = 0; i < n; ++i) v[i] = beta * v[i] + one_minus * g[i] * g[i];
}

void div_sqrt_eps(std::span<const double> a, std::span<const double> b,
                  double eps, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for if (n > kGrain)
  for (std::int64_t i = 0; i < n; ++i) out[i] = a[i] / std::sqrt(b[i] + eps);
}

void scaled_sub(std::span<double> w, std::span<const double> u, double eta) {
  assert(w.size() == u.size());
  const std::int64_t n = static_cast<std::int64_t>(w.size());
#pragma omp parallel for if (n > kGrain)
  for (std::int64_t i = 0; i < n; ++i) w[i] -= eta * u[i];
}

void scale(std::span<double> a, double factor) {
  const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for if (n > kGrain)
  for (std::int64_t i = 0; i < n; ++i) a[i] *= factor;
}

void fill(std::span<double> a, double value) {
  const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for if (n > kGrain)
  for (std::int64_t i = 0; i < n; ++i) a[i] = value;
}

void outer(std::span<const double> r, std::span<const double> c, std::span<double> out) {
  const std::int64_t rows = static_cast<std::int64_t>(r.size());
  const std::int64_t cols = static_cast<std::int64_t>(c.size());
  assert(out.size() == r.size() * c.size());
#pragma omp parallel for if (rows * cols > kGrain)
  for (std::int64_t i = 0; i < rows; ++i) {
    double* row = out.data() + i * cols;
    const double ri = r[i];
    for (std::int64_t j = 0; j < cols; ++j) row[j] = ri * c[j];
  }
}

void outer_signed(std::span<const double> r, std::span<const double> c,
                  const SignBitmap& signs, std::span<double> out) {
  const std::int64_t rows = static_cast<std::int64_t>(r.size());
  const std::int64_t cols = static_cast<std::int64_t>(c.size());
  assert(out.size() == r.size() * c.size());
  assert(signs.rows() == rows && signs.cols() == cols);
#pragma omp parallel for if (rows * cols > kGrain)
  for (std::int64_t i = 0; i < rows; ++i) {
    double* row = out.data() + i * cols;
    const double ri = r[i];
    for (std::int64_t j = 0; j < cols; ++j) {
      const double v = ri * c[j];
      row[j] = signs.get(i, j) ? v : -v;
    }
  }
}

void row_sums(std::span<const double> m, std::int64_t rows, std::int64_t cols,
              std::span<double> out) {
  assert(m.size() == static_cast<std::size_t>(rows * cols));
  assert(out.size() == static_cast<std::size_t>(rows));
#pragma omp parallel for if (rows * cols > kGrain)
  for (std::int64_t i = 0; i < rows; ++i) {
    const double* row = m.data() + i * cols;
    double s = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) s += row[j];
    out[i] = s;
  }
}

void row_sums_abs(std::span<const double> m, std::int64_t rows, std::int64_t cols,
                  std::span<double> out) {
  assert(m.size() == static_cast<std::size_t>(rows * cols));
  assert(out.size() == static_cast<std::size_t>(rows));
#pragma omp parallel for if (rows * cols > kGrain)
  for (std::int64_t i = 0; i < rows; ++i) {
    const double* row = m.data() + i * cols;
    double s = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) s += std::abs(row[j]);
    out[i] = s;
  }
}

namespace {

// Column sums with each thread owning a contiguous stripe of columns and
// scanning rows in order, so every out[j] accumulates in row order no
// matter how many threads run.
template <typename Map>
void col_sums_impl(std::span<const double> m, std::int64_t rows, std::int64_t cols,
                   std::span<double> out, Map map) {
  assert(m.size() == static_cast<std::size_t>(rows * cols));
  assert(out.size() == static_cast<std::size_t>(cols));
#pragma omp parallel if (rows * cols > kGrain)
  {
#ifdef _OPENMP
    const std::int64_t nt = omp_get_num_threads();
    const std::int64_t tid = omp_get_thread_num();
#else
    const std::int64_t nt = 1;
    const std::int64_t tid = 0;
#endif
    const std::int64_t chunk = (cols + nt - 1) / nt;
    const std::int64_t c0 = tid * chunk;
    const std::int64_t c1 = std::min(cols, c0 + chunk);
    for (std::int64_t j = c0; j < c1; ++j) out[j] = 0.0;
    for (std::int64_t i = 0; i < rows; ++i) {
      const double* row = m.data() + i * cols;
      for (std::int64_t j = c0; j < c1; ++j) out[j] += map(row[j]);
    }
  }
}

} // namespace

void col_sums(std::span<const double> m, std::int64_t rows, std::int64_t cols,
              std::span<double> out) {
  col_sums_impl(m, rows, cols, out, [](double x) { return x; });
}

void col_sums_abs(std::span<const double> m, std::int64_t rows, std::int64_t cols,
                  std::span<double> out) {
  col_sums_impl(m, rows, cols, out, [](double x) { return std::abs(x); });
}

namespace {

template <typename Map>
double blocked_reduce(std::span<const double> a, Map map) {
  const std::int64_t n = static_cast<std::int64_t>(a.size());
  if (n <= kBlock) {
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += map(a[i]);
    return s;
  }
  const std::int64_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(static_cast<std::size_t>(nblocks));
#pragma omp parallel for
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += map(a[i]);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (std::int64_t b = 0; b < nblocks; ++b) total += partial[static_cast<std::size_t>(b)];
  return total;
}

} // namespace

double sum(std::span<const double> a) {
  return blocked_reduce(a, [](double x) { return x; });
}

double sum_squares(std::span<const double> a) {
  return blocked_reduce(a, [](double x) { return x * x; });
}

void capture_signs(std::span<const double> a, SignBitmap& signs) {
  const std::int64_t n = static_cast<std::int64_t>(a.size());
  assert(n == signs.rows() * signs.cols());
  if (signs.mode() == SignStorage::Packed1Bit) {
    // Each thread owns whole bytes, so packed writes never race.
    const std::int64_t nbytes = static_cast<std::int64_t>(signs.byte_size());
    std::uint8_t* bytes = signs.bytes().data();
#pragma omp parallel for if (n > kGrain)
    for (std::int64_t b = 0; b < nbytes; ++b) {
      const std::int64_t lo = b * 8;
      const std::int64_t hi = std::min(n, lo + 8);
      std::uint8_t w = 0;
      for (std::int64_t k = lo; k < hi; ++k)
        if (a[k] >= 0.0) w = static_cast<std::uint8_t>(w | (1u << (k - lo)));
      bytes[b] = w;
    }
  } else {
    std::uint8_t* bytes = signs.bytes().data();
#pragma omp parallel for if (n > kGrain)
    for (std::int64_t i = 0; i < n; ++i) bytes[i] = a[i] >= 0.0 ? 1 : 0;
  }
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::int64_t n, std::int64_t k, std::int64_t m) {
  assert(a.size() == static_cast<std::size_t>(n * k));
  assert(b.size() == static_cast<std::size_t>(k * m));
  assert(c.size() == static_cast<std::size_t>(n * m));
#pragma omp parallel for if (n * k * m > kGrain)
  for (std::int64_t i = 0; i < n; ++i) {
    double* crow = c.data() + i * m;
    for (std::int64_t j = 0; j < m; ++j) crow[j] = 0.0;
    const double* arow = a.data() + i * k;
    for (std::int64_t t = 0; t < k; ++t) {
      const double av = arow[t];
      const double* brow = b.data() + t * m;
      for (std::int64_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::int64_t n, std::int64_t k, std::int64_t m) {
  assert(a.size() == static_cast<std::size_t>(n * k));
  assert(b.size() == static_cast<std::size_t>(n * m));
  assert(c.size() == static_cast<std::size_t>(k * m));
#pragma omp parallel for if (n * k * m > kGrain)
  for (std::int64_t p = 0; p < k; ++p) {
    double* crow = c.data() + p * m;
    for (std::int64_t j = 0; j < m; ++j) crow[j] = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double av = a[i * k + p];
      const double* brow = b.data() + i * m;
      for (std::int64_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
               std::int64_t n, std::int64_t m, std::int64_t k) {
  assert(a.size() == static_cast<std::size_t>(n * m));
  assert(b.size() == static_cast<std::size_t>(k * m));
  assert(c.size() == static_cast<std::size_t>(n * k));
#pragma omp parallel for if (n * m * k > kGrain)
  for (std::int64_t i = 0; i < n; ++i) {
    const double* arow = a.data() + i * m;
    double* crow = c.data() + i * k;
    for (std::int64_t j = 0; j < k; ++j) {
      const double* brow = b.data() + j * m;
      double s = 0.0;
      for (std::int64_t t = 0; t < m; ++t) s += arow[t] * brow[t];
      crow[j] = s;
    }
  }
}

} // namespace smmf::kernels
