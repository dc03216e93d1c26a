#include "smmf/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

namespace smmf::kernels::serial {

namespace {
// Same reduction blocking as the parallel kernels, so the two agree bitwise.
constexpr std::int64_t kBlock = 65536;
} // namespace

void square(std::span<const double> a, std::span<double> out) {
  assert(a.size() == out.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * a[i];
}

void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
}

void add_scaled(std::span<const double> a, std::span<const double> b,
                double alpha, double beta, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i] + beta * b[i];
}

void ema(std::span<double> m, std::span<const double> g, double beta) {
  assert(m.size() == g.size());
  const double one_minus = 1.0 - beta;
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = beta * m[i] + one_minus * g[i];
}

void ema_square(std::span<double> v, std::span<const double> g, double beta) {
  assert(v.size() == g.size());
  const double one_minus = 1.0 - beta;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = beta * v[i] + one_minus * g[i] * g[i];
}

void div_sqrt_eps(std::span<const double> a, std::span<const double> b,
                  double eps, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / std::sqrt(b[i] + eps);
}

void scaled_sub(std::span<double> w, std::span<const double> u, double eta) {
  assert(w.size() == u.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= eta * u[i];
}

void outer(std::span<const double> r, std::span<const double> c, std::span<double> out) {
  const std::int64_t rows = static_cast<std::int64_t>(r.size());
  const std::int64_t cols = static_cast<std::int64_t>(c.size());
  assert(out.size() == r.size() * c.size());
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j) out[i * cols + j] = r[i] * c[j];
}

void outer_signed(std::span<const double> r, std::span<const double> c,
                  const SignBitmap& signs, std::span<double> out) {
  const std::int64_t rows = static_cast<std::int64_t>(r.size());
  const std::int64_t cols = static_cast<std::int64_t>(c.size());
  assert(out.size() == r.size() * c.size());
  assert(signs.rows() == rows && signs.cols() == cols);
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j) {
      const double v = r[i] * c[j];
      out[i * cols + j] = signs.get(i, j) ? v : -v;
    }
}

void row_sums(std::span<const double> m, std::int64_t rows, std::int64_t cols,
              std::span<double> out) {
  assert(m.size() == static_cast<std::size_t>(rows * cols));
  assert(out.size() == static_cast<std::size_t>(rows));
  for (std::int64_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) s += m[i * cols + j];
    out[i] = s;
  }
}

void col_sums(std::span<const double> m, std::int64_t rows, std::int64_t cols,
              std::span<double> out) {
  assert(m.size() == static_cast<std::size_t>(rows * cols));
  assert(out.size() == static_cast<std::size_t>(cols));
  for (std::int64_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j) out[j] += m[i * cols + j];
}

void row_sums_abs(std::span<const double> m, std::int64_t rows, std::int64_t cols,
                  std::span<double> out) {
  assert(m.size() == static_cast<std::size_t>(rows * cols));
  assert(out.size() == static_cast<std::size_t>(rows));
  for (std::int64_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) s += std::abs(m[i * cols + j]);
    out[i] = s;
  }
}

void col_sums_abs(std::span<const double> m, std::int64_t rows, std::int64_t cols,
                  std::span<double> out) {
  assert(m.size() == static_cast<std::size_t>(rows * cols));
  assert(out.size() == static_cast<std::size_t>(cols));
  for (std::int64_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j) out[j] += std::abs(m[i * cols + j]);
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
  double total = 0.0;
  for (std::int64_t lo = 0; lo < n; lo += kBlock) {
    const std::int64_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += map(a[i]);
    total += s;
  }
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
    std::uint8_t* bytes = signs.bytes().data();
    const std::int64_t nbytes = static_cast<std::int64_t>(signs.byte_size());
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
    for (std::int64_t i = 0; i < n; ++i) bytes[i] = a[i] >= 0.0 ? 1 : 0;
  }
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::int64_t n, std::int64_t k, std::int64_t m) {
  assert(a.size() == static_cast<std::size_t>(n * k));
  assert(b.size() == static_cast<std::size_t>(k * m));
  assert(c.size() == static_cast<std::size_t>(n * m));
  for (std::int64_t i = 0; i < n; ++i) {
    double* crow = c.data() + i * m;
    for (std::int64_t j = 0; j < m; ++j) crow[j] = 0.0;
    for (std::int64_t t = 0; t < k; ++t) {
      const double av = a[i * k + t];
      const double* brow = b.data() + t * m;
      for (std::int64_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

} // namespace smmf::kernels::serial
