#include "smmf/factorize.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "smmf/kernels.hpp"

namespace smmf {

CompressedMomentum CompressedMomentum::zeros(MatShape ms, bool with_signs, SignStorage mode) {
  CompressedMomentum cm;
  cm.shape = ms;
  cm.factors.r.assign(static_cast<std::size_t>(ms.rows), 0.0);
  cm.factors.c.assign(static_cast<std::size_t>(ms.cols), 0.0);
  if (with_signs) cm.signs.emplace(ms.rows, ms.cols, mode);
  return cm;
}

std::int64_t CompressedMomentum::byte_size(int bpe) const {
  std::int64_t bytes = (shape.rows + shape.cols) * bpe;
  if (signs) bytes += static_cast<std::int64_t>(signs->byte_size());
  return bytes;
}

namespace {

void require_matrix(const Tensor& a, const char* op) {
  if (!a.is_matrix())
    throw std::invalid_argument(std::string(op) + ": expected a matrix, got shape " +
                                shape_to_string(a.shape()));
}

} // namespace

FactorPair nnmf(const Tensor& a) {
  require_matrix(a, "nnmf");
  const double* p = a.data().data();
  for (std::int64_t i = 0; i < a.numel(); ++i)
    if (p[i] < 0.0)
      throw std::invalid_argument("nnmf: negative entry at flat index " + std::to_string(i));
  const std::int64_t rows = a.rows();
  const std::int64_t cols = a.cols();
  FactorPair fp;
  fp.r.resize(static_cast<std::size_t>(rows));
  fp.c.resize(static_cast<std::size_t>(cols));
  kernels::row_sums(a.data(), rows, cols, fp.r);
  kernels::col_sums(a.data(), rows, cols, fp.c);
  const double total = kernels::sum(fp.r);
  if (total != 0.0)
    for (double& x : fp.c) x /= total;
  return fp;
}

CompressedMomentum compress(const Tensor& m, bool with_signs, SignStorage mode) {
  require_matrix(m, "compress");
  const std::int64_t rows = m.rows();
  const std::int64_t cols = m.cols();
  CompressedMomentum cm;
  cm.shape = MatShape{rows, cols};
  cm.factors.r.resize(static_cast<std::size_t>(rows));
  cm.factors.c.resize(static_cast<std::size_t>(cols));
  kernels::row_sums_abs(m.data(), rows, cols, cm.factors.r);
  kernels::col_sums_abs(m.data(), rows, cols, cm.factors.c);
  const double total = kernels::sum(cm.factors.r);
  if (!std::isfinite(total))
    throw std::invalid_argument("compress: non-finite entries in input matrix");
  if (total != 0.0) {
    if (rows <= cols)
      for (double& x : cm.factors.r) x /= total;
    else
      for (double& x : cm.factors.c) x /= total;
  }
  if (with_signs) {
    cm.signs.emplace(rows, cols, mode);
    kernels::capture_signs(m.data(), *cm.signs);
  }
  return cm;
}

void decompress_into(const CompressedMomentum& cm, std::span<double> out) {
  if (static_cast<std::int64_t>(cm.factors.r.size()) != cm.shape.rows ||
      static_cast<std::int64_t>(cm.factors.c.size()) != cm.shape.cols ||
      static_cast<std::int64_t>(out.size()) != cm.shape.rows * cm.shape.cols)
    throw std::invalid_argument("decompress: factor lengths do not match declared shape");
  if (cm.signs)
    kernels::outer_signed(cm.factors.r, cm.factors.c, *cm.signs, out);
  else
    kernels::outer(cm.factors.r, cm.factors.c, out);
}

Tensor decompress(const CompressedMomentum& cm) {
  Tensor out = Tensor::zeros(Shape{cm.shape.rows, cm.shape.cols});
  decompress_into(cm, out.data());
  return out;
}

double compression_error_sum(const Tensor& a) {
  const FactorPair fp = nnmf(a);
  const double* p = a.data().data();
  const std::int64_t rows = a.rows();
  const std::int64_t cols = a.cols();
  double err = 0.0;
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j)
      err += fp.r[static_cast<std::size_t>(i)] * fp.c[static_cast<std::size_t>(j)] -
             p[i * cols + j];
  return err;
}

namespace {

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("read_compressed: truncated stream");
  return v;
}

} // namespace

void write_compressed(std::ostream& os, const CompressedMomentum& cm) {
  write_raw(os, static_cast<std::uint32_t>(cm.shape.rows));
  write_raw(os, static_cast<std::uint32_t>(cm.shape.cols));
  const std::uint8_t mode =
      cm.signs && cm.signs->mode() == SignStorage::Byte8Bit ? 1 : 0;
  write_raw(os, mode);
  write_raw(os, static_cast<std::uint8_t>(cm.signs ? 1 : 0));
  os.write(reinterpret_cast<const char*>(cm.factors.r.data()),
           static_cast<std::streamsize>(cm.factors.r.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(cm.factors.c.data()),
           static_cast<std::streamsize>(cm.factors.c.size() * sizeof(double)));
  if (cm.signs)
    os.write(reinterpret_cast<const char*>(cm.signs->bytes().data()),
             static_cast<std::streamsize>(cm.signs->byte_size()));
}

CompressedMomentum read_compressed(std::istream& is) {
  const std::uint32_t rows = read_raw<std::uint32_t>(is);
  const std::uint32_t cols = read_raw<std::uint32_t>(is);
  const std::uint8_t mode = read_raw<std::uint8_t>(is);
  const std::uint8_t has_signs = read_raw<std::uint8_t>(is);
  if (mode > 1 || has_signs > 1)
    throw std::runtime_error("read_compressed: corrupt header");
  CompressedMomentum cm = CompressedMomentum::zeros(
      MatShape{static_cast<std::int64_t>(rows), static_cast<std::int64_t>(cols)},
      has_signs == 1, mode == 1 ? SignStorage::Byte8Bit : SignStorage::Packed1Bit);
  is.read(reinterpret_cast<char*>(cm.factors.r.data()),
          static_cast<std::streamsize>(cm.factors.r.size() * sizeof(double)));
  is.read(reinterpret_cast<char*>(cm.factors.c.data()),
          static_cast<std::streamsize>(cm.factors.c.size() * sizeof(double)));
  if (cm.signs)
    is.read(reinterpret_cast<char*>(cm.signs->bytes().data()),
            static_cast<std::streamsize>(cm.signs->byte_size()));
  if (!is) throw std::runtime_error("read_compressed: truncated stream");
  return cm;
}

} // namespace smmf
