#pragma once

#include <cstdint>

#include "smmf/tensor.hpp"

namespace smmf {

// Target shape for square-matricization: rows >= cols, rows*cols == numel.
struct MatShape {
  std::int64_t rows = 0;
  std::int64_t cols = 0;

  bool operator==(const MatShape&) const = default;
};

// Picks the most square factorization of numel: scans downward from
// floor(sqrt(numel)) to the first divisor i and returns (numel/i, i).
// Falls back to (numel, 1) for primes. Throws std::invalid_argument for
// numel < 1.
MatShape square_matricize_shape(std::int64_t numel);

// Reshape (relabel, no data movement) to the square-matricized shape.
Tensor matricize(Tensor t);
Tensor matricize(const Tensor& t, MatShape ms);

// Inverse relabel back to the original tensor shape.
Tensor dematricize(Tensor m, const Shape& original);

} // namespace smmf
