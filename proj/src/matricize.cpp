#include "smmf/matricize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace smmf {

MatShape square_matricize_shape(std::int64_t numel) {
  if (numel < 1)
    throw std::invalid_argument("square_matricize_shape: numel must be >= 1, got " +
                                std::to_string(numel));
  std::int64_t s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(numel)));
  while (s > 1 && s * s > numel) --s;
  while ((s + 1) * (s + 1) <= numel) ++s;
  for (std::int64_t i = s; i >= 1; --i) {
    if (numel % i == 0) return MatShape{numel / i, i};
  }
  return MatShape{numel, 1};
}

Tensor matricize(Tensor t) {
  const MatShape ms = square_matricize_shape(t.numel());
  return std::move(t).reshaped(Shape{ms.rows, ms.cols});
}

Tensor matricize(const Tensor& t, MatShape ms) {
  return t.reshaped(Shape{ms.rows, ms.cols});
}

Tensor dematricize(Tensor m, const Shape& original) {
  return std::move(m).reshaped(original);
}

} // namespace smmf
