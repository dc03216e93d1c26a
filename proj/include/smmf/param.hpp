#pragma once

#include <string>

#include "smmf/tensor.hpp"

namespace smmf {

// A model parameter. Optimizer state is keyed by the name.
struct NamedParam {
  std::string name;
  Tensor value;
};

} // namespace smmf
