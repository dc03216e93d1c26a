#pragma once

#include <iosfwd>

#include "smmf/optim/smmf_optimizer.hpp"

namespace smmf {

// Versioned binary checkpoint of the optimizer state: header, then one
// record per layer (name, original shape, step counter, factor dumps or
// dense momenta). Weights are not included.
void write_checkpoint(std::ostream& os, const SmmfOptimizer& opt);
void read_checkpoint(std::istream& is, SmmfOptimizer& opt);

} // namespace smmf
