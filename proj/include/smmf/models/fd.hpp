#pragma once

#include <vector>

#include "smmf/models/model.hpp"

namespace smmf {

// Central finite differences on the loss, per parameter element. Mutates
// parameters during evaluation and restores them. Oracle for the analytic
// gradients; O(numel * forward) cost.
std::vector<Tensor> finite_difference_grad(Model& model, const Batch& batch,
                                           double h = 1e-5);

} // namespace smmf
