#pragma once

#include "smmf/optim/optimizer.hpp"

namespace smmf {

// Plain gradient descent; stateless. Kept as the reference point for the
// regret harness.
class SgdOptimizer final : public Optimizer {
 public:
  explicit SgdOptimizer(HyperParams hp) : Optimizer(std::move(hp)) {}

  const char* kind() const override { return "sgd"; }
  void step(std::vector<NamedParam>& params, const std::vector<Tensor>& grads) override;
  std::int64_t state_bytes(int) const override { return 0; }
};

} // namespace smmf
