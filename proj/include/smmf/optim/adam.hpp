#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "smmf/optim/optimizer.hpp"

namespace smmf {

struct AdamLayerState {
  std::vector<double> m, v;
  std::int64_t t = 1;
};

// Standard Adam with dense momenta, constant beta1/beta2, eps outside the
// square root, and an optional bias-correction flag (default off).
class AdamOptimizer final : public Optimizer {
 public:
  explicit AdamOptimizer(HyperParams hp) : Optimizer(std::move(hp)) {}

  const char* kind() const override { return "adam"; }
  void step(std::vector<NamedParam>& params, const std::vector<Tensor>& grads) override;
  std::int64_t state_bytes(int bpe) const override;

  const std::map<std::string, AdamLayerState>& states() const { return states_; }

 private:
  std::map<std::string, AdamLayerState> states_;
};

void adam_step(AdamLayerState& st, Tensor& weight, const Tensor& grad,
               const HyperParams& hp);

} // namespace smmf
