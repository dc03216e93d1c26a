#pragma once

#include <memory>
#include <string>
#include <vector>

#include "smmf/optim/hyperparams.hpp"
#include "smmf/param.hpp"

namespace smmf {

// Uniform multi-layer optimizer contract. Per-parameter state is created
// lazily on the first step and keyed by parameter name; layers update
// independently. Errors are rethrown with the parameter name attached.
class Optimizer {
 public:
  virtual ~Optimizer() = default;

  virtual const char* kind() const = 0;
  virtual void step(std::vector<NamedParam>& params, const std::vector<Tensor>& grads) = 0;
  // Persistent state bytes at the given storage precision; 0 before the
  // first step, constant afterwards for a fixed model.
  virtual std::int64_t state_bytes(int bpe) const = 0;

  const HyperParams& hyperparams() const { return hp_; }
  // Warmup hook for the harness.
  void set_lr(double lr) { hp_.lr = lr; }

 protected:
  explicit Optimizer(HyperParams hp) : hp_(std::move(hp)) { hp_.validate(); }

  void check_step_args(const std::vector<NamedParam>& params,
                       const std::vector<Tensor>& grads) const;

  HyperParams hp_;
};

// kind: smmf | adam | adafactor | sgd
std::unique_ptr<Optimizer> make_optimizer(const std::string& kind, const HyperParams& hp);

} // namespace smmf
