#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "smmf/optim/optimizer.hpp"

namespace smmf {

// Per-parameter factored second moment: the trailing two axes of each of
// the prod(n_1..n_{d-2}) slices keep one row vector (length n_{d-1}) and
// one col vector (length n_d). Rank-1 parameters stay dense.
struct AdafactorLayerState {
  bool factored = false;
  std::int64_t slices = 0, rows = 0, cols = 0;
  std::vector<double> row_acc;  // slices*rows
  std::vector<double> col_acc;  // slices*cols
  std::vector<double> dense_v;  // rank-1 path
  std::vector<double> m;        // optional dense first moment
  std::int64_t t = 1;
};

// Simplified Adafactor baseline: factored second-moment EMAs of G^2+eps1
// under the beta2 schedule, update clipping at threshold d, optional dense
// first moment, fixed lr (the native relative-step schedule is out of
// scope).
class AdafactorOptimizer final : public Optimizer {
 public:
  explicit AdafactorOptimizer(HyperParams hp) : Optimizer(std::move(hp)) {}

  const char* kind() const override { return "adafactor"; }
  void step(std::vector<NamedParam>& params, const std::vector<Tensor>& grads) override;
  std::int64_t state_bytes(int bpe) const override;

  const std::map<std::string, AdafactorLayerState>& states() const { return states_; }

 private:
  std::map<std::string, AdafactorLayerState> states_;
};

AdafactorLayerState make_adafactor_state(const Shape& shape, const HyperParams& hp);
void adafactor_step(AdafactorLayerState& st, Tensor& weight, const Tensor& grad,
                    const HyperParams& hp);

} // namespace smmf
