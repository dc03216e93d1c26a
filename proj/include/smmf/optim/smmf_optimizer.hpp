#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "smmf/factorize.hpp"
#include "smmf/matricize.hpp"
#include "smmf/optim/optimizer.hpp"

namespace smmf {

// Per-parameter state. Between steps only the factor vectors, sign bitmap
// and counter persist; the decompressed momenta are per-step temporaries.
// Rank-1 parameters fall back to dense (unfactored) momenta when
// vector_reshape is off.
struct SmmfLayerState {
  Shape original;
  MatShape eshape;
  bool factored = true;
  std::optional<CompressedMomentum> m;  // absent in momentum-free mode
  CompressedMomentum v;
  std::vector<double> dense_m, dense_v;
  std::int64_t t = 1;
};

// Optional capture of the per-step temporaries, for inspection: the
// matricized gradient, the blended (uncompressed) momenta the update is
// built from, and the update matrix itself.
struct SmmfStepTrace {
  Tensor g_mat;
  Tensor m_full;
  Tensor v_full;
  Tensor update;
  double beta1_t = 0.0;
  double beta2_t = 0.0;
};

SmmfLayerState make_smmf_state(const Shape& shape, const HyperParams& hp);

// One update, exact order: square-matricize the gradient, decompress the
// stored momenta, blend with the schedulers, re-compress for storage,
// compute U = M_t/sqrt(V_t + eps) from the UNcompressed blends, apply
// weight <- weight - lr*U, increment t.
void smmf_step(SmmfLayerState& st, Tensor& weight, const Tensor& grad,
               const HyperParams& hp, SmmfStepTrace* trace = nullptr);

// Dense fallback: identical scheduler-driven recursion with unfactored
// m, v (used for rank-1 parameters when vector_reshape is off).
void smmf_step_unfactored(SmmfLayerState& st, Tensor& weight, const Tensor& grad,
                          const HyperParams& hp);

std::int64_t smmf_state_bytes(const SmmfLayerState& st, int bpe);

class SmmfOptimizer final : public Optimizer {
 public:
  explicit SmmfOptimizer(HyperParams hp) : Optimizer(std::move(hp)) {}

  const char* kind() const override { return "smmf"; }
  void step(std::vector<NamedParam>& params, const std::vector<Tensor>& grads) override;
  // Same as step, filling one trace per parameter when traces is non-null.
  void step_traced(std::vector<NamedParam>& params, const std::vector<Tensor>& grads,
                   std::vector<SmmfStepTrace>* traces);
  std::int64_t state_bytes(int bpe) const override;

  const std::map<std::string, SmmfLayerState>& states() const { return states_; }
  std::map<std::string, SmmfLayerState>& states() { return states_; }

 private:
  std::map<std::string, SmmfLayerState> states_;
};

} // namespace smmf
