#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "smmf/sign_bitmap.hpp"
#include "smmf/tensor.hpp"

namespace smmf {

// adam-style adds c*W to the gradient; adamw-style shrinks the weights by
// (1 - lr*c) and leaves the gradient alone.
enum class WeightDecayMode : std::uint8_t {
  AdamStyle = 0,
  AdamWStyle = 1,
};

const char* to_string(WeightDecayMode m);
WeightDecayMode weight_decay_mode_from_string(const std::string& s);

struct HyperParams {
  double lr = 1e-3;
  // First-moment coefficient. Absent means momentum-free mode: no first
  // momentum, no sign bitmap.
  std::optional<double> beta1 = 0.9;
  // lambda: first-moment schedule beta1_t = beta1 * lambda^(t-1)
  double growth_rate = 0.999;
  // gamma: second-moment schedule beta2_t = 1 - t^gamma
  double decay_rate = -0.5;
  double eps = 1e-8;
  double weight_decay = 0.0;
  WeightDecayMode weight_decay_mode = WeightDecayMode::AdamStyle;
  // When false, rank-1 parameters keep dense (unfactored) momenta.
  bool vector_reshape = true;
  SignStorage sign_storage = SignStorage::Packed1Bit;

  // Baseline knobs.
  double adam_beta2 = 0.999;
  bool adam_bias_correction = false;
  double adafactor_eps1 = 1e-30;
  // Reserved for Adafactor's relative-step schedule, which this simplified
  // baseline does not implement (fixed lr instead). Validated, unused.
  double adafactor_eps2 = 1e-3;
  double adafactor_clip = 1.0;

  // Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

// beta1_t = beta1 * growth_rate^(t-1), non-increasing in t
double beta1_at(std::int64_t t, double beta1, double growth_rate);
// beta2_t = 1 - t^decay_rate; exactly 0 at t = 1, increasing toward 1
double beta2_at(std::int64_t t, double decay_rate);

// Identity when weight_decay == 0.
void apply_weight_decay(Tensor& weight, Tensor& grad, const HyperParams& hp);

} // namespace smmf
