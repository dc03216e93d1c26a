#include "smmf/optim/hyperparams.hpp"

#include <cmath>
#include <stdexcept>

#include "smmf/kernels.hpp"

namespace smmf {

const char* to_string(WeightDecayMode m) {
  return m == WeightDecayMode::AdamStyle ? "adam-style" : "adamw-style";
}

WeightDecayMode weight_decay_mode_from_string(const std::string& s) {
  if (s == "adam-style") return WeightDecayMode::AdamStyle;
  if (s == "adamw-style") return WeightDecayMode::AdamWStyle;
  throw std::invalid_argument("unknown weight decay mode '" + s +
                              "' (expected adam-style|adamw-style)");
}

void HyperParams::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be > 0");
  if (beta1 && !(*beta1 >= 0.0 && *beta1 <= 1.0))
    throw std::invalid_argument("beta1 must be in [0, 1]");
  if (!(growth_rate >= 0.0 && growth_rate <= 1.0))
    throw std::invalid_argument("growth_rate must be in [0, 1]");
  if (!(decay_rate >= -1.0 && decay_rate <= 0.0))
    throw std::invalid_argument("decay_rate must be in [-1, 0]");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight_decay must be >= 0");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw std::invalid_argument("adam_beta2 must be in [0, 1)");
  if (!(adafactor_eps1 > 0.0)) throw std::invalid_argument("adafactor_eps1 must be > 0");
  if (!(adafactor_eps2 > 0.0)) throw std::invalid_argument("adafactor_eps2 must be > 0");
  if (!(adafactor_clip > 0.0)) throw std::invalid_argument("adafactor_clip must be > 0");
}

double beta1_at(std::int64_t t, double beta1, double growth_rate) {
  return beta1 * std::pow(growth_rate, static_cast<double>(t - 1));
}

double beta2_at(std::int64_t t, double decay_rate) {
  return 1.0 - std::pow(static_cast<double>(t), decay_rate);
}

void apply_weight_decay(Tensor& weight, Tensor& grad, const HyperParams& hp) {
  if (hp.weight_decay == 0.0) return;
  weight.require_same_shape(grad, "apply_weight_decay");
  if (hp.weight_decay_mode == WeightDecayMode::AdamStyle) {
    kernels::add_scaled(grad.data(), weight.data(), 1.0, hp.weight_decay, grad.data());
  } else {
    kernels::scale(weight.data(), 1.0 - hp.lr * hp.weight_decay);
  }
}

} // namespace smmf
