#include "smmf/optim/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "smmf/kernels.hpp"

namespace smmf {

void adam_step(AdamLayerState& st, Tensor& weight, const Tensor& grad,
               const HyperParams& hp) {
  weight.require_same_shape(grad, "adam_step");
  const auto n = static_cast<std::size_t>(weight.numel());
  if (st.m.size() != n || st.v.size() != n)
    throw std::invalid_argument("adam_step: state does not match parameter numel");
  if (!std::isfinite(kernels::sum_squares(grad.data())))
    throw std::invalid_argument("non-finite gradient");

  Tensor g = grad;
  apply_weight_decay(weight, g, hp);

  const double beta1 = hp.beta1.value_or(0.0);
  const double beta2 = hp.adam_beta2;
  kernels::ema(st.m, g.data(), beta1);
  kernels::ema_square(st.v, g.data(), beta2);

  double* w = weight.data().data();
  if (hp.adam_bias_correction) {
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(st.t));
    const double inv1 = bc1 == 0.0 ? 1.0 : 1.0 / bc1;
    const double inv2 = bc2 == 0.0 ? 1.0 : 1.0 / bc2;
    for (std::size_t i = 0; i < n; ++i)
      w[i] -= hp.lr * (st.m[i] * inv1) / (std::sqrt(st.v[i] * inv2) + hp.eps);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      w[i] -= hp.lr * st.m[i] / (std::sqrt(st.v[i]) + hp.eps);
  }
  ++st.t;
}

void AdamOptimizer::step(std::vector<NamedParam>& params, const std::vector<Tensor>& grads) {
  check_step_args(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    try {
      auto it = states_.find(params[i].name);
      if (it == states_.end()) {
        AdamLayerState st;
        st.m.assign(static_cast<std::size_t>(params[i].value.numel()), 0.0);
        st.v.assign(static_cast<std::size_t>(params[i].value.numel()), 0.0);
        it = states_.emplace(params[i].name, std::move(st)).first;
      }
      adam_step(it->second, params[i].value, grads[i], hp_);
    } catch (const std::exception& e) {
      throw std::runtime_error("param '" + params[i].name + "': " + e.what());
    }
  }
}

std::int64_t AdamOptimizer::state_bytes(int bpe) const {
  std::int64_t total = 0;
  for (const auto& [name, st] : states_)
    total += static_cast<std::int64_t>(st.m.size() + st.v.size()) * bpe;
  return total;
}

} // namespace smmf
