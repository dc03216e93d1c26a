#include "smmf/optim/smmf_optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "smmf/kernels.hpp"

namespace smmf {

namespace {

void require_finite_grad(const Tensor& grad) {
  const double s = kernels::sum_squares(grad.data());
  if (!std::isfinite(s))
    throw std::invalid_argument("non-finite gradient");
}

} // namespace

SmmfLayerState make_smmf_state(const Shape& shape, const HyperParams& hp) {
  SmmfLayerState st;
  st.original = shape;
  const std::int64_t n = shape_numel(shape);
  st.eshape = square_matricize_shape(n);
  st.factored = !(shape.size() == 1 && !hp.vector_reshape);
  if (st.factored) {
    if (hp.beta1) st.m = CompressedMomentum::zeros(st.eshape, true, hp.sign_storage);
    st.v = CompressedMomentum::zeros(st.eshape, false);
  } else {
    if (hp.beta1) st.dense_m.assign(static_cast<std::size_t>(n), 0.0);
    st.dense_v.assign(static_cast<std::size_t>(n), 0.0);
  }
  return st;
}

void smmf_step(SmmfLayerState& st, Tensor& weight, const Tensor& grad,
               const HyperParams& hp, SmmfStepTrace* trace) {
  weight.require_same_shape(grad, "smmf_step");
  if (weight.numel() != st.eshape.rows * st.eshape.cols)
    throw std::invalid_argument("smmf_step: state does not match parameter numel");
  if (!st.factored) {
    if (trace) throw std::invalid_argument("smmf_step: no trace on the unfactored path");
    smmf_step_unfactored(st, weight, grad, hp);
    return;
  }
  require_finite_grad(grad);

  Tensor g = grad;
  apply_weight_decay(weight, g, hp);
  g = matricize(std::move(g), st.eshape);

  const double beta2_t = beta2_at(st.t, hp.decay_rate);
  Tensor v_full = decompress(st.v);
  kernels::ema_square(v_full.data(), g.data(), beta2_t);

  Tensor m_full;
  double beta1_t = 0.0;
  if (hp.beta1) {
    if (!st.m)
      throw std::invalid_argument("smmf_step: state was built without a first momentum");
    beta1_t = beta1_at(st.t, *hp.beta1, hp.growth_rate);
    m_full = decompress(*st.m);
    kernels::ema(m_full.data(), g.data(), beta1_t);
    st.m = compress(m_full, true, hp.sign_storage);
  }
  st.v = compress(v_full, false);

  // Update from the uncompressed blends; reuse v_full as the U buffer.
  const Tensor& numer = hp.beta1 ? m_full : g;
  if (trace) {
    trace->g_mat = g;
    trace->m_full = m_full;
    trace->v_full = v_full;
    trace->beta1_t = beta1_t;
    trace->beta2_t = beta2_t;
  }
  kernels::div_sqrt_eps(numer.data(), v_full.data(), hp.eps, v_full.data());
  if (trace) trace->update = v_full;
  kernels::scaled_sub(weight.data(), v_full.data(), hp.lr);
  ++st.t;
}

void smmf_step_unfactored(SmmfLayerState& st, Tensor& weight, const Tensor& grad,
                          const HyperParams& hp) {
  weight.require_same_shape(grad, "smmf_step_unfactored");
  if (weight.numel() != static_cast<std::int64_t>(st.dense_v.size()))
    throw std::invalid_argument("smmf_step_unfactored: state does not match parameter numel");
  require_finite_grad(grad);

  Tensor g = grad;
  apply_weight_decay(weight, g, hp);

  const double beta2_t = beta2_at(st.t, hp.decay_rate);
  kernels::ema_square(st.dense_v, g.data(), beta2_t);
  std::vector<double> u(st.dense_v.size());
  if (hp.beta1) {
    if (st.dense_m.size() != st.dense_v.size())
      throw std::invalid_argument(
          "smmf_step_unfactored: state was built without a first momentum");
    const double beta1_t = beta1_at(st.t, *hp.beta1, hp.growth_rate);
    kernels::ema(st.dense_m, g.data(), beta1_t);
    kernels::div_sqrt_eps(st.dense_m, st.dense_v, hp.eps, u);
  } else {
    kernels::div_sqrt_eps(g.data(), st.dense_v, hp.eps, u);
  }
  kernels::scaled_sub(weight.data(), u, hp.lr);
  ++st.t;
}

std::int64_t smmf_state_bytes(const SmmfLayerState& st, int bpe) {
  if (!st.factored) {
    const auto n = static_cast<std::int64_t>(st.dense_v.size());
    return (n + static_cast<std::int64_t>(st.dense_m.size())) * bpe;
  }
  std::int64_t bytes = st.v.byte_size(bpe);
  if (st.m) bytes += st.m->byte_size(bpe);
  return bytes;
}

void SmmfOptimizer::step(std::vector<NamedParam>& params, const std::vector<Tensor>& grads) {
  step_traced(params, grads, nullptr);
}

void SmmfOptimizer::step_traced(std::vector<NamedParam>& params,
                                const std::vector<Tensor>& grads,
                                std::vector<SmmfStepTrace>* traces) {
  check_step_args(params, grads);
  if (traces) traces->assign(params.size(), SmmfStepTrace{});
  for (std::size_t i = 0; i < params.size(); ++i) {
    try {
      auto it = states_.find(params[i].name);
      if (it == states_.end())
        it = states_.emplace(params[i].name,
                             make_smmf_state(params[i].value.shape(), hp_)).first;
      smmf_step(it->second, params[i].value, grads[i], hp_,
                traces ? &(*traces)[i] : nullptr);
    } catch (const std::exception& e) {
      throw std::runtime_error("param '" + params[i].name + "': " + e.what());
    }
  }
}

std::int64_t SmmfOptimizer::state_bytes(int bpe) const {
  std::int64_t total = 0;
  for (const auto& [name, st] : states_) total += smmf_state_bytes(st, bpe);
  return total;
}

} // namespace smmf
