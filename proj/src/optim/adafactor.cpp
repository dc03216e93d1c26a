#include "smmf/optim/adafactor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "smmf/kernels.hpp"

namespace smmf {

AdafactorLayerState make_adafactor_state(const Shape& shape, const HyperParams& hp) {
  AdafactorLayerState st;
  const std::int64_t n = shape_numel(shape);
  st.factored = shape.size() >= 2;
  if (st.factored) {
    st.rows = shape[shape.size() - 2];
    st.cols = shape[shape.size() - 1];
    st.slices = n / (st.rows * st.cols);
    st.row_acc.assign(static_cast<std::size_t>(st.slices * st.rows), 0.0);
    st.col_acc.assign(static_cast<std::size_t>(st.slices * st.cols), 0.0);
  } else {
    st.dense_v.assign(static_cast<std::size_t>(n), 0.0);
  }
  if (hp.beta1) st.m.assign(static_cast<std::size_t>(n), 0.0);
  return st;
}

void adafactor_step(AdafactorLayerState& st, Tensor& weight, const Tensor& grad,
                    const HyperParams& hp) {
  weight.require_same_shape(grad, "adafactor_step");
  const std::int64_t n = weight.numel();
  if (!std::isfinite(kernels::sum_squares(grad.data())))
    throw std::invalid_argument("non-finite gradient");

  Tensor g = grad;
  apply_weight_decay(weight, g, hp);

  const double beta2_t = beta2_at(st.t, hp.decay_rate);
  const double eps1 = hp.adafactor_eps1;
  std::vector<double> u(static_cast<std::size_t>(n));
  if (st.factored) {
    if (st.slices * st.rows * st.cols != n)
      throw std::invalid_argument("adafactor_step: state does not match parameter numel");
    const std::int64_t a = st.rows, b = st.cols;
    std::vector<double> sq(static_cast<std::size_t>(a * b));
    std::vector<double> rs(static_cast<std::size_t>(a)), cs(static_cast<std::size_t>(b));
    for (std::int64_t s = 0; s < st.slices; ++s) {
      const double* gs = g.data().data() + s * a * b;
      for (std::int64_t i = 0; i < a * b; ++i)
        sq[static_cast<std::size_t>(i)] = gs[i] * gs[i] + eps1;
      kernels::row_sums(sq, a, b, rs);
      kernels::col_sums(sq, a, b, cs);
      double* R = st.row_acc.data() + s * a;
      double* C = st.col_acc.data() + s * b;
      for (std::int64_t i = 0; i < a; ++i) R[i] = beta2_t * R[i] + (1.0 - beta2_t) * rs[static_cast<std::size_t>(i)];
      for (std::int64_t j = 0; j < b; ++j) C[j] = beta2_t * C[j] + (1.0 - beta2_t) * cs[static_cast<std::size_t>(j)];
      double rsum = 0.0;
      for (std::int64_t i = 0; i < a; ++i) rsum += R[i];
      const double inv = 1.0 / rsum;
      double* us = u.data() + s * a * b;
      for (std::int64_t i = 0; i < a; ++i)
        for (std::int64_t j = 0; j < b; ++j)
          us[i * b + j] = gs[i * b + j] / std::sqrt(R[i] * C[j] * inv);
    }
  } else {
    if (static_cast<std::int64_t>(st.dense_v.size()) != n)
      throw std::invalid_argument("adafactor_step: state does not match parameter numel");
    const double* gp = g.data().data();
    for (std::int64_t i = 0; i < n; ++i) {
      st.dense_v[static_cast<std::size_t>(i)] =
          beta2_t * st.dense_v[static_cast<std::size_t>(i)] +
          (1.0 - beta2_t) * (gp[i] * gp[i] + eps1);
      u[static_cast<std::size_t>(i)] = gp[i] / std::sqrt(st.dense_v[static_cast<std::size_t>(i)]);
    }
  }

  const double rms = std::sqrt(kernels::sum_squares(u) / static_cast<double>(n));
  const double denom = std::max(1.0, rms / hp.adafactor_clip);
  if (denom != 1.0) kernels::scale(u, 1.0 / denom);

  if (hp.beta1) {
    if (static_cast<std::int64_t>(st.m.size()) != n)
      throw std::invalid_argument("adafactor_step: state was built without a first momentum");
    kernels::ema(st.m, u, *hp.beta1);
    kernels::scaled_sub(weight.data(), st.m, hp.lr);
  } else {
    kernels::scaled_sub(weight.data(), u, hp.lr);
  }
  ++st.t;
}

void AdafactorOptimizer::step(std::vector<NamedParam>& params,
                              const std::vector<Tensor>& grads) {
  check_step_args(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    try {
      auto it = states_.find(params[i].name);
      if (it == states_.end())
        it = states_.emplace(params[i].name,
                             make_adafactor_state(params[i].value.shape(), hp_)).first;
      adafactor_step(it->second, params[i].value, grads[i], hp_);
    } catch (const std::exception& e) {
      throw std::runtime_error("param '" + params[i].name + "': " + e.what());
    }
  }
}

std::int64_t AdafactorOptimizer::state_bytes(int bpe) const {
  std::int64_t total = 0;
  for (const auto& [name, st] : states_)
    total += static_cast<std::int64_t>(st.row_acc.size() + st.col_acc.size() +
                                       st.dense_v.size() + st.m.size()) * bpe;
  return total;
}

} // namespace smmf
