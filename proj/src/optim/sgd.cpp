#include "smmf/optim/sgd.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "smmf/kernels.hpp"

namespace smmf {

void SgdOptimizer::step(std::vector<NamedParam>& params, const std::vector<Tensor>& grads) {
  check_step_args(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    try {
      params[i].value.require_same_shape(grads[i], "sgd_step");
      if (!std::isfinite(kernels::sum_squares(grads[i].data())))
        throw std::invalid_argument("non-finite gradient");
      Tensor g = grads[i];
      apply_weight_decay(params[i].value, g, hp_);
      kernels::scaled_sub(params[i].value.data(), g.data(), hp_.lr);
    } catch (const std::exception& e) {
      throw std::runtime_error("param '" + params[i].name + "': " + e.what());
    }
  }
}

} // namespace smmf
