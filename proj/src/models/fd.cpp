#include "smmf/models/fd.hpp"

#include <stdexcept>

namespace smmf {

std::vector<Tensor> finite_difference_grad(Model& model, const Batch& batch, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_grad: h must be > 0");
  std::vector<Tensor> grads;
  for (auto& param : model.params()) {
    Tensor grad = Tensor::zeros(param.value.shape());
    for (std::int64_t i = 0; i < param.value.numel(); ++i) {
      const double saved = param.value[i];
      param.value[i] = saved + h;
      const double up = model.loss(batch);
      param.value[i] = saved - h;
      const double down = model.loss(batch);
      param.value[i] = saved;
      grad[i] = (up - down) / (2.0 * h);
    }
    grads.push_back(std::move(grad));
  }
  return grads;
}

} // namespace smmf
