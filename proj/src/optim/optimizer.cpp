#include "smmf/optim/optimizer.hpp"

#include <stdexcept>

#include "smmf/optim/adafactor.hpp"
#include "smmf/optim/adam.hpp"
#include "smmf/optim/sgd.hpp"
#include "smmf/optim/smmf_optimizer.hpp"

namespace smmf {

void Optimizer::check_step_args(const std::vector<NamedParam>& params,
                                const std::vector<Tensor>& grads) const {
  if (params.size() != grads.size())
    throw std::invalid_argument("step: " + std::to_string(params.size()) + " params but " +
                                std::to_string(grads.size()) + " grads");
}

std::unique_ptr<Optimizer> make_optimizer(const std::string& kind, const HyperParams& hp) {
  if (kind == "smmf") return std::make_unique<SmmfOptimizer>(hp);
  if (kind == "adam") return std::make_unique<AdamOptimizer>(hp);
  if (kind == "adafactor") return std::make_unique<AdafactorOptimizer>(hp);
  if (kind == "sgd") return std::make_unique<SgdOptimizer>(hp);
  throw std::invalid_argument("unknown optimizer kind '" + kind +
                              "' (expected smmf|adam|adafactor|sgd)");
}

} // namespace smmf
