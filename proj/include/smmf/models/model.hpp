#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "smmf/models/data.hpp"
#include "smmf/param.hpp"

namespace smmf {

// Analytically differentiated model over named parameters. loss() is the
// pure forward pass; loss_and_grads() fills one gradient tensor per
// parameter, index-aligned with params().
class Model {
 public:
  virtual ~Model() = default;

  virtual const char* kind() const = 0;
  virtual std::vector<NamedParam>& params() = 0;
  virtual const std::vector<NamedParam>& params() const = 0;
  virtual double loss(const Batch& batch) const = 0;
  virtual double loss_and_grads(const Batch& batch, std::vector<Tensor>& grads) const = 0;
  virtual double eval_metric(const Batch& batch) const = 0;
  virtual const char* metric_name() const = 0;  // "mse" | "accuracy"
};

struct ModelSpec {
  std::string kind = "logreg";  // linreg | logreg | mlp | rank4
  std::int64_t features = 20;
  std::int64_t outputs = 1;
  std::int64_t hidden = 16;                          // mlp
  std::int64_t channels = 3, height = 3, width = 3;  // rank4 weight trailing dims
  std::uint64_t init_seed = 7;                       // mlp/rank4 init stream
};

// linreg:  W (d x k), b (k); squared loss, mean over batch, sum over
//          outputs; zero init
// logreg:  w (d), b (1); sigmoid + BCE with logits clamped to +-30 before
//          exp; zero init
// mlp:     W1 (d x hidden), b1, w2 (hidden), b2; tanh hidden layer, BCE
//          head; seeded gaussian init
// rank4:   K (outputs x channels x height x width), b (outputs); linear
//          contraction of flattened patches, squared loss; seeded init
std::unique_ptr<Model> make_model(const ModelSpec& spec);

} // namespace smmf
