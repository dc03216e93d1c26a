#include "smmf/models/model.hpp"

#include <cmath>
#include <stdexcept>

#include "smmf/kernels.hpp"
#include "smmf/models/rng.hpp"

namespace smmf {

namespace {

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr double kLogitClamp = 30.0;

void require_inputs(const Batch& b, const Shape& want, const char* kind) {
  Shape got = b.inputs.shape();
  if (got.size() != want.size() + 1)
    throw std::invalid_argument(std::string(kind) + ": batch inputs rank mismatch, got " +
                                shape_to_string(got));
  for (std::size_t i = 0; i < want.size(); ++i)
    if (got[i + 1] != want[i])
      throw std::invalid_argument(std::string(kind) + ": batch inputs " +
                                  shape_to_string(got) + " do not match model dims " +
                                  shape_to_string(want));
  if (b.targets.dim(0) != got[0])
    throw std::invalid_argument(std::string(kind) + ": batch size mismatch between inputs and targets");
}

void zero_like(std::vector<Tensor>& grads, const std::vector<NamedParam>& params) {
  grads.clear();
  for (const auto& p : params) grads.push_back(Tensor::zeros(p.value.shape()));
}

// ---- linear regression ----

class LinregModel final : public Model {
 public:
  explicit LinregModel(const ModelSpec& spec) : d_(spec.features), k_(spec.outputs) {
    params_.push_back({"W", Tensor::zeros(Shape{d_, k_})});
    params_.push_back({"b", Tensor::zeros(Shape{k_})});
  }

  const char* kind() const override { return "linreg"; }
  std::vector<NamedParam>& params() override { return params_; }
  const std::vector<NamedParam>& params() const override { return params_; }
  const char* metric_name() const override { return "mse"; }

  double loss(const Batch& batch) const override {
    Tensor diff = residual(batch);
    return kernels::sum_squares(diff.data()) / static_cast<double>(batch.inputs.dim(0));
  }

  double loss_and_grads(const Batch& batch, std::vector<Tensor>& grads) const override {
    const std::int64_t B = batch.inputs.dim(0);
    Tensor diff = residual(batch);
    zero_like(grads, params_);
    kernels::matmul_tn(batch.inputs.data(), diff.data(), grads[0].data(), B, d_, k_);
    kernels::col_sums(diff.data(), B, k_, grads[1].data());
    const double scale = 2.0 / static_cast<double>(B);
    kernels::scale(grads[0].data(), scale);
    kernels::scale(grads[1].data(), scale);
    return kernels::sum_squares(diff.data()) / static_cast<double>(B);
  }

  double eval_metric(const Batch& batch) const override {
    Tensor diff = residual(batch);
    return kernels::sum_squares(diff.data()) /
           static_cast<double>(batch.inputs.dim(0) * k_);
  }

 private:
  Tensor residual(const Batch& batch) const {
    require_inputs(batch, Shape{d_}, "linreg");
    const std::int64_t B = batch.inputs.dim(0);
    Tensor yhat = Tensor::zeros(Shape{B, k_});
    kernels::matmul(batch.inputs.data(), params_[0].value.data(), yhat.data(), B, d_, k_);
    const double* b = params_[1].value.data().data();
    const double* y = batch.targets.data().data();
    double* out = yhat.data().data();
    for (std::int64_t i = 0; i < B; ++i)
      for (std::int64_t c = 0; c < k_; ++c) out[i * k_ + c] += b[c] - y[i * k_ + c];
    return yhat;
  }

  std::int64_t d_, k_;
  std::vector<NamedParam> params_;
};

// ---- logistic regression ----

class LogregModel final : public Model {
 public:
  explicit LogregModel(const ModelSpec& spec) : d_(spec.features) {
    params_.push_back({"w", Tensor::zeros(Shape{d_})});
    params_.push_back({"b", Tensor::zeros(Shape{1})});
  }

  const char* kind() const override { return "logreg"; }
  std::vector<NamedParam>& params() override { return params_; }
  const std::vector<NamedParam>& params() const override { return params_; }
  const char* metric_name() const override { return "accuracy"; }

  double loss(const Batch& batch) const override {
    require_inputs(batch, Shape{d_}, "logreg");
    const std::int64_t B = batch.inputs.dim(0);
    double total = 0.0;
    for (std::int64_t i = 0; i < B; ++i) {
      const double z = logit(batch, i).first;
      total += softplus(z) - z * batch.targets[i];
    }
    return total / static_cast<double>(B);
  }

  double loss_and_grads(const Batch& batch, std::vector<Tensor>& grads) const override {
    require_inputs(batch, Shape{d_}, "logreg");
    const std::int64_t B = batch.inputs.dim(0);
    zero_like(grads, params_);
    double* dw = grads[0].data().data();
    double* db = grads[1].data().data();
    const double* x = batch.inputs.data().data();
    double total = 0.0;
    for (std::int64_t i = 0; i < B; ++i) {
      const auto [z, inside] = logit(batch, i);
      const double y = batch.targets[i];
      total += softplus(z) - z * y;
      const double e = inside ? (sigmoid(z) - y) / static_cast<double>(B) : 0.0;
      for (std::int64_t j = 0; j < d_; ++j) dw[j] += e * x[i * d_ + j];
      db[0] += e;
    }
    return total / static_cast<double>(B);
  }

  double eval_metric(const Batch& batch) const override {
    require_inputs(batch, Shape{d_}, "logreg");
    const std::int64_t B = batch.inputs.dim(0);
    std::int64_t correct = 0;
    for (std::int64_t i = 0; i < B; ++i) {
      const double z = logit(batch, i).first;
      if ((z >= 0.0) == (batch.targets[i] >= 0.5)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(B);
  }

 private:
  // clamped logit and whether the raw value was strictly inside the clamp
  std::pair<double, bool> logit(const Batch& batch, std::int64_t i) const {
    const double* x = batch.inputs.data().data() + i * d_;
    const double* w = params_[0].value.data().data();
    double z = params_[1].value[0];
    for (std::int64_t j = 0; j < d_; ++j) z += w[j] * x[j];
    const bool inside = z > -kLogitClamp && z < kLogitClamp;
    if (!inside) z = z < 0.0 ? -kLogitClamp : kLogitClamp;
    return {z, inside};
  }

  std::int64_t d_;
  std::vector<NamedParam> params_;
};

// ---- one-hidden-layer tanh MLP, BCE head ----

class MlpModel final : public Model {
 public:
  explicit MlpModel(const ModelSpec& spec) : d_(spec.features), h_(spec.hidden) {
    SplitMix64 rng(spec.init_seed);
    Tensor w1 = Tensor::zeros(Shape{d_, h_});
    for (auto& v : w1.data()) v = rng.normal() / std::sqrt(static_cast<double>(d_));
    Tensor w2 = Tensor::zeros(Shape{h_});
    for (auto& v : w2.data()) v = rng.normal() / std::sqrt(static_cast<double>(h_));
    params_.push_back({"W1", std::move(w1)});
    params_.push_back({"b1", Tensor::zeros(Shape{h_})});
    params_.push_back({"w2", std::move(w2)});
    params_.push_back({"b2", Tensor::zeros(Shape{1})});
  }

  const char* kind() const override { return "mlp"; }
  std::vector<NamedParam>& params() override { return params_; }
  const std::vector<NamedParam>& params() const override { return params_; }
  const char* metric_name() const override { return "accuracy"; }

  double loss(const Batch& batch) const override {
    return forward(batch, nullptr, nullptr);
  }

  double loss_and_grads(const Batch& batch, std::vector<Tensor>& grads) const override {
    require_inputs(batch, Shape{d_}, "mlp");
    const std::int64_t B = batch.inputs.dim(0);
    Tensor H = Tensor::zeros(Shape{B, h_});
    std::vector<double> e(static_cast<std::size_t>(B));
    const double total = forward(batch, &H, e.data());

    zero_like(grads, params_);
    const double* w2 = params_[2].value.data().data();
    Tensor dA = Tensor::zeros(Shape{B, h_});
    double* da = dA.data().data();
    const double* hp = H.data().data();
    double* dw2 = grads[2].data().data();
    double* db2 = grads[3].data().data();
    for (std::int64_t i = 0; i < B; ++i) {
      for (std::int64_t j = 0; j < h_; ++j) {
        const double hij = hp[i * h_ + j];
        dw2[j] += e[static_cast<std::size_t>(i)] * hij;
        da[i * h_ + j] = e[static_cast<std::size_t>(i)] * w2[j] * (1.0 - hij * hij);
      }
      db2[0] += e[static_cast<std::size_t>(i)];
    }
    kernels::matmul_tn(batch.inputs.data(), dA.data(), grads[0].data(), B, d_, h_);
    kernels::col_sums(dA.data(), B, h_, grads[1].data());
    return total;
  }

  double eval_metric(const Batch& batch) const override {
    require_inputs(batch, Shape{d_}, "mlp");
    const std::int64_t B = batch.inputs.dim(0);
    Tensor H = Tensor::zeros(Shape{B, h_});
    std::int64_t correct = 0;
    hidden(batch, H);
    for (std::int64_t i = 0; i < B; ++i) {
      const double z = head(H, i);
      if ((z >= 0.0) == (batch.targets[i] >= 0.5)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(B);
  }

 private:
  void hidden(const Batch& batch, Tensor& H) const {
    const std::int64_t B = batch.inputs.dim(0);
    kernels::matmul(batch.inputs.data(), params_[0].value.data(), H.data(), B, d_, h_);
    const double* b1 = params_[1].value.data().data();
    double* hp = H.data().data();
    for (std::int64_t i = 0; i < B; ++i)
      for (std::int64_t j = 0; j < h_; ++j) hp[i * h_ + j] = std::tanh(hp[i * h_ + j] + b1[j]);
  }

  double head(const Tensor& H, std::int64_t i) const {
    const double* w2 = params_[2].value.data().data();
    const double* hp = H.data().data() + i * h_;
    double z = params_[3].value[0];
    for (std::int64_t j = 0; j < h_; ++j) z += w2[j] * hp[j];
    return z;
  }

  // loss; optionally keeps the hidden activations and the per-sample error
  // e_i = (sigmoid(z_i) - y_i)/B (zeroed where the logit clamp is active)
  double forward(const Batch& batch, Tensor* H_out, double* e_out) const {
    require_inputs(batch, Shape{d_}, "mlp");
    const std::int64_t B = batch.inputs.dim(0);
    Tensor H = Tensor::zeros(Shape{B, h_});
    hidden(batch, H);
    double total = 0.0;
    for (std::int64_t i = 0; i < B; ++i) {
      double z = head(H, i);
      const bool inside = z > -kLogitClamp && z < kLogitClamp;
      if (!inside) z = z < 0.0 ? -kLogitClamp : kLogitClamp;
      const double y = batch.targets[i];
      total += softplus(z) - z * y;
      if (e_out)
        e_out[i] = inside ? (sigmoid(z) - y) / static_cast<double>(B) : 0.0;
    }
    if (H_out) *H_out = std::move(H);
    return total / static_cast<double>(B);
  }

  std::int64_t d_, h_;
  std::vector<NamedParam> params_;
};

// ---- rank-4 contraction ----

class Rank4Model final : public Model {
 public:
  explicit Rank4Model(const ModelSpec& spec)
      : k_(spec.outputs), c_(spec.channels), h_(spec.height), w_(spec.width),
        p_(spec.channels * spec.height * spec.width) {
    SplitMix64 rng(spec.init_seed);
    Tensor K = Tensor::zeros(Shape{k_, c_, h_, w_});
    for (auto& v : K.data()) v = 0.1 * rng.normal() / std::sqrt(static_cast<double>(p_));
    params_.push_back({"K", std::move(K)});
    params_.push_back({"b", Tensor::zeros(Shape{k_})});
  }

  const char* kind() const override { return "rank4"; }
  std::vector<NamedParam>& params() override { return params_; }
  const std::vector<NamedParam>& params() const override { return params_; }
  const char* metric_name() const override { return "mse"; }

  double loss(const Batch& batch) const override {
    Tensor diff = residual(batch);
    return kernels::sum_squares(diff.data()) / static_cast<double>(batch.inputs.dim(0));
  }

  double loss_and_grads(const Batch& batch, std::vector<Tensor>& grads) const override {
    const std::int64_t B = batch.inputs.dim(0);
    Tensor diff = residual(batch);
    zero_like(grads, params_);
    kernels::matmul_tn(diff.data(), batch.inputs.data(), grads[0].data(), B, k_, p_);
    kernels::col_sums(diff.data(), B, k_, grads[1].data());
    const double scale = 2.0 / static_cast<double>(B);
    kernels::scale(grads[0].data(), scale);
    kernels::scale(grads[1].data(), scale);
    return kernels::sum_squares(diff.data()) / static_cast<double>(B);
  }

  double eval_metric(const Batch& batch) const override {
    Tensor diff = residual(batch);
    return kernels::sum_squares(diff.data()) /
           static_cast<double>(batch.inputs.dim(0) * k_);
  }

 private:
  Tensor residual(const Batch& batch) const {
    require_inputs(batch, Shape{c_, h_, w_}, "rank4");
    const std::int64_t B = batch.inputs.dim(0);
    Tensor o = Tensor::zeros(Shape{B, k_});
    kernels::matmul_nt(batch.inputs.data(), params_[0].value.data(), o.data(), B, p_, k_);
    const double* b = params_[1].value.data().data();
    const double* y = batch.targets.data().data();
    double* op = o.data().data();
    for (std::int64_t i = 0; i < B; ++i)
      for (std::int64_t c = 0; c < k_; ++c) op[i * k_ + c] += b[c] - y[i * k_ + c];
    return o;
  }

  std::int64_t k_, c_, h_, w_, p_;
  std::vector<NamedParam> params_;
};

} // namespace

std::unique_ptr<Model> make_model(const ModelSpec& spec) {
  if (spec.features < 1 || spec.outputs < 1 || spec.hidden < 1 || spec.channels < 1 ||
      spec.height < 1 || spec.width < 1)
    throw std::invalid_argument("model dimensions must be >= 1");
  if (spec.kind == "linreg") return std::make_unique<LinregModel>(spec);
  if (spec.kind == "logreg") return std::make_unique<LogregModel>(spec);
  if (spec.kind == "mlp") return std::make_unique<MlpModel>(spec);
  if (spec.kind == "rank4") return std::make_unique<Rank4Model>(spec);
  throw std::invalid_argument("unknown model kind '" + spec.kind +
                              "' (expected linreg|logreg|mlp|rank4)");
}

} // namespace smmf
