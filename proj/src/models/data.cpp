#include "smmf/models/data.hpp"

#include <algorithm>
#include <stdexcept>

#include "smmf/models/rng.hpp"

namespace smmf {

std::int64_t Dataset::num_batches(std::int64_t batch_size) const {
  if (batch_size <= 0 || batch_size >= n()) return 1;
  return (n() + batch_size - 1) / batch_size;
}

namespace {

Tensor copy_rows(const Tensor& t, std::int64_t lo, std::int64_t hi) {
  Shape shape = t.shape();
  const std::int64_t row_elems = t.numel() / shape[0];
  shape[0] = hi - lo;
  Tensor out(shape);
  std::copy(t.data().begin() + lo * row_elems, t.data().begin() + hi * row_elems,
            out.data().begin());
  return out;
}

} // namespace

Batch Dataset::batch(std::int64_t index, std::int64_t batch_size) const {
  if (batch_size <= 0 || batch_size >= n()) return full();
  const std::int64_t nb = num_batches(batch_size);
  const std::int64_t b = index % nb;
  const std::int64_t lo = b * batch_size;
  const std::int64_t hi = std::min(n(), lo + batch_size);
  return Batch{copy_rows(X, lo, hi), copy_rows(Y, lo, hi)};
}

Batch Dataset::full() const { return Batch{X, Y}; }

namespace {

Dataset generate(const DataSpec& spec, std::int64_t n, SplitMix64& rng,
                 const std::vector<double>& truth_w, const std::vector<double>& truth_b) {
  Dataset ds;
  ds.kind = spec.kind;
  if (spec.kind == "linreg") {
    const std::int64_t d = spec.features, k = spec.outputs;
    ds.X = Tensor::zeros(Shape{n, d});
    ds.Y = Tensor::zeros(Shape{n, k});
    for (std::int64_t i = 0; i < n; ++i) {
      double* x = ds.X.data().data() + i * d;
      for (std::int64_t j = 0; j < d; ++j) x[j] = rng.normal();
      double* y = ds.Y.data().data() + i * k;
      for (std::int64_t c = 0; c < k; ++c) {
        double v = truth_b[static_cast<std::size_t>(c)];
        for (std::int64_t j = 0; j < d; ++j)
          v += x[j] * truth_w[static_cast<std::size_t>(j * k + c)];
        y[c] = v;
      }
      for (std::int64_t c = 0; c < k; ++c) y[c] += spec.noise * rng.normal();
    }
  } else if (spec.kind == "two-gaussians") {
    const std::int64_t d = spec.features;
    ds.X = Tensor::zeros(Shape{n, d});
    ds.Y = Tensor::zeros(Shape{n});
    for (std::int64_t i = 0; i < n; ++i) {
      const bool label = (rng.next() & 1ull) != 0;
      const double center = label ? spec.mean : -spec.mean;
      double* x = ds.X.data().data() + i * d;
      for (std::int64_t j = 0; j < d; ++j) x[j] = center + rng.normal();
      ds.Y[i] = label ? 1.0 : 0.0;
    }
  } else if (spec.kind == "patches") {
    const std::int64_t p = spec.channels * spec.height * spec.width;
    const std::int64_t k = spec.outputs;
    ds.X = Tensor::zeros(Shape{n, spec.channels, spec.height, spec.width});
    ds.Y = Tensor::zeros(Shape{n, k});
    for (std::int64_t i = 0; i < n; ++i) {
      double* x = ds.X.data().data() + i * p;
      for (std::int64_t j = 0; j < p; ++j) x[j] = rng.normal();
      double* y = ds.Y.data().data() + i * k;
      for (std::int64_t c = 0; c < k; ++c) {
        double v = truth_b[static_cast<std::size_t>(c)];
        for (std::int64_t j = 0; j < p; ++j)
          v += truth_w[static_cast<std::size_t>(c * p + j)] * x[j];
        y[c] = v;
      }
      for (std::int64_t c = 0; c < k; ++c) y[c] += spec.noise * rng.normal();
    }
  } else {
    throw std::invalid_argument("unknown dataset kind '" + spec.kind +
                                "' (expected linreg|two-gaussians|patches)");
  }
  return ds;
}

void draw_truth(const DataSpec& spec, SplitMix64& rng, std::vector<double>& w,
                std::vector<double>& b) {
  if (spec.kind == "linreg") {
    w.resize(static_cast<std::size_t>(spec.features * spec.outputs));
    b.resize(static_cast<std::size_t>(spec.outputs));
  } else if (spec.kind == "patches") {
    w.resize(static_cast<std::size_t>(spec.outputs * spec.channels * spec.height * spec.width));
    b.resize(static_cast<std::size_t>(spec.outputs));
  } else {
    return;
  }
  for (auto& v : w) v = rng.normal();
  for (auto& v : b) v = rng.normal();
}

void check_spec(const DataSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("dataset n must be >= 1");
  if (spec.features < 1 || spec.outputs < 1 || spec.channels < 1 || spec.height < 1 ||
      spec.width < 1)
    throw std::invalid_argument("dataset dimensions must be >= 1");
  if (spec.noise < 0.0) throw std::invalid_argument("dataset noise must be >= 0");
}

} // namespace

Dataset synth_data(const DataSpec& spec) {
  check_spec(spec);
  SplitMix64 rng(spec.seed);
  std::vector<double> w, b;
  draw_truth(spec, rng, w, b);
  return generate(spec, spec.n, rng, w, b);
}

std::pair<Dataset, Dataset> synth_data_with_holdout(const DataSpec& spec,
                                                    std::int64_t eval_n) {
  check_spec(spec);
  if (eval_n < 1) throw std::invalid_argument("eval_n must be >= 1");
  SplitMix64 rng(spec.seed);
  std::vector<double> w, b;
  draw_truth(spec, rng, w, b);
  Dataset train = generate(spec, spec.n, rng, w, b);
  Dataset held = generate(spec, eval_n, rng, w, b);
  return {std::move(train), std::move(held)};
}

} // namespace smmf
