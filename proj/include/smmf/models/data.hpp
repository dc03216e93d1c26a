#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "smmf/tensor.hpp"

namespace smmf {

struct Batch {
  Tensor inputs;   // (B, d) or (B, c, h, w)
  Tensor targets;  // (B,) or (B, k)
};

struct DataSpec {
  std::string kind = "two-gaussians";  // linreg | two-gaussians | patches
  std::int64_t n = 1000;
  std::uint64_t seed = 1;
  std::int64_t features = 20;
  std::int64_t outputs = 1;
  double noise = 0.1;  // target noise sigma for linreg/patches
  double mean = 2.0;   // two-gaussians class centers at +-mean per coordinate
  std::int64_t channels = 3, height = 3, width = 3;  // patches input dims
};

// A full synthetic dataset held in memory. Minibatches come from a fixed
// partition: batch b covers rows [b*bs, min(n, (b+1)*bs)), and batch(t)
// cycles t modulo the partition size.
struct Dataset {
  std::string kind;
  Tensor X;
  Tensor Y;

  std::int64_t n() const { return X.dim(0); }
  std::int64_t num_batches(std::int64_t batch_size) const;
  // index is cycled; batch_size <= 0 or >= n returns the whole set
  Batch batch(std::int64_t index, std::int64_t batch_size) const;
  Batch full() const;
};

// Generating processes (one SplitMix64 stream seeded with spec.seed):
//   linreg:        W* then b* as normals, then per sample x ~ N(0, I),
//                  y = x W* + b* + noise*eps
//   two-gaussians: per sample one label bit, then x ~ N(label ? +mean
//                  : -mean, I), y in {0, 1}
//   patches:       K* (outputs x c*h*w) and b* as normals, then per sample
//                  x ~ N(0, I), y = K* x + b* + noise*eps
Dataset synth_data(const DataSpec& spec);

// Train set plus a held-out set of eval_n samples drawn from the same
// stream (identical ground truth). Deterministic for a given DataSpec.
std::pair<Dataset, Dataset> synth_data_with_holdout(const DataSpec& spec, std::int64_t eval_n);

} // namespace smmf
