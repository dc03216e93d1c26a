#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "smmf/models/data.hpp"
#include "smmf/models/model.hpp"
#include "smmf/optim/hyperparams.hpp"

namespace smmf {

// Setup problems (bad JSON, unknown keys, out-of-range values, missing
// files). The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string optimizer = "smmf";
  HyperParams hp;
  ModelSpec model;
  DataSpec data;
  std::int64_t steps = 100;
  std::int64_t batch_size = 0;  // 0: full batch
  std::int64_t warmup_steps = 0;
  std::int64_t cadence = 1;  // metrics row every this many steps, plus the final step
  std::int64_t eval_n = 1000;
  int state_bpe = 4;
  bool timing = false;  // wall_ms stays 0.000 when off, keeping the CSV reproducible
  std::string output = "metrics.csv";

  void validate() const;  // throws ConfigError
};

// Strict JSON schema: unknown keys anywhere are rejected. See the README
// for the field list; missing fields keep their defaults; "beta1": null
// selects momentum-free mode.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

} // namespace smmf
