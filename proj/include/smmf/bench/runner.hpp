#pragma once

#include <cstdint>
#include <vector>

#include "smmf/bench/config.hpp"

namespace smmf {

// Fixed CSV schema shared by run and regret outputs.
inline constexpr const char* kMetricsHeader =
    "step,loss,eval_metric,grad_norm,update_norm,optimizer_state_bytes,"
    "cumulative_regret,wall_ms";

struct RunResult {
  std::int64_t steps_run = 0;
  double final_loss = 0.0;
  double final_metric = 0.0;
  std::int64_t state_bytes = 0;
  bool diverged = false;
  // Time spent inside optimizer steps, summed over the run; measured even
  // when cfg.timing is off (it is only written to the CSV when on).
  double opt_wall_ms = 0.0;
};

// Runs the experiment and writes the metrics CSV to cfg.output: one row
// every cfg.cadence steps plus the final step. The loss column is
// f_t(w_t), evaluated on the step's batch before the update. A non-finite
// loss aborts with a diagnostic row and diverged=true, keeping the partial
// CSV.
RunResult run_experiment(const ExperimentConfig& cfg);

struct RegretSeries {
  std::vector<double> inst_loss;         // f_t(w_t)
  std::vector<double> comparator_loss;   // f_t(w*)
  std::vector<double> cumulative;        // R(t)
  double total = 0.0;
  bool diverged = false;
  bool comparator_converged = false;
  std::int64_t comparator_iters = 0;
  double comparator_grad_norm = 0.0;
};

// Convex runs only (linreg/logreg). Replays the fixed batch sequence
// f_1..f_T under the configured optimizer, then finds the fixed comparator
// w* by deterministic full-batch gradient descent (Barzilai-Borwein step
// with Armijo backtracking) on the sequence-mean objective, to gradient
// norm < 1e-8. Writes the metrics CSV with the cumulative_regret column
// filled.
RegretSeries regret_track(const ExperimentConfig& cfg);

} // namespace smmf
