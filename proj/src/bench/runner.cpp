#include "smmf/bench/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include "bench_detail.hpp"
#include "smmf/kernels.hpp"
#include "smmf/optim/optimizer.hpp"

namespace smmf {

namespace bench_detail {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_row(std::ostream& os, std::int64_t step, double loss, double metric,
               double grad_norm, double update_norm, std::int64_t state_bytes,
               std::optional<double> regret, double wall_ms) {
  char wall[32];
  std::snprintf(wall, sizeof(wall), "%.3f", wall_ms);
  os << step << ',' << fmt(loss) << ',' << fmt(metric) << ',' << fmt(grad_norm) << ','
     << fmt(update_norm) << ',' << state_bytes << ','
     << (regret ? fmt(*regret) : std::string()) << ',' << wall << '\n';
}

double grad_l2(const std::vector<Tensor>& grads) {
  double sq = 0.0;
  for (const auto& g : grads) sq += kernels::sum_squares(g.data());
  return std::sqrt(sq);
}

double update_l2(const std::vector<NamedParam>& params, const std::vector<Tensor>& before) {
  double sq = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto a = params[i].value.data();
    const auto b = before[i].data();
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double d = a[j] - b[j];
      sq += d * d;
    }
  }
  return std::sqrt(sq);
}

} // namespace bench_detail

RunResult run_experiment(const ExperimentConfig& cfg) {
  using clock = std::chrono::steady_clock;
  namespace bd = bench_detail;
  cfg.validate();
  auto [train, held] = synth_data_with_holdout(cfg.data, cfg.eval_n);
  auto model = make_model(cfg.model);
  auto opt = make_optimizer(cfg.optimizer, cfg.hp);

  std::ofstream csv(cfg.output);
  if (!csv) throw ConfigError("cannot open output '" + cfg.output + "'");
  csv << kMetricsHeader << '\n';

  const Batch held_batch = held.full();
  const double base_lr = cfg.hp.lr;
  std::vector<Tensor> grads;
  std::vector<Tensor> before;
  RunResult res;
  double window_ms = 0.0;
  for (std::int64_t t = 1; t <= cfg.steps; ++t) {
    if (cfg.warmup_steps > 0)
      opt->set_lr(base_lr * std::min(1.0, static_cast<double>(t) /
                                              static_cast<double>(cfg.warmup_steps)));
    const Batch batch = train.batch(t - 1, cfg.batch_size);
    const double loss = model->loss_and_grads(batch, grads);
    res.steps_run = t;
    if (!std::isfinite(loss)) {
      bd::write_row(csv, t, loss, 0.0, 0.0, 0.0, opt->state_bytes(cfg.state_bpe),
                    std::nullopt, 0.0);
      res.diverged = true;
      res.final_loss = loss;
      break;
    }
    const bool row = (t % cfg.cadence == 0) || t == cfg.steps;
    if (row) {
      before.clear();
      for (const auto& p : model->params()) before.push_back(p.value);
    }
    const auto t0 = clock::now();
    opt->step(model->params(), grads);
    const double ms =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    res.opt_wall_ms += ms;
    window_ms += ms;
    if (row) {
      const double metric = model->eval_metric(held_batch);
      bd::write_row(csv, t, loss, metric, bd::grad_l2(grads),
                    bd::update_l2(model->params(), before),
                    opt->state_bytes(cfg.state_bpe), std::nullopt,
                    cfg.timing ? window_ms : 0.0);
      window_ms = 0.0;
      res.final_loss = loss;
      res.final_metric = metric;
    }
  }
  res.state_bytes = opt->state_bytes(cfg.state_bpe);
  return res;
}

} // namespace smmf
