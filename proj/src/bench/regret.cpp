#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <vector>

#include "bench_detail.hpp"
#include "smmf/bench/runner.hpp"
#include "smmf/kernels.hpp"
#include "smmf/optim/optimizer.hpp"

namespace smmf {

namespace {

constexpr double kComparatorTol = 1e-8;
constexpr std::int64_t kComparatorMaxIters = 100000;
constexpr double kArmijoC = 1e-4;

std::vector<double> flatten(const std::vector<NamedParam>& params) {
  std::vector<double> w;
  for (const auto& p : params) {
    const auto d = p.value.data();
    w.insert(w.end(), d.begin(), d.end());
  }
  return w;
}

void unflatten(const std::vector<double>& w, std::vector<NamedParam>& params) {
  std::size_t off = 0;
  for (auto& p : params) {
    auto d = p.value.data();
    std::copy(w.begin() + off, w.begin() + off + d.size(), d.begin());
    off += d.size();
  }
}

// Mean objective over the realized batch sequence: sum_b mult_b/T * f_b(w).
double weighted_loss(Model& m, const std::vector<Batch>& batches,
                     const std::vector<double>& wts) {
  double total = 0.0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    if (wts[b] == 0.0) continue;
    total += wts[b] * m.loss(batches[b]);
  }
  return total;
}

double weighted_loss_grad(Model& m, const std::vector<Batch>& batches,
                          const std::vector<double>& wts, std::vector<double>& grad) {
  std::vector<Tensor> gb;
  double total = 0.0;
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t b = 0; b < batches.size(); ++b) {
    if (wts[b] == 0.0) continue;
    total += wts[b] * m.loss_and_grads(batches[b], gb);
    std::size_t off = 0;
    for (const auto& g : gb) {
      const auto d = g.data();
      for (std::size_t j = 0; j < d.size(); ++j) grad[off + j] += wts[b] * d[j];
      off += d.size();
    }
  }
  return total;
}

double l2(const std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

struct RowBuf {
  std::int64_t step;
  double loss, metric, gnorm, unorm;
  std::int64_t bytes;
  double wall;
};

} // namespace

RegretSeries regret_track(const ExperimentConfig& cfg) {
  namespace bd = bench_detail;
  cfg.validate();
  if (cfg.model.kind != "linreg" && cfg.model.kind != "logreg")
    throw ConfigError("regret tracking requires a convex model (linreg or logreg), got '" +
                      cfg.model.kind + "'");

  auto [train, held] = synth_data_with_holdout(cfg.data, cfg.eval_n);
  auto model = make_model(cfg.model);
  auto opt = make_optimizer(cfg.optimizer, cfg.hp);

  std::ofstream csv(cfg.output);
  if (!csv) throw ConfigError("cannot open output '" + cfg.output + "'");
  csv << kMetricsHeader << '\n';

  const std::int64_t nb = train.num_batches(cfg.batch_size);
  std::vector<Batch> batches;
  batches.reserve(static_cast<std::size_t>(nb));
  for (std::int64_t b = 0; b < nb; ++b) batches.push_back(train.batch(b, cfg.batch_size));

  const Batch held_batch = held.full();
  const double base_lr = cfg.hp.lr;
  std::vector<Tensor> grads;
  std::vector<Tensor> before;
  std::vector<RowBuf> rows;
  RegretSeries series;
  series.inst_loss.reserve(static_cast<std::size_t>(cfg.steps));
  for (std::int64_t t = 1; t <= cfg.steps; ++t) {
    if (cfg.warmup_steps > 0)
      opt->set_lr(base_lr * std::min(1.0, static_cast<double>(t) /
                                              static_cast<double>(cfg.warmup_steps)));
    const Batch& batch = batches[static_cast<std::size_t>((t - 1) % nb)];
    const double loss = model->loss_and_grads(batch, grads);
    if (!std::isfinite(loss)) {
      for (const auto& r : rows)
        bd::write_row(csv, r.step, r.loss, r.metric, r.gnorm, r.unorm, r.bytes,
                      std::nullopt, r.wall);
      bd::write_row(csv, t, loss, 0.0, 0.0, 0.0, opt->state_bytes(cfg.state_bpe),
                    std::nullopt, 0.0);
      series.diverged = true;
      return series;
    }
    series.inst_loss.push_back(loss);
    const bool row = (t % cfg.cadence == 0) || t == cfg.steps;
    if (row) {
      before.clear();
      for (const auto& p : model->params()) before.push_back(p.value);
    }
    opt->step(model->params(), grads);
    if (row)
      rows.push_back({t, loss, model->eval_metric(held_batch), bd::grad_l2(grads),
                      bd::update_l2(model->params(), before),
                      opt->state_bytes(cfg.state_bpe), 0.0});
  }

  // Comparator: batch b is visited floor(T/nb) or one more time depending on
  // the remainder, so weight each batch loss by its visit count over T.
  std::vector<double> wts(static_cast<std::size_t>(nb), 0.0);
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::int64_t visits = cfg.steps / nb + (b < cfg.steps % nb ? 1 : 0);
    wts[static_cast<std::size_t>(b)] =
        static_cast<double>(visits) / static_cast<double>(cfg.steps);
  }

  auto comp = make_model(cfg.model);
  auto& comp_params = comp->params();
  std::vector<double> w = flatten(comp_params);
  std::vector<double> g(w.size());
  double L = weighted_loss_grad(*comp, batches, wts, g);
  double gn = l2(g);
  std::vector<double> w_prev, g_prev;
  std::vector<double> w_new(w.size());
  double alpha = 1.0 / std::max(1.0, gn);
  std::int64_t iters = 0;
  while (gn >= kComparatorTol && iters < kComparatorMaxIters) {
    if (!w_prev.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double s = w[i] - w_prev[i];
        const double y = g[i] - g_prev[i];
        ss += s * s;
        sy += s * y;
      }
      alpha = sy > 1e-300 ? ss / sy : alpha * 2.0;
      alpha = std::clamp(alpha, 1e-12, 1e12);
    }
    double step = alpha;
    double L_new = 0.0;
    for (int bt = 0;; ++bt) {
      for (std::size_t i = 0; i < w.size(); ++i) w_new[i] = w[i] - step * g[i];
      unflatten(w_new, comp_params);
      L_new = weighted_loss(*comp, batches, wts);
      if (L_new <= L - kArmijoC * step * gn * gn || bt >= 60) break;
      step *= 0.5;
    }
    w_prev = w;
    g_prev = g;
    w = w_new;
    unflatten(w, comp_params);
    L = weighted_loss_grad(*comp, batches, wts, g);
    gn = l2(g);
    ++iters;
  }
  series.comparator_converged = gn < kComparatorTol;
  series.comparator_iters = iters;
  series.comparator_grad_norm = gn;

  unflatten(w, comp_params);
  std::vector<double> comp_batch_loss(static_cast<std::size_t>(nb));
  for (std::int64_t b = 0; b < nb; ++b)
    comp_batch_loss[static_cast<std::size_t>(b)] =
        comp->loss(batches[static_cast<std::size_t>(b)]);

  series.comparator_loss.resize(static_cast<std::size_t>(cfg.steps));
  series.cumulative.resize(static_cast<std::size_t>(cfg.steps));
  double acc = 0.0;
  for (std::int64_t t = 1; t <= cfg.steps; ++t) {
    const double comp_loss = comp_batch_loss[static_cast<std::size_t>((t - 1) % nb)];
    series.comparator_loss[static_cast<std::size_t>(t - 1)] = comp_loss;
    acc += series.inst_loss[static_cast<std::size_t>(t - 1)] - comp_loss;
    series.cumulative[static_cast<std::size_t>(t - 1)] = acc;
  }
  series.total = acc;

  for (const auto& r : rows)
    bd::write_row(csv, r.step, r.loss, r.metric, r.gnorm, r.unorm, r.bytes,
                  series.cumulative[static_cast<std::size_t>(r.step - 1)], r.wall);
  return series;
}

} // namespace smmf
