#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "smmf/bench/runner.hpp"
#include "smmf/matricize.hpp"
#include "smmf/memory/ledger.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

// SMMF_SEED overrides data.seed without touching the config file.
void apply_seed_env(smmf::ExperimentConfig& cfg) {
  const char* env = std::getenv("SMMF_SEED");
  if (!env || !*env) return;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(env, &pos);
    if (pos != std::string(env).size()) throw std::invalid_argument("trailing characters");
    cfg.data.seed = static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw smmf::ConfigError(std::string("SMMF_SEED is not a valid unsigned integer: '") +
                            env + "'");
  }
}

int cmd_run(const std::string& path) {
  auto cfg = smmf::load_config(path);
  apply_seed_env(cfg);
  const auto res = smmf::run_experiment(cfg);
  if (res.diverged) {
    std::fprintf(stderr, "diverged at step %lld (non-finite loss); partial metrics in %s\n",
                 static_cast<long long>(res.steps_run), cfg.output.c_str());
    return kExitDiverged;
  }
  std::printf("ran %lld steps, final loss %.6g, final %s %.6g, state %lld B\n",
              static_cast<long long>(res.steps_run), res.final_loss,
              cfg.model.kind == "linreg" ? "mse" : "accuracy", res.final_metric,
              static_cast<long long>(res.state_bytes));
  std::printf("metrics written to %s\n", cfg.output.c_str());
  return kExitOk;
}

int cmd_regret(const std::string& path) {
  auto cfg = smmf::load_config(path);
  apply_seed_env(cfg);
  const auto series = smmf::regret_track(cfg);
  if (series.diverged) {
    std::fprintf(stderr, "diverged (non-finite loss); partial metrics in %s\n",
                 cfg.output.c_str());
    return kExitDiverged;
  }
  std::printf("R(%lld) = %.6g over %zu steps\n", static_cast<long long>(cfg.steps),
              series.total, series.inst_loss.size());
  std::printf("comparator: %s after %lld iterations, gradient norm %.3g\n",
              series.comparator_converged ? "converged" : "NOT converged",
              static_cast<long long>(series.comparator_iters), series.comparator_grad_norm);
  std::printf("metrics written to %s\n", cfg.output.c_str());
  if (!series.comparator_converged) {
    std::fprintf(stderr, "comparator failed to reach gradient norm < 1e-8; regret values "
                         "are against the best iterate found\n");
    return kExitDiverged;
  }
  return kExitOk;
}

int cmd_memory(const std::string& path, int bpe, const std::string& signs,
               bool no_first_moment, const std::string& csv_path) {
  smmf::LedgerOptions opts;
  opts.bpe = bpe;
  opts.sign_mode = signs == "byte" ? smmf::SignStorage::Byte8Bit
                                   : smmf::SignStorage::Packed1Bit;
  opts.adafactor_first_moment = !no_first_moment;
  const auto manifest = smmf::load_manifest(path);
  const auto rep = smmf::report(manifest, opts);
  smmf::write_report_table(std::cout, rep);
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw smmf::ConfigError("cannot open output '" + csv_path + "'");
    smmf::write_report_csv(csv, rep);
    std::printf("csv written to %s\n", csv_path.c_str());
  }
  return kExitOk;
}

int cmd_shape(std::int64_t numel) {
  const auto ms = smmf::square_matricize_shape(numel);
  std::printf("%lldx%lld\n", static_cast<long long>(ms.rows),
              static_cast<long long>(ms.cols));
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"memory-efficient adaptive optimizer bench"};
  app.require_subcommand(1);

  std::string config_path;
  std::string manifest_path;
  std::string csv_path;
  int bpe = 4;
  std::string signs = "packed";
  bool no_first_moment = false;
  std::int64_t numel = 0;

  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("config", config_path, "config file")->required();

  auto* regret = app.add_subcommand(
      "regret", "run a convex experiment and compute cumulative regret");
  regret->add_option("config", config_path, "config file")->required();

  auto* memory =
      app.add_subcommand("memory", "optimizer state-size report for a shape manifest");
  memory->add_option("manifest", manifest_path, "shape manifest file")->required();
  memory->add_option("--bpe", bpe, "stored-state bytes per element")
      ->check(CLI::IsMember({4, 8}));
  memory->add_option("--signs", signs, "sign storage: packed or byte")
      ->check(CLI::IsMember({"packed", "byte"}));
  memory->add_flag("--adafactor-no-first-moment", no_first_moment,
                   "size adafactor without the dense first moment");
  memory->add_option("--csv", csv_path, "also write name,optimizer,bytes rows here");

  auto* shape =
      app.add_subcommand("shape", "print the square-matricized shape of an element count");
  shape->add_option("N", numel, "element count")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (regret->parsed()) return cmd_regret(config_path);
    if (memory->parsed())
      return cmd_memory(manifest_path, bpe, signs, no_first_moment, csv_path);
    return cmd_shape(numel);
  } catch (const smmf::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
