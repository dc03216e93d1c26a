#include "smmf/bench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace smmf {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items())
    if (!known.contains(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + std::string(key) + "': " + e.what());
  }
}

void parse_optimizer(const json& obj, ExperimentConfig& cfg) {
  reject_unknown(obj,
                 {"kind", "lr", "beta1", "growth_rate", "decay_rate", "eps", "weight_decay",
                  "weight_decay_mode", "vector_reshape", "sign_storage", "adam_beta2",
                  "adam_bias_correction", "adafactor_eps1", "adafactor_eps2",
                  "adafactor_clip"},
                 "optimizer");
  read_field(obj, "kind", cfg.optimizer);
  read_field(obj, "lr", cfg.hp.lr);
  if (obj.contains("beta1")) {
    if (obj.at("beta1").is_null())
      cfg.hp.beta1.reset();
    else {
      double b = 0.0;
      read_field(obj, "beta1", b);
      cfg.hp.beta1 = b;
    }
  }
  read_field(obj, "growth_rate", cfg.hp.growth_rate);
  read_field(obj, "decay_rate", cfg.hp.decay_rate);
  read_field(obj, "eps", cfg.hp.eps);
  read_field(obj, "weight_decay", cfg.hp.weight_decay);
  if (obj.contains("weight_decay_mode")) {
    std::string mode;
    read_field(obj, "weight_decay_mode", mode);
    cfg.hp.weight_decay_mode = weight_decay_mode_from_string(mode);
  }
  read_field(obj, "vector_reshape", cfg.hp.vector_reshape);
  if (obj.contains("sign_storage")) {
    std::string mode;
    read_field(obj, "sign_storage", mode);
    cfg.hp.sign_storage = sign_storage_from_string(mode);
  }
  read_field(obj, "adam_beta2", cfg.hp.adam_beta2);
  read_field(obj, "adam_bias_correction", cfg.hp.adam_bias_correction);
  read_field(obj, "adafactor_eps1", cfg.hp.adafactor_eps1);
  read_field(obj, "adafactor_eps2", cfg.hp.adafactor_eps2);
  read_field(obj, "adafactor_clip", cfg.hp.adafactor_clip);
}

void parse_model(const json& obj, ModelSpec& spec) {
  reject_unknown(obj,
                 {"kind", "features", "outputs", "hidden", "channels", "height", "width",
                  "init_seed"},
                 "model");
  read_field(obj, "kind", spec.kind);
  read_field(obj, "features", spec.features);
  read_field(obj, "outputs", spec.outputs);
  read_field(obj, "hidden", spec.hidden);
  read_field(obj, "channels", spec.channels);
  read_field(obj, "height", spec.height);
  read_field(obj, "width", spec.width);
  read_field(obj, "init_seed", spec.init_seed);
}

void parse_data(const json& obj, DataSpec& spec) {
  reject_unknown(obj,
                 {"kind", "n", "seed", "features", "outputs", "noise", "mean", "channels",
                  "height", "width"},
                 "data");
  read_field(obj, "kind", spec.kind);
  read_field(obj, "n", spec.n);
  read_field(obj, "seed", spec.seed);
  read_field(obj, "features", spec.features);
  read_field(obj, "outputs", spec.outputs);
  read_field(obj, "noise", spec.noise);
  read_field(obj, "mean", spec.mean);
  read_field(obj, "channels", spec.channels);
  read_field(obj, "height", spec.height);
  read_field(obj, "width", spec.width);
}

} // namespace

void ExperimentConfig::validate() const {
  try {
    hp.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("optimizer: ") + e.what());
  }
  if (optimizer != "smmf" && optimizer != "adam" && optimizer != "adafactor" &&
      optimizer != "sgd")
    throw ConfigError("unknown optimizer kind '" + optimizer + "'");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (batch_size < 0) throw ConfigError("batch_size must be >= 0");
  if (warmup_steps < 0) throw ConfigError("warmup_steps must be >= 0");
  if (cadence < 1) throw ConfigError("cadence must be >= 1");
  if (eval_n < 1) throw ConfigError("eval_n must be >= 1");
  if (state_bpe != 4 && state_bpe != 8) throw ConfigError("state_bpe must be 4 or 8");
  if (output.empty()) throw ConfigError("output path must be non-empty");

  const bool flat_model =
      model.kind == "linreg" || model.kind == "logreg" || model.kind == "mlp";
  if (flat_model) {
    if (data.kind == "patches") throw ConfigError("model '" + model.kind +
                                                  "' needs flat inputs, not patches");
    if (model.features != data.features)
      throw ConfigError("model.features must equal data.features");
  }
  if (model.kind == "linreg") {
    if (data.kind != "linreg") throw ConfigError("linreg model needs linreg data");
    if (model.outputs != data.outputs)
      throw ConfigError("model.outputs must equal data.outputs");
  }
  if ((model.kind == "logreg" || model.kind == "mlp") && data.kind != "two-gaussians")
    throw ConfigError(model.kind + " model needs two-gaussians data");
  if (model.kind == "rank4") {
    if (data.kind != "patches") throw ConfigError("rank4 model needs patches data");
    if (model.channels != data.channels || model.height != data.height ||
        model.width != data.width || model.outputs != data.outputs)
      throw ConfigError("rank4 model dims must equal patches data dims");
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown(root,
                 {"optimizer", "model", "data", "steps", "batch_size", "warmup_steps",
                  "cadence", "eval_n", "state_bpe", "timing", "output"},
                 "config");
  ExperimentConfig cfg;
  try {
    if (root.contains("optimizer")) parse_optimizer(root.at("optimizer"), cfg);
    if (root.contains("model")) parse_model(root.at("model"), cfg.model);
    if (root.contains("data")) parse_data(root.at("data"), cfg.data);
    read_field(root, "steps", cfg.steps);
    read_field(root, "batch_size", cfg.batch_size);
    read_field(root, "warmup_steps", cfg.warmup_steps);
    read_field(root, "cadence", cfg.cadence);
    read_field(root, "eval_n", cfg.eval_n);
    read_field(root, "state_bpe", cfg.state_bpe);
    read_field(root, "timing", cfg.timing);
    read_field(root, "output", cfg.output);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

} // namespace smmf
