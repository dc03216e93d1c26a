#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "smmf/models/model.hpp"
#include "smmf/tensor.hpp"

namespace smmf::bench_detail {

std::string fmt(double v);

void write_row(std::ostream& os, std::int64_t step, double loss, double metric,
               double grad_norm, double update_norm, std::int64_t state_bytes,
               std::optional<double> regret, double wall_ms);

double grad_l2(const std::vector<Tensor>& grads);

double update_l2(const std::vector<NamedParam>& params, const std::vector<Tensor>& before);

} // namespace smmf::bench_detail
