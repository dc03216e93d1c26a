#include "smmf/optim/checkpoint.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace smmf {

namespace {

constexpr char kMagic[8] = {'S', 'M', 'M', 'F', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("read_checkpoint: truncated stream");
  return v;
}

void put_doubles(std::ostream& os, const std::vector<double>& v) {
  put(os, static_cast<std::uint64_t>(v.size()));
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::istream& is) {
  const auto n = get<std::uint64_t>(is);
  std::vector<double> v(n);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw std::runtime_error("read_checkpoint: truncated stream");
  return v;
}

} // namespace

void write_checkpoint(std::ostream& os, const SmmfOptimizer& opt) {
  os.write(kMagic, sizeof(kMagic));
  put(os, kVersion);
  put(os, static_cast<std::uint32_t>(opt.states().size()));
  for (const auto& [name, st] : opt.states()) {
    put(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put(os, static_cast<std::uint32_t>(st.original.size()));
    for (auto d : st.original) put(os, static_cast<std::int64_t>(d));
    put(os, static_cast<std::uint8_t>(st.factored ? 1 : 0));
    put(os, static_cast<std::int64_t>(st.t));
    put(os, static_cast<std::uint8_t>((st.factored ? st.m.has_value()
                                                   : !st.dense_m.empty()) ? 1 : 0));
    if (st.factored) {
      if (st.m) write_compressed(os, *st.m);
      write_compressed(os, st.v);
    } else {
      if (!st.dense_m.empty()) put_doubles(os, st.dense_m);
      put_doubles(os, st.dense_v);
    }
  }
}

void read_checkpoint(std::istream& is, SmmfOptimizer& opt) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("read_checkpoint: bad magic");
  if (get<std::uint32_t>(is) != kVersion)
    throw std::runtime_error("read_checkpoint: unsupported version");
  std::map<std::string, SmmfLayerState> states;
  const auto count = get<std::uint32_t>(is);
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto name_len = get<std::uint32_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw std::runtime_error("read_checkpoint: truncated stream");
    SmmfLayerState st;
    const auto rank = get<std::uint32_t>(is);
    st.original.resize(rank);
    for (auto& d : st.original) d = get<std::int64_t>(is);
    st.factored = get<std::uint8_t>(is) != 0;
    st.t = get<std::int64_t>(is);
    const bool has_m = get<std::uint8_t>(is) != 0;
    if (st.factored) {
      if (has_m) st.m = read_compressed(is);
      st.v = read_compressed(is);
      st.eshape = st.v.shape;
    } else {
      if (has_m) st.dense_m = get_doubles(is);
      st.dense_v = get_doubles(is);
      st.eshape = square_matricize_shape(static_cast<std::int64_t>(st.dense_v.size()));
    }
    if (st.t < 1) throw std::runtime_error("read_checkpoint: bad step counter");
    states.emplace(std::move(name), std::move(st));
  }
  opt.states() = std::move(states);
}

} // namespace smmf
