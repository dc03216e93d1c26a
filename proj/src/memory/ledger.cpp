#include "smmf/memory/ledger.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "smmf/matricize.hpp"

namespace smmf {

std::int64_t state_bytes(const std::string& kind, const Shape& shape,
                         const LedgerOptions& opts) {
  const std::int64_t n = shape_numel(shape);
  const std::int64_t bpe = opts.bpe;
  if (kind == "adam") return 2 * n * bpe;
  if (kind == "adafactor") {
    std::int64_t bytes;
    if (shape.size() >= 2) {
      const std::int64_t a = shape[shape.size() - 2];
      const std::int64_t b = shape[shape.size() - 1];
      bytes = (n / (a * b)) * (a + b) * bpe;
    } else {
      bytes = n * bpe;
    }
    if (opts.adafactor_first_moment) bytes += n * bpe;
    return bytes;
  }
  if (kind == "smmf" || kind == "smmf-no-momentum") {
    const MatShape ms = square_matricize_shape(n);
    const std::int64_t pair = (ms.rows + ms.cols) * bpe;
    if (kind == "smmf-no-momentum") return pair;
    const std::int64_t sign_bytes =
        opts.sign_mode == SignStorage::Packed1Bit ? (n + 7) / 8 : n;
    return 2 * pair + sign_bytes;
  }
  throw std::invalid_argument("state_bytes: unknown optimizer kind '" + kind + "'");
}

std::int64_t smmf_scratch_bytes(const Shape& shape, int bpe) {
  return 6 * shape_numel(shape) * bpe;
}

namespace {

Shape parse_shape_token(const std::string& token, std::size_t line_no) {
  Shape shape;
  std::size_t pos = 0;
  while (pos < token.size()) {
    std::size_t end = token.find('x', pos);
    if (end == std::string::npos) end = token.size();
    const std::string axis = token.substr(pos, end - pos);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(axis, &used);
      if (used != axis.size() || v < 1) throw std::invalid_argument(axis);
      shape.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("manifest line " + std::to_string(line_no) +
                                  ": bad axis '" + axis + "'");
    }
    pos = end + 1;
  }
  if (shape.empty())
    throw std::invalid_argument("manifest line " + std::to_string(line_no) + ": empty shape");
  return shape;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

ShapeManifest parse_manifest(std::istream& is) {
  ShapeManifest manifest;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("manifest line " + std::to_string(line_no) +
                                  ": expected 'name: d1xd2x...'");
    const std::string name = trim(t.substr(0, colon));
    if (name.empty())
      throw std::invalid_argument("manifest line " + std::to_string(line_no) + ": empty name");
    if (!seen.insert(name).second)
      throw std::invalid_argument("manifest line " + std::to_string(line_no) +
                                  ": duplicate name '" + name + "'");
    manifest.entries.push_back({name, parse_shape_token(trim(t.substr(colon + 1)), line_no)});
  }
  return manifest;
}

ShapeManifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open manifest '" + path + "'");
  return parse_manifest(is);
}

MemoryReport report(const ShapeManifest& manifest, const LedgerOptions& opts) {
  if (manifest.entries.empty()) throw std::invalid_argument("empty manifest");
  MemoryReport rep;
  rep.opts = opts;
  rep.kinds = {"adam", "adafactor", "smmf", "smmf-no-momentum"};
  rep.entries = manifest.entries;
  rep.totals.assign(rep.kinds.size(), 0);
  for (const auto& entry : rep.entries) {
    std::vector<std::int64_t> row;
    for (std::size_t j = 0; j < rep.kinds.size(); ++j) {
      row.push_back(state_bytes(rep.kinds[j], entry.shape, opts));
      rep.totals[j] += row.back();
    }
    rep.bytes.push_back(std::move(row));
    rep.smmf_scratch_total += smmf_scratch_bytes(entry.shape, opts.bpe);
  }
  return rep;
}

void write_report_csv(std::ostream& os, const MemoryReport& rep) {
  os << "name,optimizer,bytes\n";
  for (std::size_t i = 0; i < rep.entries.size(); ++i)
    for (std::size_t j = 0; j < rep.kinds.size(); ++j)
      os << rep.entries[i].name << ',' << rep.kinds[j] << ',' << rep.bytes[i][j] << '\n';
  for (std::size_t j = 0; j < rep.kinds.size(); ++j)
    os << "total," << rep.kinds[j] << ',' << rep.totals[j] << '\n';
}

namespace {

std::string shape_label(const Shape& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(shape[i]);
  }
  return s;
}

} // namespace

void write_report_table(std::ostream& os, const MemoryReport& rep) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "optimizer state bytes (bpe=%d, signs=%s, adafactor m %s)\n",
                rep.opts.bpe, to_string(rep.opts.sign_mode),
                rep.opts.adafactor_first_moment ? "on" : "off");
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-20s %-18s %14s %14s %14s %18s\n", "name", "shape",
                "adam", "adafactor", "smmf", "smmf-no-momentum");
  os << buf;
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-20s %-18s %14lld %14lld %14lld %18lld\n",
                  rep.entries[i].name.c_str(), shape_label(rep.entries[i].shape).c_str(),
                  static_cast<long long>(rep.bytes[i][0]),
                  static_cast<long long>(rep.bytes[i][1]),
                  static_cast<long long>(rep.bytes[i][2]),
                  static_cast<long long>(rep.bytes[i][3]));
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "%-20s %-18s %14lld %14lld %14lld %18lld\n", "total", "",
                static_cast<long long>(rep.totals[0]), static_cast<long long>(rep.totals[1]),
                static_cast<long long>(rep.totals[2]), static_cast<long long>(rep.totals[3]));
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-20s %-18s %14.3f %14.3f %14.3f %18.3f\n", "total MiB", "",
                rep.totals[0] / kMiB, rep.totals[1] / kMiB, rep.totals[2] / kMiB,
                rep.totals[3] / kMiB);
  os << buf;
  std::snprintf(buf, sizeof(buf), "smmf peak per-step scratch estimate: %.3f MiB (6*N*bpe)\n",
                rep.smmf_scratch_total / kMiB);
  os << buf;
}

} // namespace smmf
