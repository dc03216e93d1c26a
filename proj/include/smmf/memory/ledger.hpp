#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "smmf/sign_bitmap.hpp"
#include "smmf/tensor.hpp"

namespace smmf {

inline constexpr double kMiB = 1048576.0;

struct LedgerOptions {
  int bpe = 4;  // stored-state bytes per element, 4 or 8
  SignStorage sign_mode = SignStorage::Packed1Bit;
  bool adafactor_first_moment = true;
};

// Persistent optimizer-state bytes for one parameter shape.
//   adam:             2*N*bpe
//   adafactor:        prod(n_1..n_{d-2})*(n_{d-1}+n_d)*bpe, plus N*bpe for
//                     the first moment when enabled; rank-1 stays dense
//   smmf:             2*(n_hat+m_hat)*bpe + sign bytes
//   smmf-no-momentum: (n_hat+m_hat)*bpe
std::int64_t state_bytes(const std::string& kind, const Shape& shape,
                         const LedgerOptions& opts);

// Peak per-step temporaries of one SMMF update (gradient, two decompressed
// momenta, two blends, update): 6*N*bpe. Documentation honesty; not state.
std::int64_t smmf_scratch_bytes(const Shape& shape, int bpe);

struct ManifestEntry {
  std::string name;
  Shape shape;
};

struct ShapeManifest {
  std::vector<ManifestEntry> entries;
};

// One entry per line: `name: d1xd2x...xdk`. Blank lines and lines starting
// with # are skipped. Throws std::invalid_argument with the line number on
// malformed input or duplicate names.
ShapeManifest parse_manifest(std::istream& is);
ShapeManifest load_manifest(const std::string& path);

struct MemoryReport {
  LedgerOptions opts;
  std::vector<std::string> kinds;
  std::vector<ManifestEntry> entries;
  // bytes[i][j]: entries[i] under kinds[j]
  std::vector<std::vector<std::int64_t>> bytes;
  std::vector<std::int64_t> totals;
  std::int64_t smmf_scratch_total = 0;
};

MemoryReport report(const ShapeManifest& manifest, const LedgerOptions& opts);

// name,optimizer,bytes rows for every entry, then total rows
void write_report_csv(std::ostream& os, const MemoryReport& rep);
void write_report_table(std::ostream& os, const MemoryReport& rep);

} // namespace smmf
