#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "smmf/matricize.hpp"
#include "smmf/sign_bitmap.hpp"
#include "smmf/tensor.hpp"

namespace smmf {

// Rank-1 non-negative factor vectors. After compress() with nonzero total,
// exactly one of r, c is normalized to sum 1: r when rows <= cols, c
// otherwise. nnmf() always normalizes c.
struct FactorPair {
  std::vector<double> r;
  std::vector<double> c;
};

// Persistent compressed state of one momentum matrix: the factor pair plus,
// for the first momentum only, the elementwise sign bitmap.
struct CompressedMomentum {
  MatShape shape;
  FactorPair factors;
  std::optional<SignBitmap> signs;

  // zero factors (and zero sign bits when with_signs); decompresses to zero
  static CompressedMomentum zeros(MatShape ms, bool with_signs,
                                  SignStorage mode = SignStorage::Packed1Bit);

  // persistent bytes at the given storage precision: (rows+cols)*bpe for the
  // factors plus the sign bitmap bytes when present
  std::int64_t byte_size(int bpe) const;
};

// Rank-1 NNMF of a non-negative matrix: r = row sums, c = col sums divided
// by the total. Zero total skips the normalization, leaving both zero.
// Throws std::invalid_argument on negative entries or non-matrix input.
FactorPair nnmf(const Tensor& a);

// Momentum compression: capture elementwise signs (bit 1 where >= 0), then
// factor |m| like nnmf except the normalized side is r when rows <= cols
// and c otherwise. Throws std::invalid_argument on non-finite entries.
CompressedMomentum compress(const Tensor& m, bool with_signs,
                            SignStorage mode = SignStorage::Packed1Bit);

// outer(r, c) with elements negated where the sign bit is 0; plain outer
// product when signs are absent (the second-momentum path).
Tensor decompress(const CompressedMomentum& cm);
// Same, writing into out (len rows*cols) to let callers reuse buffers.
void decompress_into(const CompressedMomentum& cm, std::span<double> out);

// total(decompress(nnmf(a)) - a); zero within 1e-9*total(a) by the rank-1
// reconstruction error identity
double compression_error_sum(const Tensor& a);

// Binary dump, little-endian: rows u32, cols u32, storage_mode u8 (0 packed,
// 1 byte), has_signs u8, then r and c as 64-bit reals, then sign bytes.
void write_compressed(std::ostream& os, const CompressedMomentum& cm);
CompressedMomentum read_compressed(std::istream& is);

} // namespace smmf
