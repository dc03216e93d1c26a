#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace smmf {

enum class SignStorage : std::uint8_t {
    Packed1Bit = 0,
    Byte8Bit = 1,
};

inline const char* to_string(SignStorage s) {
    return s == SignStorage::Packed1Bit ? "packed" : "byte";
}

inline SignStorage sign_storage_from_string(const std::string& s) {
    if (s == "packed") return SignStorage::Packed1Bit;
    if (s == "byte") return SignStorage::Byte8Bit;
    throw std::invalid_argument("unknown sign storage mode '" + s + "' (expected packed|byte)");
}

/// Elementwise sign record for a rows x cols matrix. Bit 1 means the
/// element was >= 0 at capture time. Backed by one bit per element in
/// packed mode or one byte per element in byte mode.
class SignBitmap {
public:
    SignBitmap() = default;

    SignBitmap(std::int64_t rows, std::int64_t cols,
               SignStorage mode = SignStorage::Packed1Bit)
        : rows_(rows), cols_(cols), mode_(mode) {
        if (rows < 1 || cols < 1) {
            throw std::invalid_argument("SignBitmap: dimensions must be >= 1");
        }
        bits_.assign(static_cast<std::size_t>(byte_size()), 0);
    }

    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }
    std::int64_t bit_count() const { return rows_ * cols_; }
    SignStorage mode() const { return mode_; }

    std::int64_t byte_size() const {
        const std::int64_t n = rows_ * cols_;
        return mode_ == SignStorage::Packed1Bit ? (n + 7) / 8 : n;
    }

    bool get(std::int64_t idx) const {
        if (mode_ == SignStorage::Packed1Bit) {
            return (bits_[static_cast<std::size_t>(idx >> 3)] >> (idx & 7)) & 1u;
        }
        return bits_[static_cast<std::size_t>(idx)] != 0;
    }

    bool get(std::int64_t i, std::int64_t j) const { return get(i * cols_ + j); }

    void set(std::int64_t idx, bool value) {
        if (mode_ == SignStorage::Packed1Bit) {
            const std::uint8_t mask = static_cast<std::uint8_t>(1u << (idx & 7));
            auto& word = bits_[static_cast<std::size_t>(idx >> 3)];
            word = static_cast<std::uint8_t>((word & ~mask) | (value ? mask : 0u));
        } else {
            bits_[static_cast<std::size_t>(idx)] = value ? 1u : 0u;
        }
    }

    /// Writes a whole row of sign bits from a row of matrix values
    /// (value >= 0 maps to bit 1). Rows are byte-independent only in byte
    /// mode; packed rows may share edge bytes, so concurrent writers must
    /// own disjoint row ranges whose bit ranges do not share bytes unless
    /// cols*row_start is byte aligned. Callers parallelize over rows only
    /// in byte mode, or over 8-row groups in packed mode.
    void set_row_from(std::int64_t row, const double* values) {
        const std::int64_t base = row * cols_;
        for (std::int64_t j = 0; j < cols_; ++j) {
            set(base + j, values[j] >= 0.0);
        }
    }

    std::vector<std::uint8_t>& bytes() { return bits_; }
    const std::vector<std::uint8_t>& bytes() const { return bits_; }

    bool operator==(const SignBitmap& other) const = default;

private:
    std::int64_t rows_ = 0;
    std::int64_t cols_ = 0;
    SignStorage mode_ = SignStorage::Packed1Bit;
    std::vector<std::uint8_t> bits_;
};

} // namespace smmf
