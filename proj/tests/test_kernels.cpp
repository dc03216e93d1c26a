#include <cstring>
#include <vector>

#include "doctest.h"
#include "smmf/kernels.hpp"
#include "smmf/models/rng.hpp"
#include "smmf/sign_bitmap.hpp"

using namespace smmf;
namespace k = smmf::kernels;
namespace ks = smmf::kernels::serial;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

TEST_CASE("elementwise kernels match the serial reference bitwise") {
    for (std::size_t n : {1u, 7u, 63u, 64u, 65u, 1000u, 100000u}) {
        const auto a = random_vec(n, 10 + n);
        const auto b = random_vec(n, 20 + n);
        std::vector<double> p(n), s(n);

        k::square(a, p);
        ks::square(a, s);
        CHECK(bitwise_equal(p, s));

        k::hadamard(a, b, p);
        ks::hadamard(a, b, s);
        CHECK(bitwise_equal(p, s));

        k::add_scaled(a, b, 0.3, -1.7, p);
        ks::add_scaled(a, b, 0.3, -1.7, s);
        CHECK(bitwise_equal(p, s));

        p = a;
        s = a;
        k::ema(p, b, 0.9);
        ks::ema(s, b, 0.9);
        CHECK(bitwise_equal(p, s));

        p = a;
        s = a;
        k::ema_square(p, b, 0.99);
        ks::ema_square(s, b, 0.99);
        CHECK(bitwise_equal(p, s));

        std::vector<double> sq(n);
        k::square(b, sq);
        k::div_sqrt_eps(a, sq, 1e-8, p);
        ks::div_sqrt_eps(a, sq, 1e-8, s);
        CHECK(bitwise_equal(p, s));

        p = a;
        s = a;
        k::scaled_sub(p, b, 1e-3);
        ks::scaled_sub(s, b, 1e-3);
        CHECK(bitwise_equal(p, s));
    }
}

TEST_CASE("reduction kernels match the serial reference bitwise") {
    const struct { std::int64_t rows, cols; } dims[] = {
        {1, 1}, {3, 5}, {5, 3}, {17, 31}, {128, 128}, {1000, 317}};
    for (auto [rows, cols] : dims) {
        const std::size_t n = static_cast<std::size_t>(rows * cols);
        const auto m = random_vec(n, static_cast<std::uint64_t>(n));
        std::vector<double> pr(static_cast<std::size_t>(rows));
        std::vector<double> sr(static_cast<std::size_t>(rows));
        std::vector<double> pc(static_cast<std::size_t>(cols));
        std::vector<double> sc(static_cast<std::size_t>(cols));

        k::row_sums(m, rows, cols, pr);
        ks::row_sums(m, rows, cols, sr);
        CHECK(bitwise_equal(pr, sr));

        k::col_sums(m, rows, cols, pc);
        ks::col_sums(m, rows, cols, sc);
        CHECK(bitwise_equal(pc, sc));

        k::row_sums_abs(m, rows, cols, pr);
        ks::row_sums_abs(m, rows, cols, sr);
        CHECK(bitwise_equal(pr, sr));

        k::col_sums_abs(m, rows, cols, pc);
        ks::col_sums_abs(m, rows, cols, sc);
        CHECK(bitwise_equal(pc, sc));

        CHECK(k::sum(m) == ks::sum(m));
        CHECK(k::sum_squares(m) == ks::sum_squares(m));
    }
}

TEST_CASE("global sum uses fixed blocks so size does not change the order") {
    // spans a few block boundaries (block = 65536)
    for (std::size_t n : {65535u, 65536u, 65537u, 200000u}) {
        const auto a = random_vec(n, n);
        CHECK(k::sum(a) == ks::sum(a));
    }
}

TEST_CASE("outer products match the serial reference bitwise") {
    const auto r = random_vec(37, 1);
    const auto c = random_vec(53, 2);
    std::vector<double> p(37 * 53), s(37 * 53);

    k::outer(r, c, p);
    ks::outer(r, c, s);
    CHECK(bitwise_equal(p, s));
    CHECK(p[0] == r[0] * c[0]);
    CHECK(p[52] == r[0] * c[52]);
    CHECK(p[53] == r[1] * c[0]);

    SignBitmap signs(37, 53, SignStorage::Packed1Bit);
    const auto vals = random_vec(37 * 53, 3);
    k::capture_signs(vals, signs);
    k::outer_signed(r, c, signs, p);
    ks::outer_signed(r, c, signs, s);
    CHECK(bitwise_equal(p, s));
}

TEST_CASE("outer_signed negates exactly where the bit is 0") {
    const std::vector<double> r = {2.0, 3.0};
    const std::vector<double> c = {5.0, 7.0};
    SignBitmap signs(2, 2);
    signs.set(0, true);
    signs.set(1, false);
    signs.set(2, false);
    signs.set(3, true);
    std::vector<double> out(4);
    k::outer_signed(r, c, signs, out);
    CHECK(out[0] == 10.0);
    CHECK(out[1] == -14.0);
    CHECK(out[2] == -15.0);
    CHECK(out[3] == 21.0);
}

TEST_CASE("capture_signs marks bit 1 where the value is >= 0") {
    const std::vector<double> vals = {-1.0, 0.0, 2.5, -0.0};
    for (auto mode : {SignStorage::Packed1Bit, SignStorage::Byte8Bit}) {
        SignBitmap signs(2, 2, mode);
        k::capture_signs(vals, signs);
        CHECK_FALSE(signs.get(0));
        CHECK(signs.get(1));  // 0.0 counts as non-negative
        CHECK(signs.get(2));
        CHECK(signs.get(3));  // -0.0 >= 0.0 is true

        SignBitmap ser(2, 2, mode);
        ks::capture_signs(vals, ser);
        CHECK(ser.bytes() == signs.bytes());
    }
}

TEST_CASE("capture_signs parallel/serial identity across packing boundaries") {
    for (std::int64_t rows : {1, 7, 8, 9, 100}) {
        for (std::int64_t cols : {1, 5, 8, 64, 129}) {
            const auto vals =
                random_vec(static_cast<std::size_t>(rows * cols),
                           static_cast<std::uint64_t>(rows * 1000 + cols));
            for (auto mode : {SignStorage::Packed1Bit, SignStorage::Byte8Bit}) {
                SignBitmap a(rows, cols, mode), b(rows, cols, mode);
                k::capture_signs(vals, a);
                ks::capture_signs(vals, b);
                REQUIRE(a.bytes() == b.bytes());
            }
        }
    }
}

TEST_CASE("matmul agrees with a naive triple loop and the serial reference") {
    const std::int64_t n = 13, kk = 7, m = 11;
    const auto a = random_vec(static_cast<std::size_t>(n * kk), 5);
    const auto b = random_vec(static_cast<std::size_t>(kk * m), 6);
    std::vector<double> c(static_cast<std::size_t>(n * m));
    std::vector<double> naive(static_cast<std::size_t>(n * m), 0.0);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::int64_t l = 0; l < kk; ++l) acc += a[i * kk + l] * b[l * m + j];
            naive[static_cast<std::size_t>(i * m + j)] = acc;
        }

    k::matmul(a, b, c, n, kk, m);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(naive[i]));

    std::vector<double> cs(c.size());
    ks::matmul(a, b, cs, n, kk, m);
    CHECK(bitwise_equal(c, cs));
}

TEST_CASE("matmul_tn and matmul_nt match explicit transposition") {
    const std::int64_t n = 9, kk = 5, m = 7;
    const auto a = random_vec(static_cast<std::size_t>(n * kk), 8);
    const auto b = random_vec(static_cast<std::size_t>(n * m), 9);

    // c = a^T b via matmul on transposed a
    std::vector<double> at(static_cast<std::size_t>(kk * n));
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < kk; ++j) at[j * n + i] = a[i * kk + j];
    std::vector<double> want(static_cast<std::size_t>(kk * m));
    k::matmul(at, b, want, kk, n, m);
    std::vector<double> got(want.size());
    k::matmul_tn(a, b, got, n, kk, m);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]));

    // c = a b^T via matmul on transposed b
    const auto b2 = random_vec(static_cast<std::size_t>(m * kk), 10);
    std::vector<double> b2t(static_cast<std::size_t>(kk * m));
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < kk; ++j) b2t[j * m + i] = b2[i * kk + j];
    const auto a2 = random_vec(static_cast<std::size_t>(n * kk), 11);
    std::vector<double> want2(static_cast<std::size_t>(n * m));
    k::matmul(a2, b2t, want2, n, kk, m);
    std::vector<double> got2(want2.size());
    k::matmul_nt(a2, b2, got2, n, kk, m);
    for (std::size_t i = 0; i < got2.size(); ++i)
        CHECK(got2[i] == doctest::Approx(want2[i]));
}
