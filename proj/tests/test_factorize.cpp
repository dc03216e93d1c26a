#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "smmf/factorize.hpp"
#include "smmf/kernels.hpp"
#include "smmf/models/rng.hpp"

using namespace smmf;

namespace {

double total_abs(const Tensor& t) {
    double s = 0.0;
    for (auto x : t.data()) s += std::abs(x);
    return s;
}

Tensor random_matrix(std::int64_t rows, std::int64_t cols, SplitMix64& rng,
                     bool non_negative) {
    Tensor t(Shape{rows, cols});
    for (auto& x : t.data()) x = non_negative ? 10.0 * rng.uniform01() : rng.normal();
    return t;
}

} // namespace

TEST_CASE("nnmf: worked examples") {
    SUBCASE("rank-1 matrix factors exactly") {
        const Tensor a = Tensor::matrix(2, 2, {1, 2, 2, 4});
        const auto f = nnmf(a);
        REQUIRE(f.r.size() == 2);
        REQUIRE(f.c.size() == 2);
        CHECK(f.r[0] == doctest::Approx(3.0).epsilon(1e-15));
        CHECK(f.r[1] == doctest::Approx(6.0).epsilon(1e-15));
        CHECK(f.c[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(f.c[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    }
    SUBCASE("identity is not rank-1; reconstruction spreads the mass") {
        const auto f = nnmf(Tensor::matrix(2, 2, {1, 0, 0, 1}));
        CHECK(f.r[0] == doctest::Approx(1.0));
        CHECK(f.r[1] == doctest::Approx(1.0));
        CHECK(f.c[0] == doctest::Approx(0.5));
        CHECK(f.c[1] == doctest::Approx(0.5));
    }
    SUBCASE("zero matrix keeps both factors zero") {
        const auto f = nnmf(Tensor(Shape{2, 2}));
        CHECK(f.r == std::vector<double>{0.0, 0.0});
        CHECK(f.c == std::vector<double>{0.0, 0.0});
    }
    SUBCASE("negative entries are rejected") {
        CHECK_THROWS_AS(nnmf(Tensor::matrix(2, 2, {1, -2, 3, 4})), std::invalid_argument);
    }
    SUBCASE("c always carries the normalization") {
        SplitMix64 rng(3);
        const auto tall = nnmf(random_matrix(5, 2, rng, true));
        const auto wide = nnmf(random_matrix(2, 5, rng, true));
        double cs = 0.0;
        for (auto x : tall.c) cs += x;
        CHECK(cs == doctest::Approx(1.0).epsilon(1e-12));
        cs = 0.0;
        for (auto x : wide.c) cs += x;
        CHECK(cs == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("compress: worked example with mixed signs") {
    const Tensor m = Tensor::matrix(2, 2, {-1, 2, 3, -4});
    const auto cm = compress(m, true);
    REQUIRE(cm.signs.has_value());
    CHECK_FALSE(cm.signs->get(0));
    CHECK(cm.signs->get(1));
    CHECK(cm.signs->get(2));
    CHECK_FALSE(cm.signs->get(3));
    // |m| row sums normalized (square matrix: rows <= cols)
    CHECK(cm.factors.r[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(cm.factors.r[1] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(cm.factors.c[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(cm.factors.c[1] == doctest::Approx(6.0).epsilon(1e-15));

    const Tensor back = decompress(cm);
    CHECK(back[0] == doctest::Approx(-1.2).epsilon(1e-15));
    CHECK(back[1] == doctest::Approx(1.8).epsilon(1e-15));
    CHECK(back[2] == doctest::Approx(2.8).epsilon(1e-15));
    CHECK(back[3] == doctest::Approx(-4.2).epsilon(1e-15));
}

TEST_CASE("compress: normalized side follows the aspect ratio") {
    SplitMix64 rng(5);
    const auto tall = compress(random_matrix(5, 2, rng, false), true);
    double s = 0.0;
    for (auto x : tall.factors.c) s += x;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));  // rows > cols: c normalized

    const auto wide = compress(random_matrix(2, 5, rng, false), true);
    s = 0.0;
    for (auto x : wide.factors.r) s += x;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));  // rows <= cols: r normalized
}

TEST_CASE("compress: zero matrix and non-finite input") {
    const auto cm = compress(Tensor(Shape{3, 2}), true);
    for (auto x : cm.factors.r) CHECK(x == 0.0);
    for (auto x : cm.factors.c) CHECK(x == 0.0);
    const Tensor back = decompress(cm);
    for (auto x : back.data()) CHECK(x == 0.0);

    Tensor bad = Tensor::matrix(2, 2, {1, 2, 3, 4});
    bad[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(compress(bad, true), std::invalid_argument);
    bad[2] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(compress(bad, true), std::invalid_argument);
}

TEST_CASE("compress: 1x1 matrix roundtrips exactly") {
    const auto cm = compress(Tensor::matrix(1, 1, {-3.0}), true);
    CHECK(cm.factors.r[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cm.factors.c[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_FALSE(cm.signs->get(0));
    CHECK(decompress(cm)[0] == doctest::Approx(-3.0).epsilon(1e-15));
}

TEST_CASE("nnmf reconstruction has zero column-sum error") {
    // total(outer(r, c)) == total(a) for every non-negative a
    SplitMix64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::int64_t rows = 1 + static_cast<std::int64_t>(rng.next() % 40);
        const std::int64_t cols = 1 + static_cast<std::int64_t>(rng.next() % 40);
        const Tensor a = random_matrix(rows, cols, rng, true);
        const double err = compression_error_sum(a);
        const double scale = kernels::sum(a.data());
        CHECK(std::abs(err) <= 1e-9 * std::max(1.0, scale));
    }
}

TEST_CASE("rank-1 matrices compress losslessly") {
    SplitMix64 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        const std::int64_t rows = 1 + static_cast<std::int64_t>(rng.next() % 20);
        const std::int64_t cols = 1 + static_cast<std::int64_t>(rng.next() % 20);
        std::vector<double> u(static_cast<std::size_t>(rows));
        std::vector<double> v(static_cast<std::size_t>(cols));
        for (auto& x : u) x = 0.1 + rng.uniform01();
        for (auto& x : v) x = 0.1 + rng.uniform01();
        Tensor a(Shape{rows, cols});
        kernels::outer(u, v, a.data());

        const auto f = nnmf(a);
        Tensor recon(Shape{rows, cols});
        kernels::outer(f.r, f.c, recon.data());
        for (std::int64_t i = 0; i < a.numel(); ++i)
            CHECK(recon[i] == doctest::Approx(a[i]).epsilon(1e-12));
    }
}

TEST_CASE("signed rank-1 matrices roundtrip through compress") {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const std::int64_t rows = 1 + static_cast<std::int64_t>(rng.next() % 20);
        const std::int64_t cols = 1 + static_cast<std::int64_t>(rng.next() % 20);
        std::vector<double> u(static_cast<std::size_t>(rows));
        std::vector<double> v(static_cast<std::size_t>(cols));
        for (auto& x : u) x = (0.1 + rng.uniform01()) * (rng.next() % 2 ? 1.0 : -1.0);
        for (auto& x : v) x = (0.1 + rng.uniform01()) * (rng.next() % 2 ? 1.0 : -1.0);
        Tensor a(Shape{rows, cols});
        kernels::outer(u, v, a.data());

        const auto mode = trial % 2 ? SignStorage::Packed1Bit : SignStorage::Byte8Bit;
        const Tensor back = decompress(compress(a, true, mode));
        for (std::int64_t i = 0; i < a.numel(); ++i)
            CHECK(back[i] == doctest::Approx(a[i]).epsilon(1e-12));
    }
}

TEST_CASE("compress preserves the total absolute mass") {
    SplitMix64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const std::int64_t rows = 1 + static_cast<std::int64_t>(rng.next() % 30);
        const std::int64_t cols = 1 + static_cast<std::int64_t>(rng.next() % 30);
        const Tensor a = random_matrix(rows, cols, rng, false);
        const Tensor back = decompress(compress(a, true));
        CHECK(total_abs(back) == doctest::Approx(total_abs(a)).epsilon(1e-9));
    }
}

TEST_CASE("reconstruction is zero only for the zero matrix") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        Tensor a = random_matrix(4, 3, rng, false);
        a[5] += 1.0;  // ensure nonzero
        const Tensor back = decompress(compress(a, true));
        CHECK(total_abs(back) > 0.0);
    }
    const Tensor zero_back = decompress(compress(Tensor(Shape{4, 3}), true));
    CHECK(total_abs(zero_back) == 0.0);
}

TEST_CASE("momentum-free compression drops the sign bitmap") {
    // rank-1 input so the factored form reproduces it exactly
    const Tensor m = Tensor::matrix(2, 2, {1, 2, 2, 4});
    const auto cm = compress(m, false);
    CHECK_FALSE(cm.signs.has_value());
    const Tensor back = decompress(cm);
    for (std::int64_t i = 0; i < 4; ++i)
        CHECK(back[i] == doctest::Approx(m[i]).epsilon(1e-12));
}

TEST_CASE("persistent byte sizes") {
    const auto packed = compress(Tensor(Shape{20, 13}), true, SignStorage::Packed1Bit);
    CHECK(packed.byte_size(4) == (20 + 13) * 4 + (260 + 7) / 8);
    CHECK(packed.byte_size(8) == (20 + 13) * 8 + (260 + 7) / 8);

    const auto bytes = compress(Tensor(Shape{20, 13}), true, SignStorage::Byte8Bit);
    CHECK(bytes.byte_size(4) == (20 + 13) * 4 + 260);

    const auto no_signs = compress(Tensor(Shape{20, 13}), false);
    CHECK(no_signs.byte_size(4) == (20 + 13) * 4);

    const auto zeros = CompressedMomentum::zeros(MatShape{5, 4}, true);
    CHECK(zeros.byte_size(4) == 9 * 4 + 3);
    const Tensor zero_tensor = decompress(zeros);
    for (auto x : zero_tensor.data()) CHECK(x == 0.0);
}

TEST_CASE("binary dump roundtrips") {
    SplitMix64 rng(37);
    for (const bool with_signs : {true, false}) {
        for (const auto mode : {SignStorage::Packed1Bit, SignStorage::Byte8Bit}) {
            const Tensor a = random_matrix(6, 5, rng, false);
            const auto cm = compress(a, with_signs, mode);
            std::stringstream ss;
            write_compressed(ss, cm);
            const auto back = read_compressed(ss);
            CHECK(back.shape == cm.shape);
            CHECK(back.factors.r == cm.factors.r);
            CHECK(back.factors.c == cm.factors.c);
            REQUIRE(back.signs.has_value() == cm.signs.has_value());
            if (cm.signs) CHECK(back.signs->bytes() == cm.signs->bytes());
        }
    }
}

TEST_CASE("binary dump rejects truncated input") {
    const auto cm = compress(Tensor::matrix(2, 2, {1, 2, 3, 4}), true);
    std::stringstream ss;
    write_compressed(ss, cm);
    const std::string full = ss.str();
    std::stringstream truncated(full.substr(0, full.size() / 2));
    CHECK_THROWS_AS(read_compressed(truncated), std::runtime_error);
}
