#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "smmf/matricize.hpp"
#include "smmf/models/rng.hpp"

using namespace smmf;

namespace {

// Independent oracle: enumerate every divisor pair (N/i, i) with i <= N/i
// and keep the one minimizing the perimeter.
MatShape brute_force_shape(std::int64_t n) {
    MatShape best{n, 1};
    for (std::int64_t i = 1; i * i <= n; ++i) {
        if (n % i != 0) continue;
        const MatShape cand{n / i, i};
        if (cand.rows + cand.cols < best.rows + best.cols) best = cand;
    }
    return best;
}

} // namespace

TEST_CASE("square-matricized shape: pinned examples") {
    CHECK(square_matricize_shape(23440896) == MatShape{5087, 4608});
    CHECK(square_matricize_shape(2359296) == MatShape{1536, 1536});
    CHECK(square_matricize_shape(16) == MatShape{4, 4});
    CHECK(square_matricize_shape(12) == MatShape{4, 3});
    CHECK(square_matricize_shape(36) == MatShape{6, 6});
    CHECK(square_matricize_shape(13) == MatShape{13, 1});
    CHECK(square_matricize_shape(7) == MatShape{7, 1});
    CHECK(square_matricize_shape(1) == MatShape{1, 1});
    CHECK(square_matricize_shape(2) == MatShape{2, 1});
    CHECK_THROWS_AS(square_matricize_shape(0), std::invalid_argument);
    CHECK_THROWS_AS(square_matricize_shape(-5), std::invalid_argument);
}

TEST_CASE("square-matricized shape equals the divisor-enumeration oracle") {
    for (std::int64_t n = 1; n <= 5000; ++n) {
        const auto got = brute_force_shape(n);
        REQUIRE(square_matricize_shape(n) == got);
        REQUIRE(got.rows >= got.cols);
        REQUIRE(got.rows * got.cols == n);
    }
}

TEST_CASE("cols is the largest divisor not exceeding floor(sqrt(N))") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng.next() % 1000000);
        const auto ms = square_matricize_shape(n);
        std::int64_t s = 0;
        while ((s + 1) * (s + 1) <= n) ++s;
        CHECK(ms.cols <= s);
        for (std::int64_t d = ms.cols + 1; d <= s; ++d) CHECK(n % d != 0);
    }
}

TEST_CASE("minimizing the perimeter is the same as minimizing the gap") {
    // over divisor pairs of N, argmin(n+m) == argmin|n-m|
    SplitMix64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng.next() % 100000);
        MatShape best_gap{n, 1};
        for (std::int64_t i = 1; i * i <= n; ++i) {
            if (n % i != 0) continue;
            const MatShape cand{n / i, i};
            if (cand.rows - cand.cols < best_gap.rows - best_gap.cols) best_gap = cand;
        }
        CHECK(square_matricize_shape(n) == best_gap);
    }
}

TEST_CASE("a two-axis regrouping never beats the square matricization") {
    // n_hat + m_hat <= prod(leading axes) * (n_{d-1} + n_d)
    SplitMix64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const int rank = 2 + static_cast<int>(rng.next() % 3);
        Shape shape;
        std::int64_t numel = 1;
        for (int a = 0; a < rank; ++a) {
            const std::int64_t d = 1 + static_cast<std::int64_t>(rng.next() % 40);
            shape.push_back(d);
            numel *= d;
        }
        std::int64_t leading = 1;
        for (int a = 0; a + 2 < rank; ++a) leading *= shape[static_cast<std::size_t>(a)];
        const auto ms = square_matricize_shape(numel);
        CHECK(ms.rows + ms.cols <=
              leading * (shape[static_cast<std::size_t>(rank - 2)] +
                         shape[static_cast<std::size_t>(rank - 1)]));
    }
}

TEST_CASE("matricize relabels and dematricize restores the shape") {
    Tensor t(Shape{2, 2, 3});
    for (std::int64_t i = 0; i < 12; ++i) t[i] = static_cast<double>(i + 1);

    const Tensor m = matricize(t);
    REQUIRE(m.shape() == Shape{4, 3});
    for (std::int64_t i = 0; i < 12; ++i) CHECK(m[i] == static_cast<double>(i + 1));

    const Tensor back = dematricize(m, Shape{2, 2, 3});
    REQUIRE(back.shape() == Shape{2, 2, 3});
    for (std::int64_t i = 0; i < 12; ++i) CHECK(back[i] == static_cast<double>(i + 1));
}

TEST_CASE("matricize of a vector and of an already-square matrix") {
    const Tensor v = matricize(Tensor::vector({1, 2, 3, 4, 5, 6}));
    CHECK(v.shape() == Shape{3, 2});

    const Tensor sq = matricize(Tensor(Shape{4, 4}));
    CHECK(sq.shape() == Shape{4, 4});

    const Tensor prime = matricize(Tensor::vector({1, 2, 3, 4, 5, 6, 7}));
    CHECK(prime.shape() == Shape{7, 1});
}
