#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "smmf/matricize.hpp"
#include "smmf/memory/ledger.hpp"
#include "smmf/models/rng.hpp"

using namespace smmf;

TEST_CASE("state bytes: pinned shapes") {
    LedgerOptions opts;  // bpe 4, packed signs, adafactor first moment on

    SUBCASE("conv kernel 512x512x3x3") {
        const Shape s{512, 512, 3, 3};
        CHECK(state_bytes("adam", s, opts) == 18874368);
        CHECK(state_bytes("smmf", s, opts) == 319488);
        const double ratio = 18874368.0 / 319488.0;
        CHECK(ratio == doctest::Approx(59.08).epsilon(2e-4));
        // adafactor: 512*512 slices of (3+3) plus dense m
        CHECK(state_bytes("adafactor", s, opts) ==
              512 * 512 * 6 * 4 + 512 * 512 * 9 * 4);
    }
    SUBCASE("embedding 30522x768, second-moment vectors only") {
        const Shape s{30522, 768};
        LedgerOptions no_m = opts;
        no_m.adafactor_first_moment = false;
        CHECK(state_bytes("adafactor", s, no_m) == 125160);
        CHECK(state_bytes("smmf-no-momentum", s, no_m) == (5087 + 4608) * 4);
        CHECK(state_bytes("smmf-no-momentum", s, no_m) == 38780);
        const double saving = 1.0 - 38780.0 / 125160.0;
        CHECK(saving * 100.0 == doctest::Approx(69.0).epsilon(2e-3));
    }
    SUBCASE("scalar parameter") {
        const Shape s{1};
        CHECK(state_bytes("adam", s, opts) == 8);
        CHECK(state_bytes("smmf", s, opts) == 2 * 2 * 4 + 1);
    }
}

TEST_CASE("state bytes: formula variants") {
    LedgerOptions opts;
    const Shape s{20, 13};  // N=260, effective (20,13)

    CHECK(state_bytes("adam", s, opts) == 2 * 260 * 4);
    CHECK(state_bytes("smmf", s, opts) == 2 * 33 * 4 + (260 + 7) / 8);
    CHECK(state_bytes("smmf-no-momentum", s, opts) == 33 * 4);

    LedgerOptions byte_signs = opts;
    byte_signs.sign_mode = SignStorage::Byte8Bit;
    CHECK(state_bytes("smmf", s, byte_signs) == 2 * 33 * 4 + 260);

    LedgerOptions bpe8 = opts;
    bpe8.bpe = 8;
    CHECK(state_bytes("adam", s, bpe8) == 2 * 260 * 8);
    CHECK(state_bytes("smmf", s, bpe8) == 2 * 33 * 8 + 33);

    CHECK_THROWS_AS(state_bytes("rmsprop", s, opts), std::invalid_argument);
}

TEST_CASE("state bytes: adafactor slicing and rank-1 fallback") {
    LedgerOptions opts;

    // rank-2: one slice of (rows+cols) vectors
    CHECK(state_bytes("adafactor", Shape{30, 40}, opts) ==
          (30 + 40) * 4 + 30 * 40 * 4);
    // rank-4: leading axes multiply the slice count
    CHECK(state_bytes("adafactor", Shape{2, 3, 5, 7}, opts) ==
          2 * 3 * (5 + 7) * 4 + 2 * 3 * 5 * 7 * 4);
    // rank-1 stays dense: v plus m
    CHECK(state_bytes("adafactor", Shape{100}, opts) == 100 * 4 + 100 * 4);

    LedgerOptions no_m = opts;
    no_m.adafactor_first_moment = false;
    CHECK(state_bytes("adafactor", Shape{2, 3, 5, 7}, no_m) == 2 * 3 * (5 + 7) * 4);
    CHECK(state_bytes("adafactor", Shape{100}, no_m) == 100 * 4);
}

TEST_CASE("smmf state grows as the divisor perimeter, not the element count") {
    LedgerOptions opts;
    opts.adafactor_first_moment = false;
    // on perfect squares the no-momentum state is exactly 2*s*bpe
    for (std::int64_t s : {10, 100, 1000, 10000}) {
        CHECK(state_bytes("smmf-no-momentum", Shape{s, s}, opts) == 2 * s * 4);
        // quadrupling N only doubles the state
        CHECK(state_bytes("smmf-no-momentum", Shape{2 * s, 2 * s}, opts) ==
              2 * state_bytes("smmf-no-momentum", Shape{s, s}, opts));
    }
}

TEST_CASE("orderings between optimizers") {
    LedgerOptions opts;
    SplitMix64 rng(79);

    SUBCASE("smmf is below adam for every multi-axis shape with axes >= 2") {
        for (int trial = 0; trial < 200; ++trial) {
            const int rank = 2 + static_cast<int>(rng.next() % 3);
            Shape shape;
            for (int a = 0; a < rank; ++a)
                shape.push_back(2 + static_cast<std::int64_t>(rng.next() % 30));
            if (shape_numel(shape) < 8) continue;
            CHECK(state_bytes("smmf", shape, opts) < state_bytes("adam", shape, opts));
        }
    }
    SUBCASE("degenerate shapes can invert the ordering") {
        // primes matricize to (N, 1): factor vectors alone exceed 2N
        CHECK(state_bytes("smmf", Shape{13}, opts) > state_bytes("adam", Shape{13}, opts));
        CHECK(state_bytes("smmf", Shape{1}, opts) > state_bytes("adam", Shape{1}, opts));
    }
    SUBCASE("adafactor with first moment beats adam exactly when the slice"
            " vectors are smaller than N") {
        for (int trial = 0; trial < 200; ++trial) {
            const int rank = 2 + static_cast<int>(rng.next() % 3);
            Shape shape;
            for (int a = 0; a < rank; ++a)
                shape.push_back(1 + static_cast<std::int64_t>(rng.next() % 8));
            std::int64_t leading = 1;
            for (int a = 0; a + 2 < rank; ++a) leading *= shape[static_cast<std::size_t>(a)];
            const std::int64_t n = shape_numel(shape);
            const std::int64_t vec =
                leading * (shape[static_cast<std::size_t>(rank - 2)] +
                           shape[static_cast<std::size_t>(rank - 1)]);
            const bool af_above_adam =
                state_bytes("adafactor", shape, opts) > state_bytes("adam", shape, opts);
            CHECK(af_above_adam == (vec > n));
        }
    }
    SUBCASE("literal form: slice vectors above 2N imply adafactor above adam") {
        // the premise never holds (a+b <= 2ab for a,b >= 1), so this is
        // vacuous; assert both halves to keep the claim honest
        for (int trial = 0; trial < 100; ++trial) {
            const std::int64_t a = 1 + static_cast<std::int64_t>(rng.next() % 50);
            const std::int64_t b = 1 + static_cast<std::int64_t>(rng.next() % 50);
            const std::int64_t lead = 1 + static_cast<std::int64_t>(rng.next() % 20);
            const Shape shape{lead, a, b};
            const std::int64_t n = shape_numel(shape);
            const std::int64_t vec = lead * (a + b);
            CHECK(vec <= 2 * n);
            if (vec > 2 * n)
                CHECK(state_bytes("adafactor", shape, opts) >
                      state_bytes("adam", shape, opts));
        }
    }
}

TEST_CASE("scratch estimate is 6N bpe") {
    CHECK(smmf_scratch_bytes(Shape{512, 512, 3, 3}, 4) == 6LL * 2359296 * 4);
    CHECK(smmf_scratch_bytes(Shape{10}, 8) == 480);
}

TEST_CASE("manifest parsing") {
    SUBCASE("well-formed entries with comments and blanks") {
        std::istringstream is(
            "# model shapes\n"
            "\n"
            "embedding: 30522x768\n"
            "conv1: 512x512x3x3\n"
            "bias: 768\n");
        const auto m = parse_manifest(is);
        REQUIRE(m.entries.size() == 3);
        CHECK(m.entries[0].name == "embedding");
        CHECK(m.entries[0].shape == Shape{30522, 768});
        CHECK(m.entries[1].shape == Shape{512, 512, 3, 3});
        CHECK(m.entries[2].shape == Shape{768});
    }
    SUBCASE("malformed lines carry the line number") {
        std::istringstream is("ok: 4x4\nbad line\n");
        try {
            parse_manifest(is);
            FAIL("expected a throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("bad dimension tokens are rejected") {
        std::istringstream a("w: 4xx4\n");
        CHECK_THROWS_AS(parse_manifest(a), std::invalid_argument);
        std::istringstream b("w: 4x-2\n");
        CHECK_THROWS_AS(parse_manifest(b), std::invalid_argument);
        std::istringstream c("w: \n");
        CHECK_THROWS_AS(parse_manifest(c), std::invalid_argument);
        std::istringstream d("w: 0x4\n");
        CHECK_THROWS_AS(parse_manifest(d), std::invalid_argument);
    }
    SUBCASE("duplicate names are rejected") {
        std::istringstream is("w: 4x4\nw: 2x2\n");
        CHECK_THROWS_AS(parse_manifest(is), std::invalid_argument);
    }
}

TEST_CASE("report totals are sums and entry order does not matter") {
    LedgerOptions opts;
    std::istringstream fwd("a: 16x16\nb: 100\nc: 4x4x4\n");
    std::istringstream rev("c: 4x4x4\nb: 100\na: 16x16\n");
    const auto r1 = report(parse_manifest(fwd), opts);
    const auto r2 = report(parse_manifest(rev), opts);
    REQUIRE(r1.kinds.size() == 4);
    REQUIRE(r1.totals.size() == 4);
    for (std::size_t kind = 0; kind < r1.kinds.size(); ++kind) {
        std::int64_t total = 0;
        for (const auto& row : r1.bytes) total += row[kind];
        CHECK(total == r1.totals[kind]);
        CHECK(r1.totals[kind] == r2.totals[kind]);
    }
    CHECK(r1.smmf_scratch_total == r2.smmf_scratch_total);

    std::istringstream empty("# nothing\n");
    CHECK_THROWS_AS(report(parse_manifest(empty), opts), std::invalid_argument);
}

TEST_CASE("report on a 1x1-conv-heavy manifest puts adafactor above adam") {
    // trailing 1x1 axes make the slice vectors 2 per slice while N is 1 per
    // slice, so the factored state alone doubles adam's per-slice footprint
    LedgerOptions opts;
    std::istringstream is("proj1: 256x512x1x1\nproj2: 512x1024x1x1\n");
    const auto rep = report(parse_manifest(is), opts);
    std::int64_t adam_total = 0, adafactor_total = 0;
    for (std::size_t kind = 0; kind < rep.kinds.size(); ++kind) {
        if (rep.kinds[kind] == "adam") adam_total = rep.totals[kind];
        if (rep.kinds[kind] == "adafactor") adafactor_total = rep.totals[kind];
    }
    CHECK(adafactor_total >= adam_total);
}

TEST_CASE("report on an embedding-plus-bias manifest keeps smmf under a third"
          " of adafactor") {
    LedgerOptions opts;
    std::istringstream is("embedding: 30522x768\nbias: 768\n");
    const auto rep = report(parse_manifest(is), opts);
    std::int64_t smmf_total = 0, adafactor_total = 0;
    for (std::size_t kind = 0; kind < rep.kinds.size(); ++kind) {
        if (rep.kinds[kind] == "smmf") smmf_total = rep.totals[kind];
        if (rep.kinds[kind] == "adafactor") adafactor_total = rep.totals[kind];
    }
    CHECK(smmf_total * 3 < adafactor_total);
}

TEST_CASE("csv report lists name,optimizer,bytes for every pair") {
    LedgerOptions opts;
    std::istringstream is("w: 4x4\n");
    const auto rep = report(parse_manifest(is), opts);
    std::ostringstream os;
    write_report_csv(os, rep);
    const std::string text = os.str();
    CHECK(text.find("name,optimizer,bytes") != std::string::npos);
    CHECK(text.find("w,adam,128") != std::string::npos);
    CHECK(text.find("w,smmf,66") != std::string::npos);  // 2*8*4 + 2
    CHECK(text.find("total,adam,128") != std::string::npos);
}

TEST_CASE("table report mentions every optimizer and the scratch line") {
    LedgerOptions opts;
    std::istringstream is("w: 4x4\n");
    const auto rep = report(parse_manifest(is), opts);
    std::ostringstream os;
    write_report_table(os, rep);
    const std::string text = os.str();
    for (const char* kind : {"adam", "adafactor", "smmf", "smmf-no-momentum"})
        CHECK(text.find(kind) != std::string::npos);
    CHECK(text.find("scratch") != std::string::npos);
}
