// Copyright 2026 The metrrc authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "metrrc/msrr.hpp"

using namespace metrrc;

namespace {

std::vector<Fel> rand_fels(const Field& f, size_t n, std::mt19937_64& rng) {
    std::vector<Fel> v(n);
    for (auto& x : v) x = Fel(uint32_t(rng() % f.order()));
    return v;
}

// Round-trip helper: erase `failed` in rack `host`, repair, compare.
void check_repair(const MsrrCode& code, std::span<const Fel> word, uint32_t host,
                  const std::vector<uint32_t>& failed, const std::vector<uint32_t>& locals,
                  const std::vector<uint32_t>& helpers) {
    auto plan = code.repair_plan(host, failed, locals, helpers);
    std::map<uint32_t, std::vector<Fel>> contribs;
    uint64_t moved = 0;
    for (uint32_t e : plan.helper_racks) {
        std::vector<Fel> rack(word.begin() + e * code.params().u,
                              word.begin() + (e + 1) * code.params().u);
        auto v = code.helper_contribution(plan, e, rack);
        moved += v.size();
        contribs.emplace(e, std::move(v));
    }
    CHECK(moved == uint64_t(plan.h()) * code.params().dbar);
    std::vector<Fel> local_syms;
    for (uint32_t g : plan.locals) local_syms.push_back(word[host * code.params().u + g]);
    std::vector<Fel> fixed = code.repair(plan, contribs, local_syms);
    REQUIRE(fixed.size() == failed.size());
    for (size_t i = 0; i < plan.failed.size(); ++i)
        CHECK(fixed[i] == word[host * code.params().u + plan.failed[i]]);
}

}  // namespace

TEST_CASE("construction reproduces the 30-node layout", "[msrr]") {
    Field f = make_field(FieldSpec::binary(8));  // q = 256 > 30, 5 | 255
    MsrrCode code({30, 5, 24, 3, 2}, f);
    std::vector<uint32_t> expect = {0, 1, 2, 3, 4, 5, 6, 10, 11, 15, 16};
    CHECK(std::vector<uint32_t>(code.parity_exponents().begin(),
                                code.parity_exponents().end()) == expect);
    CHECK(code.parity_matrix().rows() == 11);
    CHECK(code.parity_matrix().cols() == 30);
    CHECK(rank(code.parity_matrix()) == 11);
    CHECK(code.dimension() == 19);
    CHECK(code.reconstruct_threshold() == 23);
}

TEST_CASE("construction at the 16-node scale over GF(29)", "[msrr]") {
    Field f = make_field(FieldSpec::prime(29));
    MsrrCode code({16, 4, 13, 2, 2}, f);
    CHECK(code.dimension() == 11);
    CHECK(code.parity_exponents().size() == 5);
    CHECK(code.reconstruct_threshold() == 13);

    CHECK_THROWS_AS(MsrrCode({16, 4, 13, 2, 3}, f), ParamError);  // dbar = kbar
    Field small = make_field(FieldSpec::prime(13));
    CHECK_THROWS_AS(MsrrCode({16, 4, 13, 2, 2}, small), FieldError);  // q <= n
    Field bad_u = make_field(FieldSpec::prime(23));
    CHECK_THROWS_AS(MsrrCode({16, 4, 13, 2, 2}, bad_u), FieldError);  // 4 does not divide 22
}

TEST_CASE("systematic encoding", "[msrr]") {
    Field f = make_field(FieldSpec::prime(29));
    MsrrCode code({16, 4, 13, 2, 2}, f);

    SECTION("all-zero data gives the all-zero codeword") {
        std::vector<Fel> zero(code.dimension(), Fel(0));
        std::vector<Fel> c = code.encode_systematic(zero);
        for (Fel x : c) CHECK(x.is_zero());
    }

    SECTION("data sits on the first 13 coordinates as (s1..s10, *, *, s11)") {
        std::vector<Fel> data;
        for (uint32_t i = 1; i <= 11; ++i) data.emplace_back(i);
        std::vector<Fel> c = code.encode_systematic(data);
        for (uint32_t i = 0; i < 10; ++i) CHECK(c[i].repr() == i + 1);
        CHECK(c[12].repr() == 11);
        CHECK(code.is_codeword(c));
    }

    SECTION("random stripes are codewords and read back exactly") {
        std::mt19937_64 rng(40);
        for (int t = 0; t < 100; ++t) {
            std::vector<Fel> data = rand_fels(f, code.dimension(), rng);
            std::vector<Fel> c = code.encode_systematic(data);
            CHECK(code.is_codeword(c));
            CHECK(code.data_readback(c) == data);
        }
    }

    SECTION("wrong data length is rejected") {
        std::vector<Fel> bad(code.dimension() + 1, Fel(0));
        CHECK_THROWS_AS(code.encode_systematic(bad), ParamError);
    }
}

TEST_CASE("plain generator encoding round-trips", "[msrr]") {
    Field f = make_field(FieldSpec::prime(29));
    MsrrCode code({16, 4, 13, 2, 2}, f);
    std::mt19937_64 rng(41);
    for (int t = 0; t < 20; ++t) {
        std::vector<Fel> data = rand_fels(f, code.dimension(), rng);
        std::vector<Fel> c = code.encode_plain(data);
        CHECK(code.is_codeword(c));
        CHECK(code.plain_readback(c) == data);
    }
    FMatrix g = code.generator_matrix();
    CHECK(g.rows() == code.dimension());
    CHECK(g.cols() == 16);
    CHECK(rank(g) == code.dimension());
}

TEST_CASE("subcode of the supercode", "[msrr]") {
    // every codeword satisfies the consecutive-power parities below the
    // reconstruction threshold
    Field f = make_field(FieldSpec::binary(8));
    MsrrCode code({30, 5, 24, 3, 2}, f);
    std::mt19937_64 rng(42);
    std::vector<Fel> c = code.encode_systematic(rand_fels(f, code.dimension(), rng));
    for (uint32_t t = 0; t + code.reconstruct_threshold() < 30; ++t) {
        Fel acc(0);
        for (uint32_t e = 0; e < 6; ++e)
            for (uint32_t g = 0; g < 5; ++g)
                acc = f.add(acc, f.mul(f.pow(code.grid().node_locator(e, g), t),
                                       c[code.grid().flat(e, g)]));
        CHECK(acc.is_zero());
    }
}

TEST_CASE("reconstruction", "[msrr]") {
    Field f = make_field(FieldSpec::prime(29));
    MsrrCode code({16, 4, 13, 2, 2}, f);
    std::mt19937_64 rng(43);
    std::vector<Fel> word = code.encode_systematic(rand_fels(f, code.dimension(), rng));

    SECTION("all coordinates return the same codeword") {
        std::map<uint32_t, Fel> all;
        for (uint32_t i = 0; i < 16; ++i) all.emplace(i, word[i]);
        CHECK(code.reconstruct(all) == word);
    }

    SECTION("any 13 of 16 coordinates suffice (exhaustive)") {
        for (uint32_t a = 0; a < 16; ++a)
            for (uint32_t b = a + 1; b < 16; ++b)
                for (uint32_t c2 = b + 1; c2 < 16; ++c2) {
                    std::map<uint32_t, Fel> coords;
                    for (uint32_t i = 0; i < 16; ++i)
                        if (i != a && i != b && i != c2) coords.emplace(i, word[i]);
                    CHECK(code.reconstruct(coords) == word);
                }
    }

    SECTION("12 coordinates are rejected") {
        std::map<uint32_t, Fel> coords;
        for (uint32_t i = 0; i < 12; ++i) coords.emplace(i, word[i]);
        CHECK_THROWS_AS(code.reconstruct(coords), InsufficientDataError);
    }

    SECTION("corruption is detected when extra coordinates disagree") {
        std::map<uint32_t, Fel> coords;
        for (uint32_t i = 0; i < 14; ++i) coords.emplace(i, word[i]);
        coords[13] = f.add(coords[13], f.one());
        CHECK_THROWS_AS(code.reconstruct(coords), InconsistentDataError);
    }
}

TEST_CASE("rack-level words", "[msrr]") {
    Field f = make_field(FieldSpec::binary(8));
    MsrrCode code({30, 5, 24, 3, 2}, f);
    std::mt19937_64 rng(44);
    std::vector<Fel> word = code.encode_systematic(rand_fels(f, code.dimension(), rng));

    SECTION("index 0 collapses to plain rack sums") {
        std::vector<Fel> w = code.rack_level(word, 0);
        for (uint32_t e = 0; e < 6; ++e) {
            Fel acc(0);
            for (uint32_t g = 0; g < 5; ++g) acc = f.add(acc, word[e * 5 + g]);
            CHECK(w[e] == acc);
        }
    }

    SECTION("all-zero codeword maps to the all-zero word") {
        std::vector<Fel> zero(30, Fel(0));
        for (Fel x : code.rack_level(zero, 1)) CHECK(x.is_zero());
    }

    SECTION("every word satisfies the rack-level parities") {
        for (uint32_t i = 0; i < 2; ++i) CHECK(code.grid().rack_word_ok(code.rack_level(word, i)));
    }

    SECTION("linear combinations of the words stay in the rack-level code") {
        std::mt19937_64 rng2(45);
        std::vector<std::vector<Fel>> w = {code.rack_level(word, 0), code.rack_level(word, 1)};
        for (int t = 0; t < 20; ++t) {
            Fel a(uint32_t(rng2() % 256)), b(uint32_t(rng2() % 256));
            std::vector<Fel> mix(6);
            for (uint32_t e = 0; e < 6; ++e)
                mix[e] = f.add(f.mul(a, w[0][e]), f.mul(b, w[1][e]));
            CHECK(code.grid().rack_word_ok(mix));
        }
    }

    SECTION("index out of range is rejected") {
        CHECK_THROWS_AS(code.rack_level(word, 2), ParamError);
    }
}

TEST_CASE("repair plans", "[msrr]") {
    Field f = make_field(FieldSpec::binary(8));
    MsrrCode code({30, 5, 24, 3, 2}, f);

    SECTION("single failure in rack 0 with local helpers 2,3,4 zeroes node 1") {
        auto plan = code.repair_plan(0, {0}, {2, 3, 4}, {1, 2});
        REQUIRE(plan.combined.rows() == 1);
        CHECK(plan.combined.at(0, 0) == f.one());
        CHECK(plan.combined.at(0, 1).is_zero());
    }

    SECTION("h = u-l reduces to inverting the failed-column submatrix") {
        auto plan = code.repair_plan(3, {1, 4}, {0, 2, 3}, {0, 5});
        REQUIRE(plan.astar.rows() == 2);
        for (uint32_t i = 0; i < 2; ++i) {
            CHECK(plan.combined.at(i, 1) == (i == 0 ? f.one() : f.zero()));
            CHECK(plan.combined.at(i, 4) == (i == 1 ? f.one() : f.zero()));
        }
    }

    SECTION("invalid requests are rejected") {
        CHECK_THROWS_AS(code.repair_plan(0, {0}, {2, 3, 4}, {0, 2}), ParamError);  // host helper
        CHECK_THROWS_AS(code.repair_plan(0, {0}, {0, 3, 4}, {1, 2}), ParamError);  // overlap
        CHECK_THROWS_AS(code.repair_plan(0, {0}, {2, 3}, {1, 2}), ParamError);     // too few locals
        CHECK_THROWS_AS(code.repair_plan(0, {0, 1, 2}, {3, 4}, {1, 2}), ParamError);  // h > u-l
        CHECK_THROWS_AS(code.repair_plan(0, {0}, {2, 3, 4}, {1}), ParamError);  // too few helpers
        CHECK_THROWS_AS(code.repair_plan(6, {0}, {2, 3, 4}, {1, 2}), ParamError);  // bad host
    }
}

TEST_CASE("helper contributions", "[msrr]") {
    Field f = make_field(FieldSpec::binary(8));
    MsrrCode code({30, 5, 24, 3, 2}, f);
    std::mt19937_64 rng(46);
    std::vector<Fel> word = code.encode_systematic(rand_fels(f, code.dimension(), rng));

    SECTION("zero rack symbols give the zero vector") {
        auto plan = code.repair_plan(0, {0}, {2, 3, 4}, {1, 2});
        std::vector<Fel> zeros(5, Fel(0));
        for (Fel x : code.helper_contribution(plan, 1, zeros)) CHECK(x.is_zero());
    }

    SECTION("two failures: contribution matches the explicit transform") {
        auto plan = code.repair_plan(0, {0, 1}, {2, 3, 4}, {1, 5});
        std::vector<Fel> w0 = code.rack_level(word, 0), w1 = code.rack_level(word, 1);
        for (uint32_t e : plan.helper_racks) {
            std::vector<Fel> rack(word.begin() + e * 5, word.begin() + (e + 1) * 5);
            std::vector<Fel> v = code.helper_contribution(plan, e, rack);
            REQUIRE(v.size() == 2);
            for (uint32_t i = 0; i < 2; ++i) {
                Fel expect = f.add(f.mul(plan.astar.at(i, 0), w0[e]),
                                   f.mul(plan.astar.at(i, 1), w1[e]));
                CHECK(v[i] == expect);
            }
        }
    }

    SECTION("non-helper racks are rejected") {
        auto plan = code.repair_plan(0, {0}, {2, 3, 4}, {1, 2});
        std::vector<Fel> rack(5, Fel(0));
        CHECK_THROWS_AS(code.helper_contribution(plan, 3, rack), ParamError);
    }
}

TEST_CASE("repair round trips", "[msrr]") {
    Field f = make_field(FieldSpec::binary(8));
    MsrrCode code({30, 5, 24, 3, 2}, f);
    std::mt19937_64 rng(47);
    std::vector<Fel> word = code.encode_systematic(rand_fels(f, code.dimension(), rng));

    SECTION("single failure (0,0) from locals 2,3,4") {
        check_repair(code, word, 0, {0}, {2, 3, 4}, {1, 2});
    }

    SECTION("all-zero codeword repairs to zeros") {
        std::vector<Fel> zero(30, Fel(0));
        check_repair(code, zero, 2, {1, 3}, {0, 2, 4}, {4, 5});
    }

    SECTION("random hosts, failure sets and helper choices") {
        std::mt19937_64 rng2(48);
        for (int t = 0; t < 60; ++t) {
            uint32_t host = uint32_t(rng2() % 6);
            std::vector<uint32_t> gs = {0, 1, 2, 3, 4};
            std::shuffle(gs.begin(), gs.end(), rng2);
            uint32_t h = 1 + uint32_t(rng2() % 2);
            std::vector<uint32_t> failed(gs.begin(), gs.begin() + h);
            std::vector<uint32_t> locals(gs.begin() + h, gs.begin() + h + 3);
            std::vector<uint32_t> racks = {0, 1, 2, 3, 4, 5};
            racks.erase(racks.begin() + host);
            std::shuffle(racks.begin(), racks.end(), rng2);
            std::vector<uint32_t> helpers(racks.begin(), racks.begin() + 2);
            check_repair(code, word, host, failed, locals, helpers);
        }
    }
}

TEST_CASE("degenerate dbar=0 code is locally repairable", "[msrr]") {
    Field f = make_field(FieldSpec::prime(13));
    MsrrCode code({8, 4, 5, 2, 0}, f);
    std::mt19937_64 rng(49);
    std::vector<Fel> word = code.encode_systematic(rand_fels(f, code.dimension(), rng));

    // each rack restricted word lies in a [u, l] code: the rack-level values
    // vanish for every i
    for (uint32_t i = 0; i < 2; ++i)
        for (Fel x : code.rack_level(word, i)) CHECK(x.is_zero());

    // local repair with an empty helper set
    check_repair(code, word, 0, {1}, {0, 3}, {});
    check_repair(code, word, 1, {0, 2}, {1, 3}, {});
}

TEST_CASE("brute-force minimum distance meets the locality bound", "[msrr]") {
    Field f = make_field(FieldSpec::prime(13));
    {
        MsrrCode code({8, 4, 5, 2, 0}, f);
        const uint64_t dmin = code.dmin_bruteforce();
        CHECK(dmin == 4);
        CHECK(int64_t(dmin) == lrc_dmin_bound(8, code.dimension(), 2, 3));
    }
    {
        MsrrCode code({8, 4, 4, 2, 0}, f);
        const uint64_t dmin = code.dmin_bruteforce();
        CHECK(int64_t(dmin) == lrc_dmin_bound(8, code.dimension(), 2, 3));
        CHECK(dmin == 7);  // the parity set is contiguous here, an MDS [8, 2] code
    }
    {
        Field big = make_field(FieldSpec::binary(8));
        MsrrCode code({30, 5, 24, 3, 2}, big);
        CHECK_THROWS_AS(code.dmin_bruteforce(), LinalgError);  // q^B too large
    }
}
