// Copyright 2026 The metrrc authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <vector>

#include "metrrc/gf.hpp"

using namespace metrrc;

namespace {

// Independent irreducibility oracle: exhaustive trial division over all
// monic factors of degree <= deg/2.
bool trial_division_irreducible(uint32_t poly, uint32_t deg) {
    auto mod = [](uint64_t a, uint32_t b) {
        uint32_t db = 0;
        while (b >> (db + 1)) ++db;
        for (int i = 63 - int(db); i >= 0; --i)
            if (a >> (i + db) & 1) a ^= uint64_t(b) << i;
        return uint32_t(a);
    };
    for (uint32_t d = 1; 2 * d <= deg; ++d)
        for (uint32_t f = 1u << d; f < 2u << d; ++f)
            if (mod(poly, f) == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("field construction", "[gf]") {
    Field f13 = make_field(FieldSpec::prime(13));
    CHECK(f13.order() == 13);
    CHECK(f13.characteristic() == 13);

    Field f256 = make_field(FieldSpec::binary(8, 0x11D));
    CHECK(f256.order() == 256);
    CHECK(f256.characteristic() == 2);
    CHECK(trial_division_irreducible(0x11D, 8));

    CHECK_THROWS_AS(make_field(FieldSpec::binary(8, 0x100)), FieldError);  // x^8 = x*x^7
    CHECK(!trial_division_irreducible(0x100, 8));
    CHECK_THROWS_AS(make_field(FieldSpec::prime(15)), FieldError);
    CHECK_THROWS_AS(make_field(FieldSpec::prime(1)), FieldError);
    CHECK_THROWS_AS(make_field(FieldSpec::binary(4, 0x13 << 1)), FieldError);  // wrong degree
}

TEST_CASE("default polynomial table is irreducible", "[gf]") {
    for (uint32_t m = 1; m <= 16; ++m) {
        CHECK(trial_division_irreducible(default_binary_poly(m), m));
        Field f = make_field(FieldSpec::binary(m));
        CHECK(f.order() == (1u << m));
    }
}

TEST_CASE("find_primitive", "[gf]") {
    // brute-force order checks, independent of Field::mult_order
    Field f13 = make_field(FieldSpec::prime(13));
    Fel p13 = find_primitive(f13);
    CHECK(p13.repr() == 2);
    {
        uint32_t x = 1, ord = 0;
        do {
            x = uint32_t(uint64_t(x) * 2 % 13);
            ++ord;
        } while (x != 1);
        CHECK(ord == 12);
    }

    Field f256 = make_field(FieldSpec::binary(8, 0x11D));
    Fel p256 = find_primitive(f256);
    CHECK(p256.repr() == 2);
    {
        Fel x = p256;
        uint32_t ord = 1;
        while (!(x == f256.one())) {
            x = f256.mul(x, p256);
            ++ord;
        }
        CHECK(ord == 255);
    }

    Field f2 = make_field(FieldSpec::prime(2));
    CHECK(find_primitive(f2).repr() == 1);
}

TEST_CASE("primitive order is q-1 across the field menu", "[gf]") {
    std::vector<FieldSpec> menu = {
        FieldSpec::prime(2),     FieldSpec::prime(13),  FieldSpec::prime(17),
        FieldSpec::prime(29),    FieldSpec::prime(251), FieldSpec::prime(257),
        FieldSpec::binary(4),    FieldSpec::binary(8),  FieldSpec::binary(12),
        FieldSpec::binary(16),
    };
    for (const auto& spec : menu) {
        Field f = make_field(spec);
        CHECK(f.mult_order(f.primitive()) == f.order() - 1);
    }
}

TEST_CASE("unity_root", "[gf]") {
    Field f13 = make_field(FieldSpec::prime(13));
    Fel eta = unity_root(f13, 4);
    CHECK(eta.repr() == 8);  // 2^3 mod 13
    CHECK(f13.pow(eta, 4) == f13.one());
    CHECK(!(f13.pow(eta, 2) == f13.one()));

    CHECK(unity_root(f13, 1) == f13.one());
    Field f256 = make_field(FieldSpec::binary(8));
    CHECK_THROWS_AS(unity_root(f256, 7), FieldError);  // 7 does not divide 255

    // eta always has multiplicative order exactly u
    for (uint32_t u : {1u, 2u, 3u, 4u, 6u, 12u}) CHECK(f13.mult_order(unity_root(f13, u)) == u);
}

TEST_CASE("char_sum matches the two-case identity", "[gf]") {
    Field f13 = make_field(FieldSpec::prime(13));
    CHECK(char_sum(f13, 4, 8).repr() == 4);
    CHECK(char_sum(f13, 4, 3).repr() == 0);

    Field f256 = make_field(FieldSpec::binary(8));
    CHECK(char_sum(f256, 5, 0) == f256.from_int(5));  // = 1 in characteristic 2

    // sum_g eta^(gx) = u*1_F when u | x, else 0, for x in [0, 2u]
    struct Case {
        FieldSpec spec;
        std::vector<uint32_t> us;
    };
    std::vector<Case> cases = {
        {FieldSpec::prime(13), {1, 2, 3, 4, 6, 12}},
        {FieldSpec::prime(29), {1, 2, 4, 7, 14}},
        {FieldSpec::binary(8), {1, 3, 5, 15, 17}},
    };
    for (const auto& cs : cases) {
        Field f = make_field(cs.spec);
        for (uint32_t u : cs.us) {
            CHECK(u % f.characteristic() != 0);
            for (uint64_t x = 0; x <= 2 * u; ++x) {
                Fel expect = (x % u == 0) ? f.from_int(u) : f.zero();
                CHECK(char_sum(f, u, x) == expect);
            }
        }
    }
}

TEST_CASE("field axioms", "[gf]") {
    std::vector<FieldSpec> specs = {FieldSpec::prime(13), FieldSpec::binary(4),
                                    FieldSpec::prime(257), FieldSpec::binary(8)};
    for (const auto& spec : specs) {
        Field f = make_field(spec);
        const uint32_t q = f.order();

        // exhaustive pairs: commutativity, inverses, identities
        for (uint32_t a = 0; a < q; ++a) {
            Fel fa(a);
            CHECK(f.add(fa, f.zero()) == fa);
            CHECK(f.mul(fa, f.one()) == fa);
            CHECK(f.add(fa, f.neg(fa)) == f.zero());
            if (a != 0) {
                CHECK(f.mul(fa, f.inv(fa)) == f.one());
                CHECK(f.pow(fa, int64_t(q) - 1) == f.one());
            }
            for (uint32_t b = a; b < q; ++b) {
                CHECK(f.add(fa, Fel(b)) == f.add(Fel(b), fa));
                CHECK(f.mul(fa, Fel(b)) == f.mul(Fel(b), fa));
            }
        }
        CHECK_THROWS_AS(f.inv(f.zero()), FieldError);

        // associativity + distributivity: exhaustive for small q, sampled above
        std::mt19937 rng(7);
        const bool exhaustive = q <= 32;
        const uint32_t trials = exhaustive ? 0 : 20000;
        auto check_triple = [&](uint32_t a, uint32_t b, uint32_t c) {
            Fel fa(a), fb(b), fc(c);
            CHECK(f.add(f.add(fa, fb), fc) == f.add(fa, f.add(fb, fc)));
            CHECK(f.mul(f.mul(fa, fb), fc) == f.mul(fa, f.mul(fb, fc)));
            CHECK(f.mul(fa, f.add(fb, fc)) == f.add(f.mul(fa, fb), f.mul(fa, fc)));
        };
        if (exhaustive) {
            for (uint32_t a = 0; a < q; ++a)
                for (uint32_t b = 0; b < q; ++b)
                    for (uint32_t c = 0; c < q; ++c) check_triple(a, b, c);
        } else {
            for (uint32_t t = 0; t < trials; ++t)
                check_triple(rng() % q, rng() % q, rng() % q);
        }
    }
}

TEST_CASE("pow handles negative exponents and zero", "[gf]") {
    Field f = make_field(FieldSpec::prime(29));
    Fel a(7);
    CHECK(f.pow(a, -1) == f.inv(a));
    CHECK(f.pow(a, -3) == f.inv(f.pow(a, 3)));
    CHECK(f.pow(f.zero(), 0) == f.one());
    CHECK(f.pow(f.zero(), 5) == f.zero());
    CHECK_THROWS_AS(f.pow(f.zero(), -1), FieldError);

    Field g = make_field(FieldSpec::binary(8));
    Fel b(0x53);
    CHECK(g.pow(b, -2) == g.inv(g.mul(b, b)));
}
