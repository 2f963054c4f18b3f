// Copyright 2026 The metrrc authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <vector>

#include "metrrc/chunk_io.hpp"

using namespace metrrc;

TEST_CASE("header round-trips bit-exactly", "[chunk_io]") {
    std::mt19937_64 rng(70);
    for (int t = 0; t < 200; ++t) {
        ChunkHeader h;
        h.mode = ChunkMode(rng() % 4);
        h.field = (rng() & 1) ? FieldSpec::binary(8) : FieldSpec::prime(29);
        // valid random parameters
        const uint32_t u = 2 + rng() % 4;
        const uint32_t nbar = 2 + rng() % 6;
        h.params.n = nbar * u;
        h.params.u = u;
        h.params.k = u + rng() % (h.params.n - u);
        h.params.l = rng() % u;
        const uint32_t kbar = h.params.k / u;
        h.params.dbar = rng() % kbar;
        h.payload_bytes = rng();
        h.rack = uint16_t(rng() % nbar);
        h.node = uint16_t(rng() % u);

        auto bytes = h.serialize();
        ChunkHeader back = ChunkHeader::parse(bytes);
        CHECK(back.mode == h.mode);
        CHECK(back.field == h.field);
        CHECK(back.params == h.params);
        CHECK(back.payload_bytes == h.payload_bytes);
        CHECK(back.rack == h.rack);
        CHECK(back.node == h.node);
        CHECK(back.serialize() == bytes);
    }
}

TEST_CASE("header rejects corruption and bad parameters", "[chunk_io]") {
    ChunkHeader h;
    h.field = FieldSpec::binary(8);
    h.params = {30, 5, 24, 3, 2};
    h.payload_bytes = 1234;
    auto bytes = h.serialize();

    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(ChunkHeader::parse(bad), IoError);

    bad = bytes;
    bad[8] = 9;  // unknown mode byte
    CHECK_THROWS_AS(ChunkHeader::parse(bad), IoError);

    bad = bytes;
    bad[19] = 31;  // n = 31 breaks n = nbar*u
    CHECK_THROWS_AS(ChunkHeader::parse(bad), ParamError);

    bad = bytes;
    bad[37] = 29;  // rack index out of range
    CHECK_THROWS_AS(ChunkHeader::parse(bad), IoError);

    std::vector<uint8_t> tiny(10, 0);
    CHECK_THROWS_AS(ChunkHeader::parse(tiny), IoError);
}

TEST_CASE("headers agree across a stripe set only on matching parameters", "[chunk_io]") {
    ChunkHeader a;
    a.field = FieldSpec::prime(29);
    a.params = {16, 4, 13, 2, 2};
    a.payload_bytes = 100;
    ChunkHeader b = a;
    b.node = 3;
    CHECK(a.same_stripe_set(b));
    b.payload_bytes = 99;
    CHECK(!a.same_stripe_set(b));
    b = a;
    b.mode = ChunkMode::mbrr_systematic;
    CHECK(!a.same_stripe_set(b));
}

TEST_CASE("symbol width covers the field order", "[chunk_io]") {
    CHECK(symbol_width(2) == 1);
    CHECK(symbol_width(29) == 1);
    CHECK(symbol_width(256) == 1);
    CHECK(symbol_width(257) == 2);
    CHECK(symbol_width(65536) == 2);
    CHECK(symbol_width(65537) == 3);
}

TEST_CASE("data bits per symbol always fit the field", "[chunk_io]") {
    CHECK(data_bits_per_symbol(2) == 1);
    CHECK(data_bits_per_symbol(13) == 3);
    CHECK(data_bits_per_symbol(29) == 4);
    CHECK(data_bits_per_symbol(256) == 8);
    CHECK(data_bits_per_symbol(257) == 8);
    CHECK(data_bits_per_symbol(65536) == 16);
    for (uint32_t q : {3u, 13u, 29u, 251u, 256u, 65521u})
        CHECK((uint64_t(1) << data_bits_per_symbol(q)) <= q);
}

TEST_CASE("bit packing round-trips byte streams", "[chunk_io]") {
    std::mt19937_64 rng(71);
    for (uint32_t nbits : {1u, 3u, 4u, 8u, 11u, 16u}) {
        std::vector<uint8_t> payload(257);
        for (auto& b : payload) b = uint8_t(rng());
        BitReader reader(payload);
        BitWriter writer;
        while (!reader.exhausted()) writer.put(reader.take(nbits), nbits);
        std::vector<uint8_t> back = std::move(writer).take();
        back.resize(payload.size());  // strip padding
        CHECK(back == payload);
    }
}

TEST_CASE("reads past the payload produce zero padding", "[chunk_io]") {
    std::vector<uint8_t> payload = {0xFF};
    BitReader r(payload);
    CHECK(r.take(8) == 0xFF);
    CHECK(r.take(8) == 0);
    CHECK(r.exhausted());
}

TEST_CASE("stripe arithmetic", "[chunk_io]") {
    CHECK(stripe_count(0, 19, 256) == 0);
    CHECK(stripe_count(19, 19, 256) == 1);   // 19 bytes = one stripe of 19 8-bit symbols
    CHECK(stripe_count(20, 19, 256) == 2);
    CHECK(stripe_count(10, 20, 29) == 1);    // 80 bits per stripe at 4 bits per symbol
    CHECK(stripe_count(11, 20, 29) == 2);
    CHECK(stripe_count(1u << 20, 19, 256) == 55189);
}
