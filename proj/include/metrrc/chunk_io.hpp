/**************************************************************************
 * chunk_io.hpp
 *
 * Copyright 2026 The metrrc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 **************************************************************************/

#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gf.hpp"
#include "params.hpp"

namespace metrrc {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Placement variants carried in the chunk header's mode byte. Values 0/1
/// are the systematic encoders; 2/3 are the plain generator/product
/// encodings selected by disabling --systematic.
enum class ChunkMode : uint8_t {
    msrr_systematic = 0,
    mbrr_systematic = 1,
    msrr_plain = 2,
    mbrr_product = 3,
};

inline CodeMode code_mode(ChunkMode m) {
    return (uint8_t(m) & 1) ? CodeMode::MBRR : CodeMode::MSRR;
}

inline bool systematic(ChunkMode m) { return uint8_t(m) < 2; }

/// Fixed 40-byte chunk-file header. All multi-byte integers big-endian.
///
///   off size  field
///     0    8  magic "METRRC01"
///     8    1  mode byte (ChunkMode)
///     9    1  field kind (0 prime, 1 binary extension)
///    10    4  field parameter A (prime p | extension degree m)
///    14    4  field parameter B (0 | reduction polynomial)
///    18   10  n, u, k, l, dbar (u16 each)
///    28    8  payload length in bytes
///    36    4  node index e, g (u16 each)
struct ChunkHeader {
    static constexpr size_t size = 40;
    static constexpr std::array<uint8_t, 8> magic = {'M', 'E', 'T', 'R', 'R', 'C', '0', '1'};

    ChunkMode mode = ChunkMode::msrr_systematic;
    FieldSpec field;
    CodeParams params;
    uint64_t payload_bytes = 0;
    uint16_t rack = 0;
    uint16_t node = 0;

    bool same_stripe_set(const ChunkHeader& o) const {
        return mode == o.mode && field == o.field && params == o.params &&
               payload_bytes == o.payload_bytes;
    }

    std::array<uint8_t, size> serialize() const {
        std::array<uint8_t, size> out{};
        size_t off = 0;
        std::memcpy(out.data(), magic.data(), 8);
        off = 8;
        out[off++] = uint8_t(mode);
        out[off++] = uint8_t(field.kind);
        const bool prime = field.kind == FieldSpec::Kind::Prime;
        put32(out.data() + off, prime ? field.p : field.m);
        off += 4;
        put32(out.data() + off, prime ? 0 : field.poly);
        off += 4;
        for (uint32_t v : {params.n, params.u, params.k, params.l, params.dbar}) {
            put16(out.data() + off, uint16_t(v));
            off += 2;
        }
        put64(out.data() + off, payload_bytes);
        off += 8;
        put16(out.data() + off, rack);
        off += 2;
        put16(out.data() + off, node);
        return out;
    }

    static ChunkHeader parse(std::span<const uint8_t> bytes) {
        if (bytes.size() < size) throw IoError("chunk header truncated");
        if (std::memcmp(bytes.data(), magic.data(), 8) != 0)
            throw IoError("bad chunk magic");
        ChunkHeader h;
        size_t off = 8;
        const uint8_t mode = bytes[off++];
        if (mode > 3) throw IoError("unknown chunk mode byte");
        h.mode = ChunkMode(mode);
        const uint8_t kind = bytes[off++];
        if (kind > 1) throw IoError("unknown field kind");
        const uint32_t a = get32(bytes.data() + off);
        off += 4;
        const uint32_t b = get32(bytes.data() + off);
        off += 4;
        h.field = kind == 0 ? FieldSpec::prime(a) : FieldSpec::binary(a, b);
        uint32_t* dst[] = {&h.params.n, &h.params.u, &h.params.k, &h.params.l, &h.params.dbar};
        for (uint32_t* d : dst) {
            *d = get16(bytes.data() + off);
            off += 2;
        }
        h.payload_bytes = get64(bytes.data() + off);
        off += 8;
        h.rack = get16(bytes.data() + off);
        off += 2;
        h.node = get16(bytes.data() + off);
        validate(h.params);  // header parameters obey the same invariants
        if (h.rack >= h.params.n / h.params.u || h.node >= h.params.u)
            throw IoError("chunk node index out of range");
        return h;
    }

private:
    static void put16(uint8_t* p, uint16_t v) {
        p[0] = uint8_t(v >> 8);
        p[1] = uint8_t(v);
    }
    static void put32(uint8_t* p, uint32_t v) {
        for (int i = 0; i < 4; ++i) p[i] = uint8_t(v >> (24 - 8 * i));
    }
    static void put64(uint8_t* p, uint64_t v) {
        for (int i = 0; i < 8; ++i) p[i] = uint8_t(v >> (56 - 8 * i));
    }
    static uint16_t get16(const uint8_t* p) { return uint16_t(p[0]) << 8 | p[1]; }
    static uint32_t get32(const uint8_t* p) {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | p[i];
        return v;
    }
    static uint64_t get64(const uint8_t* p) {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | p[i];
        return v;
    }
};

/// Stored width of one symbol: the smallest byte count whose range covers
/// the field order.
inline uint32_t symbol_width(uint32_t q) {
    uint32_t w = 1;
    uint64_t range = 256;
    while (range < q) {
        range *= 256;
        ++w;
    }
    return w;
}

/// Payload bits carried per data symbol: floor(log2 q), so every bit group
/// is a valid field element.
inline uint32_t data_bits_per_symbol(uint32_t q) {
    uint32_t b = 0;
    while ((uint64_t(1) << (b + 1)) <= q) ++b;
    return b;
}

inline void write_symbol_be(std::vector<uint8_t>& out, uint32_t repr, uint32_t width) {
    for (uint32_t i = 0; i < width; ++i) out.push_back(uint8_t(repr >> (8 * (width - 1 - i))));
}

inline uint32_t read_symbol_be(std::span<const uint8_t> in, size_t off, uint32_t width) {
    uint32_t v = 0;
    for (uint32_t i = 0; i < width; ++i) v = v << 8 | in[off + i];
    return v;
}

/// MSB-first bit reader over a byte buffer; reads past the end yield zeros
/// (the zero padding of a final stripe).
class BitReader {
public:
    explicit BitReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

    uint32_t take(uint32_t nbits) {
        uint32_t v = 0;
        for (uint32_t i = 0; i < nbits; ++i) {
            uint32_t bit = 0;
            const size_t byte = pos_ >> 3;
            if (byte < bytes_.size()) bit = bytes_[byte] >> (7 - (pos_ & 7)) & 1;
            v = v << 1 | bit;
            ++pos_;
        }
        return v;
    }

    bool exhausted() const { return pos_ >= bytes_.size() * 8; }

private:
    std::span<const uint8_t> bytes_;
    size_t pos_ = 0;
};

/// MSB-first bit writer.
class BitWriter {
public:
    void put(uint32_t v, uint32_t nbits) {
        for (uint32_t i = 0; i < nbits; ++i) {
            const uint32_t bit = v >> (nbits - 1 - i) & 1;
            if (fill_ == 0) bytes_.push_back(0);
            bytes_.back() |= uint8_t(bit << (7 - fill_));
            fill_ = (fill_ + 1) & 7;
        }
    }

    std::vector<uint8_t> take() && { return std::move(bytes_); }
    const std::vector<uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<uint8_t> bytes_;
    uint32_t fill_ = 0;
};

/// Number of codewords(stripes) needed for a payload.
inline uint64_t stripe_count(uint64_t payload_bytes, uint64_t file_size_symbols, uint32_t q) {
    const uint64_t bits_per_stripe = file_size_symbols * data_bits_per_symbol(q);
    if (payload_bytes == 0) return 0;
    return (payload_bytes * 8 + bits_per_stripe - 1) / bits_per_stripe;
}

}  // namespace metrrc
