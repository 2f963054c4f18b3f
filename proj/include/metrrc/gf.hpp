/**************************************************************************
 * gf.hpp
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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace metrrc {

class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Description of a finite field: either a prime field GF(p) or a binary
/// extension GF(2^m) given by an irreducible reduction polynomial
/// (bit i of `poly` is the coefficient of x^i; bit m must be set).
struct FieldSpec {
    enum class Kind : uint8_t { Prime = 0, Binary = 1 };

    Kind kind = Kind::Prime;
    uint32_t p = 0;     // Prime: the modulus
    uint32_t m = 0;     // Binary: extension degree, 1 <= m <= 16
    uint32_t poly = 0;  // Binary: reduction polynomial incl. the x^m term

    static FieldSpec prime(uint32_t p) {
        FieldSpec s;
        s.kind = Kind::Prime;
        s.p = p;
        return s;
    }

    /// Binary field with a caller-supplied polynomial, or the default
    /// table entry when `poly` is 0.
    static FieldSpec binary(uint32_t m, uint32_t poly = 0);

    uint32_t order() const {
        return kind == Kind::Prime ? p : (uint32_t(1) << m);
    }

    bool operator==(const FieldSpec&) const = default;
};

/// A field element. Representation is an integer in [0, q): the residue for
/// prime fields, the coefficient bit-vector for binary extensions.
class Fel {
public:
    constexpr Fel() = default;
    constexpr explicit Fel(uint32_t repr) : r_(repr) {}
    constexpr uint32_t repr() const { return r_; }
    constexpr bool is_zero() const { return r_ == 0; }
    friend constexpr bool operator==(Fel, Fel) = default;

private:
    uint32_t r_ = 0;
};

namespace detail {

inline bool is_prime(uint32_t p) {
    if (p < 2) return false;
    for (uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline uint32_t poly_degree(uint32_t poly) {
    uint32_t d = 0;
    while (poly >> (d + 1)) ++d;
    return d;
}

// Remainder of a (mod b) over GF(2)[x].
inline uint32_t poly_mod(uint64_t a, uint32_t b) {
    const int db = int(poly_degree(b));
    for (int i = 63 - db; i >= 0; --i)
        if (a >> (i + db) & 1) a ^= uint64_t(b) << i;
    return uint32_t(a);
}

// Carry-less multiply of two GF(2)[x] polynomials of degree < 16.
inline uint64_t clmul(uint32_t a, uint32_t b) {
    uint64_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        a <<= 1;
        b >>= 1;
    }
    return r;
}

inline bool poly_irreducible(uint32_t poly, uint32_t m) {
    if (poly_degree(poly) != m) return false;
    if ((poly & 1) == 0) return m == 0;  // divisible by x
    for (uint32_t d = 1; 2 * d <= m; ++d)
        for (uint32_t f = (1u << d); f < (2u << d); ++f)
            if (poly_mod(poly, f) == 0) return false;
    return true;
}

}  // namespace detail

/// Default reduction polynomials for GF(2^m), m in [1, 16].
inline uint32_t default_binary_poly(uint32_t m) {
    static constexpr uint32_t table[17] = {
        0,       0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x89,
        0x11D,   0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003,
        0x1100B,
    };
    if (m < 1 || m > 16) throw FieldError("binary field degree m must be in [1, 16]");
    return table[m];
}

inline FieldSpec FieldSpec::binary(uint32_t m, uint32_t poly) {
    FieldSpec s;
    s.kind = Kind::Binary;
    s.m = m;
    s.poly = poly ? poly : default_binary_poly(m);
    return s;
}

/// Exact arithmetic in GF(p) or GF(2^m). Immutable after construction and
/// safe to share across threads; all operations are pure.
///
/// Binary extensions use log/antilog tables over a brute-forced generator,
/// so any irreducible reduction polynomial is accepted, primitive or not.
class Field {
public:
    explicit Field(const FieldSpec& spec) : spec_(spec) {
        if (spec.kind == FieldSpec::Kind::Prime) {
            if (!detail::is_prime(spec.p))
                throw FieldError("field order " + std::to_string(spec.p) + " is not prime");
            q_ = spec.p;
            char_ = spec.p;
        } else {
            if (spec.m < 1 || spec.m > 16)
                throw FieldError("binary field degree m must be in [1, 16]");
            if (!detail::poly_irreducible(spec.poly, spec.m))
                throw FieldError("reduction polynomial 0x" + hex(spec.poly) +
                                 " is reducible or of wrong degree");
            q_ = uint32_t(1) << spec.m;
            char_ = 2;
            build_tables();
        }
        primitive_ = find_smallest_primitive();
    }

    const FieldSpec& spec() const { return spec_; }
    uint32_t order() const { return q_; }
    uint32_t characteristic() const { return char_; }

    Fel zero() const { return Fel(0); }
    Fel one() const { return Fel(1); }

    Fel elem(uint32_t repr) const {
        if (repr >= q_) throw FieldError("element repr out of range");
        return Fel(repr);
    }

    /// v * 1_F (repeated addition of the field identity).
    Fel from_int(uint64_t v) const { return Fel(uint32_t(v % char_)); }

    Fel add(Fel a, Fel b) const {
        if (char_ == 2 && spec_.kind == FieldSpec::Kind::Binary) return Fel(a.repr() ^ b.repr());
        uint32_t s = a.repr() + b.repr();
        if (s >= q_) s -= q_;
        return Fel(s);
    }

    Fel neg(Fel a) const {
        if (spec_.kind == FieldSpec::Kind::Binary) return a;
        return a.is_zero() ? a : Fel(q_ - a.repr());
    }

    Fel sub(Fel a, Fel b) const { return add(a, neg(b)); }

    Fel mul(Fel a, Fel b) const {
        if (spec_.kind == FieldSpec::Kind::Binary) {
            if (a.is_zero() || b.is_zero()) return Fel(0);
            return Fel(exp_[log_[a.repr()] + log_[b.repr()]]);
        }
        return Fel(uint32_t(uint64_t(a.repr()) * b.repr() % q_));
    }

    Fel inv(Fel a) const {
        if (a.is_zero()) throw FieldError("inverse of zero");
        if (spec_.kind == FieldSpec::Kind::Binary)
            return Fel(exp_[q_ - 1 - log_[a.repr()]]);
        // extended Euclid on (a, p)
        int64_t t = 0, nt = 1, r = q_, nr = a.repr();
        while (nr != 0) {
            int64_t qq = r / nr;
            int64_t tmp = t - qq * nt;
            t = nt;
            nt = tmp;
            tmp = r - qq * nr;
            r = nr;
            nr = tmp;
        }
        if (t < 0) t += q_;
        return Fel(uint32_t(t));
    }

    Fel div(Fel a, Fel b) const { return mul(a, inv(b)); }

    /// a^e for any integer e; negative exponents invert, 0^0 = 1.
    Fel pow(Fel a, int64_t e) const {
        if (a.is_zero()) {
            if (e == 0) return one();
            if (e < 0) throw FieldError("negative power of zero");
            return zero();
        }
        int64_t g = int64_t(q_) - 1;
        int64_t em = e % g;
        if (em < 0) em += g;
        if (spec_.kind == FieldSpec::Kind::Binary)
            return Fel(exp_[uint64_t(log_[a.repr()]) * uint64_t(em) % uint64_t(g)]);
        uint64_t base = a.repr(), acc = 1;
        while (em) {
            if (em & 1) acc = acc * base % q_;
            base = base * base % q_;
            em >>= 1;
        }
        return Fel(uint32_t(acc));
    }

    /// Multiplicative order of a nonzero element, by exhaustive powering.
    uint64_t mult_order(Fel a) const {
        if (a.is_zero()) throw FieldError("order of zero");
        uint64_t k = 1;
        Fel x = a;
        while (!(x == one())) {
            x = mul(x, a);
            ++k;
        }
        return k;
    }

    /// The smallest-repr element of multiplicative order q-1. Deterministic.
    Fel primitive() const { return primitive_; }

private:
    static std::string hex(uint32_t v) {
        static const char* d = "0123456789ABCDEF";
        std::string s;
        do {
            s.insert(s.begin(), d[v & 0xF]);
            v >>= 4;
        } while (v);
        return s;
    }

    void build_tables() {
        const uint32_t g = q_ - 1;
        // locate a generator of the multiplicative group by brute force
        uint32_t gen = 0;
        for (uint32_t c = 2; c < q_; ++c) {
            uint32_t x = c;
            uint32_t ord = 1;
            while (x != 1) {
                x = detail::poly_mod(detail::clmul(x, c), spec_.poly);
                ++ord;
            }
            if (ord == g) {
                gen = c;
                break;
            }
        }
        if (gen == 0) gen = 1;  // q == 2
        exp_.assign(2 * g, 1);
        log_.assign(q_, 0);
        uint32_t x = 1;
        for (uint32_t i = 0; i < g; ++i) {
            exp_[i] = x;
            exp_[i + g] = x;
            log_[x] = i;
            x = detail::poly_mod(detail::clmul(x, gen), spec_.poly);
        }
    }

    Fel find_smallest_primitive() const {
        for (uint32_t c = 1; c < q_; ++c)
            if (mult_order(Fel(c)) == uint64_t(q_) - 1) return Fel(c);
        throw FieldError("no primitive element found");  // unreachable
    }

    FieldSpec spec_;
    uint32_t q_ = 0;
    uint32_t char_ = 0;
    Fel primitive_{0};
    std::vector<uint32_t> exp_, log_;
};

inline Field make_field(const FieldSpec& spec) { return Field(spec); }

inline Fel find_primitive(const Field& f) { return f.primitive(); }

/// eta = xi^((q-1)/u), an element of multiplicative order exactly u.
inline Fel unity_root(const Field& f, uint32_t u) {
    if (u == 0 || (f.order() - 1) % u != 0)
        throw FieldError("u = " + std::to_string(u) + " does not divide q-1 = " +
                         std::to_string(f.order() - 1));
    if (u % f.characteristic() == 0)
        throw FieldError("field characteristic divides u");  // impossible given u | q-1
    return f.pow(f.primitive(), (f.order() - 1) / u);
}

/// sum_{g=0}^{u-1} eta^{g*x}, computed directly. Equals u*1_F when u | x and
/// zero otherwise; kept as a self-test hook for that identity.
inline Fel char_sum(const Field& f, uint32_t u, uint64_t x) {
    Fel eta = unity_root(f, u);
    Fel t = f.pow(eta, int64_t(x));
    Fel acc = f.zero();
    Fel p = f.one();
    for (uint32_t g = 0; g < u; ++g) {
        acc = f.add(acc, p);
        p = f.mul(p, t);
    }
    return acc;
}

}  // namespace metrrc
