// Copyright 2026 The metrrc authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <string>

#include "metrrc/params.hpp"

using namespace metrrc;

namespace {

// Every valid (k, l, dbar) combination for a small grid, applied to fn.
template <class Fn>
void sweep_small(uint32_t nbar_lo, uint32_t nbar_hi, uint32_t u_lo, uint32_t u_hi, Fn&& fn) {
    for (uint32_t nbar = nbar_lo; nbar <= nbar_hi; ++nbar)
        for (uint32_t u = u_lo; u <= u_hi; ++u) {
            const uint32_t n = nbar * u;
            for (uint32_t k = u; k < n; ++k) {
                const uint32_t kbar = k / u;
                for (uint32_t l = 0; l < u; ++l)
                    for (uint32_t dbar = 0; dbar < kbar; ++dbar)
                        fn(CodeParams{n, u, k, l, dbar});
            }
        }
}

}  // namespace

TEST_CASE("derive on the worked examples", "[params]") {
    {
        DerivedParams d = derive({30, 5, 24, 3, 2}, CodeMode::MSRR);
        CHECK(d.nbar == 6);
        CHECK(d.kbar == 4);
        CHECK(d.u0 == 4);
        CHECK(d.u0_tilde == 3);
        CHECK(d.alpha == 1);
        CHECK(d.beta == 1);
        CHECK(d.file_size == 19);
    }
    {
        DerivedParams d = derive({16, 4, 13, 2, 2}, CodeMode::MBRR);
        CHECK(d.file_size == 20);
        CHECK(d.alpha == 2);
        CHECK(d.beta == 1);
    }
    {
        // storage overheads n*alpha/B = 150/103 and 1200/768
        DerivedParams ms = derive({150, 5, 144, 3, 8}, CodeMode::MSRR);
        CHECK(ms.file_size == 103);
        CHECK(ms.alpha == 1);
        DerivedParams mb = derive({150, 5, 144, 3, 8}, CodeMode::MBRR);
        CHECK(mb.file_size == 768);
        CHECK(mb.alpha == 8);
        CHECK(150 * 8 * 10000 / 768 == 15625);  // 1.5625 exactly
    }
    {
        // dbar = 0 degenerates to beta = 0 and B = kbar*l + u0_tilde
        DerivedParams d = derive({8, 4, 5, 2, 0}, CodeMode::MSRR);
        CHECK(d.beta == 0);
        CHECK(d.file_size == 3);
    }
}

TEST_CASE("validation names the violated constraint", "[params]") {
    auto message_of = [](CodeParams p) {
        try {
            validate(p);
        } catch (const ParamError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message_of({31, 5, 24, 3, 2}).find("n = nbar*u") != std::string::npos);
    CHECK(message_of({30, 5, 4, 3, 2}).find("u <= k < n") != std::string::npos);
    CHECK(message_of({30, 5, 30, 3, 2}).find("u <= k < n") != std::string::npos);
    CHECK(message_of({30, 5, 24, 5, 2}).find("0 <= l < u") != std::string::npos);
    CHECK(message_of({30, 5, 24, 3, 4}).find("dbar < kbar") != std::string::npos);
    CHECK_THROWS_AS(derive({30, 5, 24, 3, 0}, CodeMode::MBRR), ParamError);
}

TEST_CASE("cutset_bound", "[params]") {
    CodeParams ex1{30, 5, 24, 3, 2};
    CHECK(cutset_bound(ex1, 1, 1) == 19);

    // dbar = 0: empty helper sum
    CHECK(cutset_bound({8, 4, 5, 2, 0}, 3, 1) == 3 * 3);

    // extreme points meet the bound with equality across a sweep
    sweep_small(2, 5, 2, 4, [](const CodeParams& p) {
        DerivedParams ms = derive(p, CodeMode::MSRR);
        CHECK(cutset_bound(p, ms.alpha, 1) == ms.file_size);
        if (p.dbar >= 1) {
            DerivedParams mb = derive(p, CodeMode::MBRR);
            CHECK(cutset_bound(p, mb.alpha, mb.beta) == mb.file_size);
        }
    });
}

TEST_CASE("MSRR dimension is strictly below k", "[params]") {
    sweep_small(2, 5, 2, 4, [](const CodeParams& p) {
        CHECK(derive(p, CodeMode::MSRR).file_size < p.k);
    });
}

TEST_CASE("MSRR dimension is monotone in dbar and l", "[params]") {
    sweep_small(2, 5, 2, 4, [](const CodeParams& p) {
        const uint64_t b = derive(p, CodeMode::MSRR).file_size;
        if (p.dbar + 1 < p.k / p.u) {
            CodeParams q = p;
            q.dbar += 1;
            CHECK(derive(q, CodeMode::MSRR).file_size >= b);
        }
        if (p.l + 1 < p.u) {
            CodeParams q = p;
            q.l += 1;
            CHECK(derive(q, CodeMode::MSRR).file_size >= b);
        }
    });
}

TEST_CASE("lrc_dmin_bound", "[params]") {
    // u does not divide k: bound collapses to n - (kbar*u + u0_tilde) + 1
    {
        CodeParams p{8, 4, 5, 2, 0};
        DerivedParams d = derive(p, CodeMode::MSRR);
        int64_t bound = lrc_dmin_bound(p.n, d.file_size, p.l, p.u - p.l + 1);
        CHECK(bound == int64_t(p.n) - (d.kbar * p.u + d.u0_tilde) + 1);
        CHECK(bound == 4);
    }
    // u divides k: bound collapses to n - (kbar-1)*u - l + 1
    {
        CodeParams p{8, 4, 4, 2, 0};
        DerivedParams d = derive(p, CodeMode::MSRR);
        int64_t bound = lrc_dmin_bound(p.n, d.file_size, p.l, p.u - p.l + 1);
        CHECK(bound == int64_t(p.n) - int64_t(d.kbar - 1) * p.u - p.l + 1);
    }
    // r = B: a single locality group, plain Singleton
    CHECK(lrc_dmin_bound(12, 5, 5, 3) == 12 - 5 + 1);
}

TEST_CASE("flowgraph_mincut on pinned instances", "[params]") {
    // (n, k, u, dbar, l) = (9, 6, 3, 1, 1): Eq-value 4, cross-checked by flow
    CodeParams fig{9, 3, 6, 1, 1};
    CHECK(cutset_bound(fig, 1, 1) == 4);
    CHECK(flowgraph_mincut(fig, 1, 1) == 4);

    CodeParams ex1{30, 5, 24, 3, 2};
    CHECK(flowgraph_mincut(ex1, 1, 1) == 19);

    // beta = 0 leaves only the local terms
    CHECK(flowgraph_mincut(ex1, 1, 0) == 4 * 3 + 3);
    CHECK(flowgraph_mincut(ex1, 2, 0) == 2 * (4 * 3 + 3));

    CHECK_THROWS_AS(flowgraph_mincut({60, 6, 30, 2, 2}, 1, 1), ParamError);  // u too large
}

TEST_CASE("flowgraph_mincut equals cutset_bound on a small sweep", "[params]") {
    // a down-scaled version of the exhaustive acceptance sweep
    sweep_small(2, 4, 2, 3, [](const CodeParams& p) {
        for (uint64_t alpha = 1; alpha <= 2; ++alpha)
            for (uint64_t beta = 1; beta <= 2; ++beta)
                CHECK(flowgraph_mincut(p, alpha, beta) == cutset_bound(p, alpha, beta));
    });
}
