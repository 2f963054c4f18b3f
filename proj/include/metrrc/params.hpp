/**************************************************************************
 * params.hpp
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

#include <algorithm>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace metrrc {

class ParamError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CodeMode : uint8_t { MSRR = 0, MBRR = 1 };

inline const char* mode_name(CodeMode m) { return m == CodeMode::MSRR ? "MSRR" : "MBRR"; }

/// Code parameters: n nodes in racks of u, reconstruction threshold k,
/// intra-rack helper threshold l, helper-rack count dbar.
struct CodeParams {
    uint32_t n = 0;
    uint32_t u = 0;
    uint32_t k = 0;
    uint32_t l = 0;
    uint32_t dbar = 0;

    bool operator==(const CodeParams&) const = default;
};

struct DerivedParams {
    uint32_t nbar = 0;      // racks
    uint32_t kbar = 0;      // floor(k / u)
    uint32_t u0 = 0;        // k - kbar*u
    uint32_t u0_tilde = 0;  // min(u0, l)
    CodeMode mode = CodeMode::MSRR;
    uint32_t alpha = 0;     // symbols per node
    uint32_t beta = 0;      // symbols per helper rack per repaired node
    uint64_t file_size = 0; // B, data symbols per codeword
};

/// Validates the parameter invariants; throws ParamError naming the violated
/// constraint.
inline void validate(const CodeParams& p) {
    if (p.u == 0 || p.n == 0 || p.n % p.u != 0 || p.n / p.u < 2)
        throw ParamError("constraint violated: n = nbar*u with nbar >= 2 (n=" +
                         std::to_string(p.n) + ", u=" + std::to_string(p.u) + ")");
    if (p.k < p.u || p.k >= p.n)
        throw ParamError("constraint violated: u <= k < n (k=" + std::to_string(p.k) + ")");
    if (p.l >= p.u)
        throw ParamError("constraint violated: 0 <= l < u (l=" + std::to_string(p.l) + ")");
    const uint32_t kbar = p.k / p.u;
    if (p.dbar >= kbar)
        throw ParamError("constraint violated: dbar < kbar (dbar=" + std::to_string(p.dbar) +
                         ", kbar=" + std::to_string(kbar) + ")");
}

inline DerivedParams derive(const CodeParams& p, CodeMode mode) {
    validate(p);
    DerivedParams d;
    d.nbar = p.n / p.u;
    d.kbar = p.k / p.u;
    d.u0 = p.k - d.kbar * p.u;
    d.u0_tilde = std::min(d.u0, p.l);
    d.mode = mode;
    const uint64_t base = uint64_t(d.kbar) * p.l + d.u0_tilde;
    if (mode == CodeMode::MSRR) {
        d.alpha = 1;
        d.beta = p.dbar == 0 ? 0 : 1;
        d.file_size = base + uint64_t(p.u - p.l) * p.dbar;
    } else {
        if (p.dbar == 0)
            throw ParamError("constraint violated: dbar >= 1 for MBRR");
        d.alpha = p.dbar;
        d.beta = 1;
        // B = dbar*(kbar*l + u0_tilde + (u-l)(dbar+1)/2), computed as
        // dbar*(2*base + (u-l)(dbar+1))/2 with an integrality check.
        const uint64_t twice = uint64_t(p.dbar) * (2 * base + uint64_t(p.u - p.l) * (p.dbar + 1));
        if (twice % 2 != 0) throw ParamError("internal: MBRR file size is not an integer");
        d.file_size = twice / 2;
    }
    return d;
}

/// The cut-set bound B* on the file size at storage alpha and per-rack repair
/// bandwidth beta:
///   B* = (kbar*l + min(u0, l))*alpha
///        + (u - l) * sum_{i=1}^{min(dbar, kbar)} min((dbar-i+1)*beta, alpha).
inline uint64_t cutset_bound(const CodeParams& p, uint64_t alpha, uint64_t beta) {
    validate(p);
    const uint32_t kbar = p.k / p.u;
    const uint32_t u0 = p.k - kbar * p.u;
    const uint64_t u0t = std::min<uint64_t>(u0, p.l);
    uint64_t b = (uint64_t(kbar) * p.l + u0t) * alpha;
    const uint32_t terms = std::min(p.dbar, kbar);
    for (uint32_t i = 1; i <= terms; ++i)
        b += uint64_t(p.u - p.l) * std::min(uint64_t(p.dbar - i + 1) * beta, alpha);
    return b;
}

/// Distance bound for an [n, B] linear code whose symbols all have locality
/// (r, delta): d_min <= n - B + 1 - (ceil(B/r) - 1)(delta - 1).
inline int64_t lrc_dmin_bound(uint64_t n, uint64_t b, uint64_t r, uint64_t delta) {
    if (r < 1 || b < 1 || b > n) throw ParamError("lrc_dmin_bound requires 1 <= B <= n, r >= 1");
    const uint64_t groups = (b + r - 1) / r;
    return int64_t(n) - int64_t(b) + 1 - int64_t(groups - 1) * int64_t(delta - 1);
}

namespace detail {

/// Dinic max-flow on a small directed graph.
class MaxFlow {
public:
    explicit MaxFlow(size_t n) : head_(n, -1) {}

    size_t add_vertex() {
        head_.push_back(-1);
        return head_.size() - 1;
    }

    void add_edge(size_t from, size_t to, int64_t cap) {
        edges_.push_back({int(to), head_[from], cap});
        head_[from] = int(edges_.size()) - 1;
        edges_.push_back({int(from), head_[to], 0});
        head_[to] = int(edges_.size()) - 1;
    }

    int64_t run(size_t s, size_t t) {
        int64_t flow = 0;
        while (bfs(s, t)) {
            iter_ = head_;
            while (int64_t f = dfs(s, t, INT64_MAX)) flow += f;
        }
        return flow;
    }

private:
    struct Edge {
        int to, next;
        int64_t cap;
    };

    bool bfs(size_t s, size_t t) {
        level_.assign(head_.size(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(int(s));
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int e = head_[v]; e != -1; e = edges_[e].next)
                if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
                    level_[edges_[e].to] = level_[v] + 1;
                    q.push(edges_[e].to);
                }
        }
        return level_[t] >= 0;
    }

    int64_t dfs(int v, int t, int64_t lim) {
        if (v == t) return lim;
        for (int& e = iter_[v]; e != -1; e = edges_[e].next) {
            Edge& ed = edges_[e];
            if (ed.cap <= 0 || level_[ed.to] != level_[v] + 1) continue;
            int64_t f = dfs(ed.to, t, std::min(lim, ed.cap));
            if (f > 0) {
                ed.cap -= f;
                edges_[e ^ 1].cap += f;
                return f;
            }
        }
        return 0;
    }

    std::vector<int> head_, level_, iter_;
    std::vector<Edge> edges_;
};

}  // namespace detail

/// Min cut of the worst-case information-flow graph behind the cut-set
/// bound: a data collector on kbar fully repaired racks plus u0 nodes of one
/// more rack, with each rack's u-l replacements repaired in rack order so
/// that earlier racks serve as helper racks. Desk-scale test oracle only.
inline uint64_t flowgraph_mincut(const CodeParams& p, uint64_t alpha, uint64_t beta) {
    validate(p);
    const uint32_t nbar = p.n / p.u, u = p.u, l = p.l, dbar = p.dbar;
    const uint32_t kbar = p.k / p.u;
    const uint32_t u0 = p.k - kbar * u;
    if (nbar > 8 || u > 5) throw ParamError("flow-graph oracle instance too large");

    // Deferred edge list so that "infinite" capacity can be set to the total
    // finite capacity plus one.
    struct PendEdge {
        size_t from, to;
        int64_t cap;  // -1 marks infinite
    };
    std::vector<PendEdge> pend;
    int64_t finite_total = 0;
    size_t vcount = 0;
    auto vertex = [&]() { return vcount++; };
    auto edge = [&](size_t a, size_t b, int64_t c) {
        pend.push_back({a, b, c});
        if (c > 0) finite_total += c;
    };

    const size_t src = vertex(), sink = vertex();

    // Original node pairs; S feeds every original's in-vertex.
    std::vector<std::vector<size_t>> oin(nbar, std::vector<size_t>(u)),
        oout(nbar, std::vector<size_t>(u));
    for (uint32_t e = 0; e < nbar; ++e)
        for (uint32_t g = 0; g < u; ++g) {
            oin[e][g] = vertex();
            oout[e][g] = vertex();
            edge(oin[e][g], oout[e][g], int64_t(alpha));
            edge(src, oin[e][g], -1);
        }

    // Current out-vertex of each node; replaced as racks are repaired.
    std::vector<std::vector<size_t>> cur = oout;

    // Repairs a group of nodes in rack `host` from `helpers`, updating the
    // current versions. Each replacement draws beta from every helper rack
    // and freely from the host rack's first l survivors.
    auto repair_rack = [&](uint32_t host, uint32_t g_from, uint32_t g_to,
                           const std::vector<uint32_t>& helpers) {
        std::vector<size_t> agg(helpers.size());
        for (size_t j = 0; j < helpers.size(); ++j) {
            agg[j] = vertex();
            for (uint32_t g = 0; g < u; ++g) edge(cur[helpers[j]][g], agg[j], -1);
        }
        for (uint32_t g = g_from; g < g_to; ++g) {
            size_t rin = vertex(), rout = vertex();
            edge(rin, rout, int64_t(alpha));
            for (uint32_t gl = 0; gl < l; ++gl) edge(cur[host][gl], rin, -1);
            for (size_t j = 0; j < helpers.size(); ++j) edge(agg[j], rin, int64_t(beta));
            cur[host][g] = rout;
        }
    };

    // Helper choice for collector rack r: the already-repaired racks first,
    // then unconnected racks from the top.
    auto helper_choice = [&](uint32_t r) {
        std::vector<uint32_t> hs;
        for (uint32_t e = 0; e < std::min(r, dbar); ++e) hs.push_back(e);
        for (uint32_t e = nbar - 1; hs.size() < dbar; --e)
            if (e > r) hs.push_back(e);
        return hs;
    };

    for (uint32_t r = 0; r < kbar; ++r) repair_rack(r, l, u, helper_choice(r));
    if (u0 > l) {
        std::vector<uint32_t> hs;
        for (uint32_t e = 0; e < dbar; ++e) hs.push_back(e);
        repair_rack(kbar, l, u0, hs);
    }

    for (uint32_t r = 0; r < kbar; ++r)
        for (uint32_t g = 0; g < u; ++g) edge(cur[r][g], sink, -1);
    for (uint32_t g = 0; g < u0; ++g) edge(cur[kbar][g], sink, -1);

    detail::MaxFlow mf(vcount);
    const int64_t inf = finite_total + 1;
    for (const auto& pe : pend) mf.add_edge(pe.from, pe.to, pe.cap < 0 ? inf : pe.cap);
    return uint64_t(mf.run(src, sink));
}

}  // namespace metrrc
