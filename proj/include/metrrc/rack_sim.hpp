/**************************************************************************
 * rack_sim.hpp
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
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "mbrr.hpp"
#include "msrr.hpp"
#include "params.hpp"

namespace metrrc {

class UnrecoverableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FailurePattern {
    std::vector<uint32_t> nodes;  // flat labels e*u + g
};

enum class RepairClass : uint8_t { optimal = 0, naive = 1, unrecoverable = 2 };

inline const char* repair_class_name(RepairClass c) {
    switch (c) {
        case RepairClass::optimal: return "optimal";
        case RepairClass::naive: return "naive";
        default: return "unrecoverable";
    }
}

struct RackRepairEvent {
    uint32_t host = 0;
    uint32_t h = 0;
    std::vector<uint32_t> helper_racks;
    uint64_t cross_symbols = 0;
    uint64_t intra_symbols = 0;
};

struct RepairReport {
    RepairClass mode = RepairClass::optimal;
    uint32_t failures = 0;
    uint64_t cross_rack_symbols = 0;
    uint64_t intra_rack_symbols = 0;
    std::vector<RackRepairEvent> events;
    uint32_t naive_site = 0;  // reconstruction site, naive mode only
};

/// Pattern classification. Optimal repair needs every failed rack to keep at
/// least l survivors (at most u-l failures) and dbar failure-free racks to
/// exist (failures confined to at most nbar-dbar racks). Otherwise the file
/// is re-read from k survivors when that many remain, else the pattern is
/// unrecoverable.
inline RepairClass classify_pattern(const CodeParams& p, const DerivedParams& d,
                                    std::span<const uint32_t> failed) {
    std::vector<uint32_t> per_rack(d.nbar, 0);
    std::vector<bool> seen(p.n, false);
    uint32_t total = 0;
    for (uint32_t lbl : failed) {
        if (lbl >= p.n) throw ParamError("failure label out of range");
        if (seen[lbl]) continue;
        seen[lbl] = true;
        ++per_rack[lbl / p.u];
        ++total;
    }
    uint32_t racks_hit = 0, worst = 0;
    for (uint32_t c : per_rack) {
        racks_hit += c > 0;
        worst = std::max(worst, c);
    }
    const bool local_ok = worst <= p.u - p.l;          // every failed rack keeps >= l alive
    const bool helpers_ok = racks_hit <= d.nbar - p.dbar;
    if (local_ok && helpers_ok) return RepairClass::optimal;
    if (p.n - total >= p.k) return RepairClass::naive;
    return RepairClass::unrecoverable;
}

enum class HelperPolicy : uint8_t { lowest_index = 0, random_seeded = 1 };

namespace sim_detail {

using NodeRow = std::vector<Fel>;

inline std::vector<NodeRow> encode_nodes(const MsrrCode& c, std::span<const Fel> data) {
    std::vector<Fel> word = c.encode_systematic(data);
    std::vector<NodeRow> rows(word.size());
    for (size_t i = 0; i < word.size(); ++i) rows[i] = {word[i]};
    return rows;
}

inline std::vector<NodeRow> encode_nodes(const MbrrCode& c, std::span<const Fel> data) {
    FMatrix cw = c.encode_systematic(data);
    std::vector<NodeRow> rows(cw.rows());
    for (size_t i = 0; i < cw.rows(); ++i) rows[i] = cw.row(i);
    return rows;
}

inline std::vector<Fel> contribution(const MsrrCode& c, const MsrrRepairPlan& plan, uint32_t rack,
                                     std::span<const NodeRow> rack_rows) {
    std::vector<Fel> syms(rack_rows.size());
    for (size_t g = 0; g < rack_rows.size(); ++g) syms[g] = rack_rows[g][0];
    return c.helper_contribution(plan, rack, syms);
}

inline std::vector<Fel> contribution(const MbrrCode& c, const MbrrRepairPlan& plan, uint32_t rack,
                                     std::span<const NodeRow> rack_rows) {
    return c.helper_contribution(plan, rack, rack_rows);
}

inline std::vector<NodeRow> repair_rows(const MsrrCode& c, const MsrrRepairPlan& plan,
                                        const std::map<uint32_t, std::vector<Fel>>& contribs,
                                        std::span<const NodeRow> local_rows) {
    std::vector<Fel> locals(local_rows.size());
    for (size_t i = 0; i < local_rows.size(); ++i) locals[i] = local_rows[i][0];
    std::vector<Fel> fixed = c.repair(plan, contribs, locals);
    std::vector<NodeRow> rows(fixed.size());
    for (size_t i = 0; i < fixed.size(); ++i) rows[i] = {fixed[i]};
    return rows;
}

inline std::vector<NodeRow> repair_rows(const MbrrCode& c, const MbrrRepairPlan& plan,
                                        const std::map<uint32_t, std::vector<Fel>>& contribs,
                                        std::span<const NodeRow> local_rows) {
    std::vector<std::vector<Fel>> locals(local_rows.begin(), local_rows.end());
    return c.repair(plan, contribs, locals);
}

inline std::vector<NodeRow> reconstruct_rows(const MsrrCode& c,
                                             const std::map<uint32_t, NodeRow>& rows) {
    std::map<uint32_t, Fel> coords;
    for (const auto& [lbl, row] : rows) coords.emplace(lbl, row[0]);
    std::vector<Fel> word = c.reconstruct(coords);
    std::vector<NodeRow> out(word.size());
    for (size_t i = 0; i < word.size(); ++i) out[i] = {word[i]};
    return out;
}

inline std::vector<NodeRow> reconstruct_rows(const MbrrCode& c,
                                             const std::map<uint32_t, NodeRow>& rows) {
    FMatrix m = c.reconstruct(rows);
    FMatrix cw = c.encode(m);
    std::vector<NodeRow> out(cw.rows());
    for (size_t i = 0; i < cw.rows(); ++i) out[i] = cw.row(i);
    return out;
}

}  // namespace sim_detail

/// Deterministic single-codeword cluster: n node stores on an nbar x u grid,
/// failure injection, per-rack optimal repair with a naive full-read
/// fallback, and an exact bandwidth ledger. Not thread-safe; run one
/// instance per thread.
template <class Code>
class Cluster {
public:
    Cluster(const Code& code, std::span<const Fel> data)
        : code_(&code),
          store_(sim_detail::encode_nodes(code, data)),
          golden_(store_),
          alive_(code.params().n, true) {}

    const Code& code() const { return *code_; }
    std::span<const sim_detail::NodeRow> store() const { return store_; }
    bool alive(uint32_t label) const { return alive_[label]; }

    uint32_t live_count() const {
        uint32_t c = 0;
        for (bool a : alive_) c += a;
        return c;
    }

    RepairClass classify(const FailurePattern& pat) const {
        return classify_pattern(code_->params(), code_->derived(), pat.nodes);
    }

    /// Marks nodes dead. Idempotent.
    void inject(const FailurePattern& pat) {
        for (uint32_t lbl : pat.nodes) {
            if (lbl >= alive_.size()) throw ParamError("failure label out of range");
            alive_[lbl] = false;
        }
    }

    /// All nodes alive and every store equal to the reference codeword.
    bool healthy() const {
        for (bool a : alive_)
            if (!a) return false;
        return store_ == golden_;
    }

    /// Injects the pattern (if not already) and repairs every dead node,
    /// rack by rack in ascending order. Racks repaired earlier in the run
    /// become eligible helpers for later hosts.
    RepairReport run_repair(const FailurePattern& pat,
                            HelperPolicy policy = HelperPolicy::lowest_index,
                            uint64_t seed = 0) {
        inject(pat);
        const auto& p = code_->params();
        const uint32_t u = p.u, nbar = code_->derived().nbar;
        std::vector<uint32_t> dead;
        for (uint32_t lbl = 0; lbl < p.n; ++lbl)
            if (!alive_[lbl]) dead.push_back(lbl);

        RepairReport rep;
        rep.failures = uint32_t(dead.size());
        rep.mode = classify_pattern(p, code_->derived(), dead);
        if (rep.mode == RepairClass::unrecoverable)
            throw UnrecoverableError("failure pattern is unrecoverable: " +
                                     std::to_string(dead.size()) + " failures, fewer than k=" +
                                     std::to_string(p.k) + " survivors");
        if (dead.empty()) return rep;

        std::mt19937_64 rng(seed);
        if (rep.mode == RepairClass::optimal) {
            for (uint32_t host = 0; host < nbar; ++host) {
                std::vector<uint32_t> failed_g;
                for (uint32_t g = 0; g < u; ++g)
                    if (!alive_[host * u + g]) failed_g.push_back(g);
                if (failed_g.empty()) continue;
                repair_rack(host, failed_g, policy, rng, rep);
            }
        } else {
            naive_repair(rep);
        }
        if (!healthy()) throw std::logic_error("repair did not restore the reference codeword");
        return rep;
    }

private:
    void repair_rack(uint32_t host, const std::vector<uint32_t>& failed_g, HelperPolicy policy,
                     std::mt19937_64& rng, RepairReport& rep) {
        const auto& p = code_->params();
        const uint32_t u = p.u, nbar = code_->derived().nbar;
        const uint32_t alpha = code_->derived().alpha;

        std::vector<uint32_t> locals;
        for (uint32_t g = 0; g < u && locals.size() < p.l; ++g)
            if (alive_[host * u + g]) locals.push_back(g);

        std::vector<uint32_t> candidates;
        for (uint32_t e = 0; e < nbar; ++e) {
            if (e == host) continue;
            bool clean = true;
            for (uint32_t g = 0; g < u; ++g) clean &= alive_[e * u + g];
            if (clean) candidates.push_back(e);
        }
        if (candidates.size() < p.dbar)
            throw std::logic_error("helper racks unavailable despite optimal classification");
        if (policy == HelperPolicy::random_seeded)
            std::shuffle(candidates.begin(), candidates.end(), rng);
        candidates.resize(p.dbar);

        auto plan = code_->repair_plan(host, failed_g, locals, candidates);

        RackRepairEvent ev;
        ev.host = host;
        ev.h = uint32_t(failed_g.size());
        ev.helper_racks = plan.helper_racks;
        std::map<uint32_t, std::vector<Fel>> contribs;
        for (uint32_t e : plan.helper_racks) {
            std::span<const sim_detail::NodeRow> rack_rows(store_.data() + size_t(e) * u, u);
            std::vector<Fel> v = sim_detail::contribution(*code_, plan, e, rack_rows);
            ev.cross_symbols += v.size();
            ev.intra_symbols += uint64_t(u - 1) * alpha;  // gathered inside the helper rack
            contribs.emplace(e, std::move(v));
        }
        std::vector<sim_detail::NodeRow> local_rows;
        for (uint32_t g : plan.locals) local_rows.push_back(store_[host * u + g]);
        ev.intra_symbols += uint64_t(p.l) * alpha;  // local reads inside the host rack

        std::vector<sim_detail::NodeRow> rows =
            sim_detail::repair_rows(*code_, plan, contribs, local_rows);
        for (size_t i = 0; i < plan.failed.size(); ++i) {
            store_[host * u + plan.failed[i]] = rows[i];
            alive_[host * u + plan.failed[i]] = true;
        }
        rep.cross_rack_symbols += ev.cross_symbols;
        rep.intra_rack_symbols += ev.intra_symbols;
        rep.events.push_back(std::move(ev));
    }

    void naive_repair(RepairReport& rep) {
        const auto& p = code_->params();
        const uint32_t u = p.u;
        const uint32_t alpha = code_->derived().alpha;
        uint32_t site = 0;
        for (uint32_t e = 0; e < code_->derived().nbar; ++e) {
            bool any = false;
            for (uint32_t g = 0; g < u; ++g) any |= alive_[e * u + g];
            if (any) {
                site = e;
                break;
            }
        }
        std::map<uint32_t, sim_detail::NodeRow> read;
        for (uint32_t lbl = 0; lbl < p.n && read.size() < p.k; ++lbl)
            if (alive_[lbl]) read.emplace(lbl, store_[lbl]);

        RackRepairEvent ev;
        ev.host = site;
        for (const auto& [lbl, row] : read) {
            if (lbl / u == site)
                ev.intra_symbols += alpha;
            else
                ev.cross_symbols += alpha;
        }
        std::vector<sim_detail::NodeRow> rows = sim_detail::reconstruct_rows(*code_, read);
        for (uint32_t lbl = 0; lbl < p.n; ++lbl)
            if (!alive_[lbl]) {
                store_[lbl] = rows[lbl];
                alive_[lbl] = true;
                ++ev.h;
            }
        rep.naive_site = site;
        rep.cross_rack_symbols += ev.cross_symbols;
        rep.intra_rack_symbols += ev.intra_symbols;
        rep.events.push_back(std::move(ev));
    }

    const Code* code_;
    std::vector<sim_detail::NodeRow> store_;
    std::vector<sim_detail::NodeRow> golden_;
    std::vector<bool> alive_;
};

}  // namespace metrrc
