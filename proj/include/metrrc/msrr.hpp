/**************************************************************************
 * msrr.hpp
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
#include <span>
#include <vector>

#include "gf.hpp"
#include "linalg.hpp"
#include "locators.hpp"
#include "params.hpp"

namespace metrrc {

/// Everything needed to repair h nodes of one rack: the rank-h transform
/// A* whose product with the rack's power matrix is the identity on the
/// failed columns and zero on the surviving non-helper columns, plus the
/// Lagrange coefficients that read the host coordinate of a rack-level
/// codeword from the dbar helper-rack coordinates.
struct MsrrRepairPlan {
    uint32_t host = 0;
    std::vector<uint32_t> failed;
    std::vector<uint32_t> locals;
    std::vector<uint32_t> zeros;
    std::vector<uint32_t> helper_racks;
    FMatrix astar;            // h x (u-l)
    FMatrix combined;         // astar * Lambda_host : h x u
    std::vector<Fel> interp;  // aligned with helper_racks

    uint32_t h() const { return uint32_t(failed.size()); }
};

/// Scalar minimum-storage code: a B-dimensional subcode of an
/// [n, kbar*u + u0_tilde] GRS code, cut out by the parity exponent set T.
/// One field symbol per node; any h <= u-l failures in one rack are repaired
/// from l in-rack survivors plus h symbols from each of dbar helper racks.
class MsrrCode {
public:
    MsrrCode(const CodeParams& p, const Field& f) : grid_(p, CodeMode::MSRR, f) {
        const auto& d = grid_.derived();
        const uint32_t n = p.n, u = p.u, l = p.l;
        supercode_dim_ = d.kbar * u + d.u0_tilde;

        // T = [0, n - supercode_dim) U  T_i,  T_i = {i + j*u : j in [nbar-kbar, nbar-dbar)}
        for (uint32_t t = 0; t + supercode_dim_ < n; ++t) T_.push_back(t);
        for (uint32_t i = 0; i < u - l; ++i)
            for (uint32_t j = d.nbar - d.kbar; j + p.dbar < d.nbar; ++j)
                T_.push_back(i + j * u);
        std::sort(T_.begin(), T_.end());
        if (T_.size() != n - d.file_size)
            throw ParamError("internal: |T| != n - B");

        std::vector<int64_t> exps(T_.begin(), T_.end());
        H_ = vandermonde(field(), grid_.node_locators(), exps);

        // information set X = X1 U X2 U X3 in data order
        for (uint32_t e = 0; e < p.dbar; ++e)
            for (uint32_t g = 0; g < u; ++g) X_.push_back(grid_.flat(e, g));
        for (uint32_t e = p.dbar; e < d.kbar; ++e)
            for (uint32_t g = 0; g < l; ++g) X_.push_back(grid_.flat(e, g));
        for (uint32_t g = 0; g < d.u0_tilde; ++g) X_.push_back(grid_.flat(d.kbar, g));

        build_encode_tables();
    }

    MsrrCode(const MsrrCode&) = delete;
    MsrrCode& operator=(const MsrrCode&) = delete;

    const Field& field() const { return grid_.field(); }
    const CodeParams& params() const { return grid_.params(); }
    const DerivedParams& derived() const { return grid_.derived(); }
    const LocatorGrid& grid() const { return grid_; }
    Fel xi() const { return grid_.xi(); }
    Fel eta() const { return grid_.eta(); }
    uint32_t length() const { return params().n; }
    uint64_t dimension() const { return derived().file_size; }
    uint32_t reconstruct_threshold() const { return supercode_dim_; }

    std::span<const uint32_t> parity_exponents() const { return T_; }
    const FMatrix& parity_matrix() const { return H_; }
    std::span<const uint32_t> information_set() const { return X_; }

    bool is_codeword(std::span<const Fel> c) const {
        for (const Fel s : H_.mul_vec(c))
            if (!s.is_zero()) return false;
        return true;
    }

    /// Rack-level word w^(i): w_e = sum_g locator(e,g)^i * c_(e,g). Falls in
    /// the [nbar, dbar] rack-level MDS code for every i in [0, u-l).
    std::vector<Fel> rack_level(std::span<const Fel> c, uint32_t i) const {
        const auto& p = params();
        if (i >= p.u - p.l) throw ParamError("rack-level index i out of [0, u-l)");
        const Field& f = field();
        std::vector<Fel> w(derived().nbar, Fel(0));
        for (uint32_t e = 0; e < derived().nbar; ++e) {
            Fel acc(0);
            for (uint32_t g = 0; g < p.u; ++g)
                acc = f.add(acc, f.mul(f.pow(grid_.node_locator(e, g), i), c[grid_.flat(e, g)]));
            w[e] = acc;
        }
        return w;
    }

    /// Extends a rack-level word given at racks [0, dbar) to all nbar racks
    /// via the [nbar, dbar] MDS structure.
    std::vector<Fel> extend_rack_word(std::span<const Fel> first) const {
        const auto& d = derived();
        if (first.size() != params().dbar) throw ParamError("need exactly dbar known racks");
        std::vector<Fel> w(first.begin(), first.end());
        w.resize(d.nbar, Fel(0));
        if (params().dbar == 0) return w;  // the zero code
        for (uint32_t e = params().dbar; e < d.nbar; ++e) {
            Fel acc(0);
            for (uint32_t j = 0; j < params().dbar; ++j)
                acc = field().add(acc, field().mul(ext_m_.at(e - params().dbar, j), first[j]));
            w[e] = acc;
        }
        return w;
    }

    /// Systematic encoding: places the B data symbols on the information set
    /// X, derives the rack-level words, completes racks [dbar, kbar) through
    /// the per-rack power system, and finishes with the supercode parities.
    std::vector<Fel> encode_systematic(std::span<const Fel> data) const {
        const auto& p = params();
        const auto& d = derived();
        if (data.size() != d.file_size) throw ParamError("data length != B");
        const Field& f = field();
        std::vector<Fel> c(p.n, Fel(0));
        for (size_t idx = 0; idx < X_.size(); ++idx) c[X_[idx]] = data[idx];

        const uint32_t ul = p.u - p.l;
        std::vector<std::vector<Fel>> w(ul);
        for (uint32_t i = 0; i < ul; ++i) {
            std::vector<Fel> head(p.dbar, Fel(0));
            for (uint32_t e = 0; e < p.dbar; ++e) {
                Fel acc(0);
                for (uint32_t g = 0; g < p.u; ++g)
                    acc = f.add(acc,
                                f.mul(f.pow(grid_.node_locator(e, g), i), c[grid_.flat(e, g)]));
                head[e] = acc;
            }
            w[i] = extend_rack_word(head);
        }
        for (uint32_t e = p.dbar; e < d.kbar; ++e) {
            std::vector<Fel> rhs(ul, Fel(0));
            for (uint32_t i = 0; i < ul; ++i) {
                Fel acc = w[i][e];
                for (uint32_t g = 0; g < p.l; ++g)
                    acc = f.sub(acc,
                                f.mul(f.pow(grid_.node_locator(e, g), i), c[grid_.flat(e, g)]));
                rhs[i] = acc;
            }
            const FMatrix& tinv = tail_inv_[e - p.dbar];
            for (uint32_t g = 0; g < ul; ++g) {
                Fel acc(0);
                for (uint32_t i = 0; i < ul; ++i) acc = f.add(acc, f.mul(tinv.at(g, i), rhs[i]));
                c[grid_.flat(e, p.l + g)] = acc;
            }
        }
        complete_from_prefix(c);
        return c;
    }

    /// Reads the data symbols back from the information set.
    std::vector<Fel> data_readback(std::span<const Fel> c) const {
        std::vector<Fel> out(X_.size());
        for (size_t i = 0; i < X_.size(); ++i) out[i] = c[X_[i]];
        return out;
    }

    /// Canonical generator-matrix encoding (the nullspace basis of H); data
    /// appears verbatim on the RREF free columns of H.
    std::vector<Fel> encode_plain(std::span<const Fel> data) const {
        if (data.size() != dimension()) throw ParamError("data length != B");
        return nullspace_.mul_vec(data);
    }

    std::vector<Fel> plain_readback(std::span<const Fel> c) const {
        std::vector<Fel> out(free_cols_.size());
        for (size_t i = 0; i < free_cols_.size(); ++i) out[i] = c[free_cols_[i]];
        return out;
    }

    FMatrix generator_matrix() const { return nullspace_.transpose(); }

    /// Solves the full codeword from at least kbar*u + u0_tilde coordinates
    /// (the lexicographically first ones are used; extras are cross-checked).
    std::vector<Fel> reconstruct(const std::map<uint32_t, Fel>& coords) const {
        std::vector<uint32_t> labels;
        labels.reserve(coords.size());
        std::vector<Fel> vals;
        vals.reserve(coords.size());
        for (const auto& [lbl, v] : coords) {
            labels.push_back(lbl);
            vals.push_back(v);
        }
        Decoder dec(*this, labels);
        return dec.apply(vals);
    }

    /// Precomputed solver for a fixed available-coordinate set; stripes of a
    /// file share it.
    class Decoder {
    public:
        Decoder(const MsrrCode& code, std::vector<uint32_t> labels)
            : code_(&code), labels_(std::move(labels)) {
            std::sort(labels_.begin(), labels_.end());
            labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
            const uint32_t n = code.params().n;
            const uint32_t need = code.supercode_dim_;
            if (!labels_.empty() && labels_.back() >= n)
                throw ParamError("coordinate label out of range");
            if (labels_.size() < need)
                throw InsufficientDataError(
                    "reconstruction needs at least " + std::to_string(need) +
                    " coordinates, got " + std::to_string(labels_.size()));
            used_.assign(labels_.begin(), labels_.begin() + need);
            std::vector<bool> in_used(n, false);
            for (uint32_t lbl : used_) in_used[lbl] = true;
            for (uint32_t j = 0; j < n; ++j)
                if (!in_used[j]) unknown_.push_back(j);

            const Field& f = code.field();
            const size_t m = unknown_.size();
            std::vector<int64_t> exps(m);
            for (size_t t = 0; t < m; ++t) exps[t] = int64_t(t);
            std::vector<Fel> uloc(m), rloc(need);
            for (size_t j = 0; j < m; ++j) uloc[j] = code.grid_.node_locators()[unknown_[j]];
            for (size_t j = 0; j < need; ++j) rloc[j] = code.grid_.node_locators()[used_[j]];
            FMatrix au = vandermonde(f, uloc, exps);
            FMatrix ar = vandermonde(f, rloc, exps);
            FMatrix auinv = inverse(au);
            solve_m_ = FMatrix(f, m, need);
            FMatrix prod = auinv.mul(ar);
            for (size_t i = 0; i < m; ++i)
                for (size_t j = 0; j < need; ++j) solve_m_.at(i, j) = f.neg(prod.at(i, j));
        }

        /// `values` aligned with the sorted unique label list.
        std::vector<Fel> apply(std::span<const Fel> values) const {
            if (values.size() != labels_.size())
                throw ParamError("value count does not match label count");
            const MsrrCode& code = *code_;
            std::vector<Fel> c(code.params().n, Fel(0));
            for (size_t j = 0; j < used_.size(); ++j) c[used_[j]] = values[j];
            std::vector<Fel> rvals(values.begin(), values.begin() + used_.size());
            std::vector<Fel> uvals = solve_m_.mul_vec(rvals);
            for (size_t j = 0; j < unknown_.size(); ++j) c[unknown_[j]] = uvals[j];
            for (size_t j = used_.size(); j < labels_.size(); ++j)
                if (!(c[labels_[j]] == values[j]))
                    throw InconsistentDataError("supplied coordinate " +
                                                std::to_string(labels_[j]) +
                                                " disagrees with the solved codeword");
            if (!code.is_codeword(c))
                throw InconsistentDataError("solved word violates the parity-check equations");
            return c;
        }

        std::span<const uint32_t> labels() const { return labels_; }

    private:
        const MsrrCode* code_;
        std::vector<uint32_t> labels_, used_, unknown_;
        FMatrix solve_m_;
    };

    MsrrRepairPlan repair_plan(uint32_t host, std::vector<uint32_t> failed,
                               std::vector<uint32_t> locals,
                               std::vector<uint32_t> helper_racks) const {
        const auto& p = params();
        const auto& d = derived();
        MsrrRepairPlan plan;
        plan.host = host;
        plan.failed = sorted_unique(std::move(failed), "failed");
        plan.locals = sorted_unique(std::move(locals), "local helpers");
        plan.helper_racks = sorted_unique(std::move(helper_racks), "helper racks");
        if (host >= d.nbar) throw ParamError("host rack out of range");
        const uint32_t h = uint32_t(plan.failed.size());
        if (h == 0 || h > p.u - p.l)
            throw ParamError("failed set size must be in [1, u-l]");
        check_subset(plan.failed, p.u, "failed node");
        check_subset(plan.locals, p.u, "local helper");
        if (plan.locals.size() != p.l) throw ParamError("need exactly l local helpers");
        for (uint32_t g : plan.locals)
            if (std::binary_search(plan.failed.begin(), plan.failed.end(), g))
                throw ParamError("local helper overlaps the failed set");
        if (plan.helper_racks.size() != p.dbar) throw ParamError("need exactly dbar helper racks");
        check_subset(plan.helper_racks, d.nbar, "helper rack");
        for (uint32_t e : plan.helper_racks)
            if (e == host) throw ParamError("helper racks must differ from the host rack");

        for (uint32_t g = 0; g < p.u; ++g)
            if (!std::binary_search(plan.failed.begin(), plan.failed.end(), g) &&
                !std::binary_search(plan.locals.begin(), plan.locals.end(), g))
                plan.zeros.push_back(g);

        FMatrix lam = host_power_matrix(host);
        plan.astar = partial_identity_transform(lam, plan.failed, plan.zeros);
        plan.combined = plan.astar.mul(lam);
        plan.interp = grid_.rack_interp_coeffs(plan.helper_racks, host);
        return plan;
    }

    /// The h symbols rack `rack` ships for this plan: the A*-transformed
    /// rack-level values, computed from the rack's u stored symbols.
    std::vector<Fel> helper_contribution(const MsrrRepairPlan& plan, uint32_t rack,
                                         std::span<const Fel> rack_symbols) const {
        const auto& p = params();
        if (!std::binary_search(plan.helper_racks.begin(), plan.helper_racks.end(), rack))
            throw ParamError("rack is not part of the repair plan");
        if (rack_symbols.size() != p.u) throw ParamError("need the rack's u symbols");
        const Field& f = field();
        const uint32_t ul = p.u - p.l;
        std::vector<Fel> w(ul, Fel(0));
        for (uint32_t i = 0; i < ul; ++i) {
            Fel acc(0);
            for (uint32_t g = 0; g < p.u; ++g)
                acc = f.add(acc, f.mul(f.pow(grid_.node_locator(rack, g), i), rack_symbols[g]));
            w[i] = acc;
        }
        std::vector<Fel> v(plan.h(), Fel(0));
        for (uint32_t i = 0; i < plan.h(); ++i) {
            Fel acc(0);
            for (uint32_t j = 0; j < ul; ++j) acc = f.add(acc, f.mul(plan.astar.at(i, j), w[j]));
            v[i] = acc;
        }
        return v;
    }

    /// Recovers the failed symbols (aligned with plan.failed) from the dbar
    /// helper contributions and the l local symbols (aligned with
    /// plan.locals).
    std::vector<Fel> repair(const MsrrRepairPlan& plan,
                            const std::map<uint32_t, std::vector<Fel>>& contributions,
                            std::span<const Fel> local_symbols) const {
        const Field& f = field();
        if (local_symbols.size() != plan.locals.size())
            throw ParamError("local symbol count must equal l");
        if (contributions.size() != plan.helper_racks.size())
            throw ParamError("need a contribution from every helper rack");
        for (uint32_t e : plan.helper_racks) {
            auto it = contributions.find(e);
            if (it == contributions.end())
                throw ParamError("missing contribution from helper rack " + std::to_string(e));
            if (it->second.size() != plan.h())
                throw ParamError("helper contribution has wrong size");
        }
        std::vector<Fel> out(plan.h(), Fel(0));
        for (uint32_t i = 0; i < plan.h(); ++i) {
            Fel v(0);
            for (size_t j = 0; j < plan.helper_racks.size(); ++j)
                v = f.add(v, f.mul(plan.interp[j],
                                   contributions.at(plan.helper_racks[j])[i]));
            for (size_t t = 0; t < plan.locals.size(); ++t)
                v = f.sub(v, f.mul(plan.combined.at(i, plan.locals[t]), local_symbols[t]));
            out[i] = v;
        }
        return out;
    }

    /// Exhaustive minimum-distance oracle over all q^B codewords (test use).
    uint64_t dmin_bruteforce(uint64_t cap = 10'000'000) const {
        return min_hamming_weight(generator_matrix(), cap);
    }

private:
    static std::vector<uint32_t> sorted_unique(std::vector<uint32_t> v, const char* what) {
        std::sort(v.begin(), v.end());
        if (std::adjacent_find(v.begin(), v.end()) != v.end())
            throw ParamError(std::string("duplicate entries in ") + what + " set");
        return v;
    }

    static void check_subset(const std::vector<uint32_t>& v, uint32_t bound, const char* what) {
        for (uint32_t x : v)
            if (x >= bound)
                throw ParamError(std::string(what) + " index " + std::to_string(x) +
                                 " out of range");
    }

    /// (u-l) x u matrix of rack `e` locator powers 0..u-l-1.
    FMatrix host_power_matrix(uint32_t e) const {
        const auto& p = params();
        std::vector<Fel> loc(p.u);
        for (uint32_t g = 0; g < p.u; ++g) loc[g] = grid_.node_locator(e, g);
        std::vector<int64_t> exps(p.u - p.l);
        for (uint32_t i = 0; i < p.u - p.l; ++i) exps[i] = i;
        return vandermonde(field(), loc, exps);
    }

    void build_encode_tables() {
        const auto& p = params();
        const auto& d = derived();
        const Field& f = field();

        if (p.dbar > 0) {
            ext_m_ = FMatrix(f, d.nbar - p.dbar, p.dbar);
            std::vector<uint32_t> sources(p.dbar);
            for (uint32_t j = 0; j < p.dbar; ++j) sources[j] = j;
            for (uint32_t e = p.dbar; e < d.nbar; ++e) {
                std::vector<Fel> coef = grid_.rack_interp_coeffs(sources, e);
                for (uint32_t j = 0; j < p.dbar; ++j) ext_m_.at(e - p.dbar, j) = coef[j];
            }
        }

        for (uint32_t e = p.dbar; e < d.kbar; ++e) {
            FMatrix lam = host_power_matrix(e);
            std::vector<uint32_t> tail_cols;
            for (uint32_t g = p.l; g < p.u; ++g) tail_cols.push_back(g);
            tail_inv_.push_back(inverse(lam.take_cols(tail_cols)));
        }

        // completion of coordinates [supercode_dim, n) from the prefix via
        // the supercode parities t in [0, n - supercode_dim)
        const uint32_t m = p.n - supercode_dim_;
        if (m > 0) {
            std::vector<int64_t> exps(m);
            for (uint32_t t = 0; t < m; ++t) exps[t] = t;
            std::vector<Fel> uloc, rloc;
            for (uint32_t j = supercode_dim_; j < p.n; ++j)
                uloc.push_back(grid_.node_locators()[j]);
            for (uint32_t j = 0; j < supercode_dim_; ++j)
                rloc.push_back(grid_.node_locators()[j]);
            FMatrix prod = inverse(vandermonde(f, uloc, exps)).mul(vandermonde(f, rloc, exps));
            comp_m_ = FMatrix(f, m, supercode_dim_);
            for (uint32_t i = 0; i < m; ++i)
                for (uint32_t j = 0; j < supercode_dim_; ++j)
                    comp_m_.at(i, j) = f.neg(prod.at(i, j));
        }

        FMatrix h = H_;
        auto piv = rref_in_place(h);
        std::vector<bool> is_piv(p.n, false);
        for (size_t c : piv) is_piv[c] = true;
        for (uint32_t j = 0; j < p.n; ++j)
            if (!is_piv[j]) free_cols_.push_back(j);
        nullspace_ = nullspace(H_);
    }

    void complete_from_prefix(std::vector<Fel>& c) const {
        const uint32_t m = params().n - supercode_dim_;
        if (m == 0) return;
        std::vector<Fel> prefix(c.begin(), c.begin() + supercode_dim_);
        std::vector<Fel> tail = comp_m_.mul_vec(prefix);
        for (uint32_t j = 0; j < m; ++j) c[supercode_dim_ + j] = tail[j];
    }

    LocatorGrid grid_;
    uint32_t supercode_dim_ = 0;
    std::vector<uint32_t> T_;
    FMatrix H_;
    std::vector<uint32_t> X_;
    FMatrix ext_m_;
    std::vector<FMatrix> tail_inv_;
    FMatrix comp_m_;
    FMatrix nullspace_;
    std::vector<uint32_t> free_cols_;
};

}  // namespace metrrc
