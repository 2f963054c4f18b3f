/**************************************************************************
 * mbrr.hpp
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

struct MbrrRepairPlan {
    uint32_t host = 0;
    std::vector<uint32_t> failed;
    std::vector<uint32_t> locals;
    std::vector<uint32_t> zeros;
    std::vector<uint32_t> helper_racks;
    FMatrix astar;            // h x (u-l)
    FMatrix combined;         // astar * Delta_host : h x u
    FMatrix gamma_solve;      // inverse of the helper rows of Gamma : dbar x dbar
    std::vector<Fel> gamma_host;

    uint32_t h() const { return uint32_t(failed.size()); }
};

/// Minimum-bandwidth array code: each node stores a dbar-vector, a codeword
/// is C = Lambda * M for a message matrix M whose rows split into a free
/// block and u-l symmetric blocks S_i. The rack-level words collapse to
/// Gamma * S_i, an (nbar, dbar, dbar) MBR code, which carries the repair.
class MbrrCode {
public:
    MbrrCode(const CodeParams& p, const Field& f) : grid_(p, CodeMode::MBRR, f) {
        const auto& d = grid_.derived();
        khat_ = d.kbar * p.u + d.u0_tilde;
        u_inv_ = f.inv(f.from_int(p.u));

        lambda_ = FMatrix(f, p.n, khat_);
        for (uint32_t node = 0; node < p.n; ++node)
            for (uint32_t j = 0; j < khat_; ++j)
                lambda_.at(node, j) = f.pow(grid_.node_locators()[node], j);

        gamma_ = FMatrix(f, d.nbar, p.dbar);
        for (uint32_t e = 0; e < d.nbar; ++e)
            for (uint32_t j = 0; j < p.dbar; ++j)
                gamma_.at(e, j) = f.pow(grid_.rack_locator(e), j);

        delta_.reserve(d.nbar);
        for (uint32_t e = 0; e < d.nbar; ++e) delta_.push_back(make_delta(e));

        // message-row classification: block 0 is the free block, block i in
        // [1, u-l] holds S_i at rows {delta*u + (i+l-1)}
        row_block_.assign(khat_, 0);
        row_pos_.assign(khat_, 0);
        for (uint32_t r = 0; r < khat_; ++r) {
            const uint32_t b = r % p.u;
            if (r < d.kbar * p.u && b >= p.l) {
                row_block_[r] = b - p.l + 1;
                row_pos_[r] = r / p.u;
            }
        }

        // information set, in data order
        for (uint32_t e = 0; e < d.kbar; ++e)
            for (uint32_t g = 0; g < p.l; ++g)
                for (uint32_t a = 0; a < p.dbar; ++a) X_.push_back(coord(e, g, a));
        for (uint32_t e = 0; e < p.dbar; ++e)
            for (uint32_t g = p.l; g < p.u; ++g)
                for (uint32_t a = e; a < p.dbar; ++a) X_.push_back(coord(e, g, a));
        for (uint32_t g = 0; g < d.u0_tilde; ++g)
            for (uint32_t a = 0; a < p.dbar; ++a) X_.push_back(coord(d.kbar, g, a));
        if (X_.size() != d.file_size) throw ParamError("internal: |X| != B");

        build_solvers();
    }

    MbrrCode(const MbrrCode&) = delete;
    MbrrCode& operator=(const MbrrCode&) = delete;

    const Field& field() const { return grid_.field(); }
    const CodeParams& params() const { return grid_.params(); }
    const DerivedParams& derived() const { return grid_.derived(); }
    const LocatorGrid& grid() const { return grid_; }
    uint32_t reconstruct_threshold() const { return khat_; }
    const FMatrix& lambda() const { return lambda_; }
    const FMatrix& gamma() const { return gamma_; }
    const FMatrix& delta(uint32_t e) const { return delta_[e]; }
    std::span<const uint32_t> information_set() const { return X_; }

    /// Coordinate label of [(e, g), a].
    uint32_t coord(uint32_t e, uint32_t g, uint32_t a) const {
        return grid_.flat(e, g) * params().dbar + a;
    }

    /// Row label within a symmetric block: S_i entry (pos, *) lives at
    /// message row pos*u + (i + l - 1).
    uint32_t block_row(uint32_t i, uint32_t pos) const {
        return pos * params().u + (i + params().l - 1);
    }

    /// Deterministic data placement: the message matrix is walked row-major;
    /// free-block entries and upper-triangle (incl. diagonal) entries of each
    /// S_i consume the next data symbol, lower-triangle entries mirror, and
    /// the trailing kbar-dbar rows of each block are zero.
    FMatrix fill_message(std::span<const Fel> data) const {
        const auto& p = params();
        if (data.size() != derived().file_size) throw ParamError("data length != B");
        FMatrix m(field(), khat_, p.dbar);
        size_t next = 0;
        for (uint32_t r = 0; r < khat_; ++r)
            for (uint32_t a = 0; a < p.dbar; ++a) {
                const uint32_t blk = row_block_[r];
                if (blk == 0) {
                    m.at(r, a) = data[next++];
                } else {
                    const uint32_t pos = row_pos_[r];
                    if (pos >= p.dbar)
                        m.at(r, a) = Fel(0);
                    else if (pos <= a)
                        m.at(r, a) = data[next++];
                    else
                        m.at(r, a) = m.at(block_row(blk, a), pos);
                }
            }
        return m;
    }

    std::vector<Fel> read_message(const FMatrix& m) const {
        const auto& p = params();
        std::vector<Fel> data;
        data.reserve(derived().file_size);
        for (uint32_t r = 0; r < khat_; ++r)
            for (uint32_t a = 0; a < p.dbar; ++a) {
                const uint32_t blk = row_block_[r];
                if (blk == 0 || (row_pos_[r] < p.dbar && row_pos_[r] <= a))
                    data.push_back(m.at(r, a));
            }
        return data;
    }

    /// Checks the structural invariants of a message matrix: zero tail rows
    /// in every block and symmetric S_i.
    void validate_message(const FMatrix& m) const {
        const auto& p = params();
        const auto& d = derived();
        if (m.rows() != khat_ || m.cols() != p.dbar)
            throw ParamError("message matrix has wrong shape");
        for (uint32_t i = 1; i <= p.u - p.l; ++i) {
            for (uint32_t pos = p.dbar; pos < d.kbar; ++pos)
                for (uint32_t a = 0; a < p.dbar; ++a)
                    if (!m.at(block_row(i, pos), a).is_zero())
                        throw InconsistentDataError("message block has a nonzero tail row");
            for (uint32_t pos = 0; pos < p.dbar && pos < d.kbar; ++pos)
                for (uint32_t a = 0; a < pos; ++a)
                    if (!(m.at(block_row(i, pos), a) == m.at(block_row(i, a), pos)))
                        throw InconsistentDataError("message block is not symmetric");
        }
    }

    /// S_{i+1} extracted from a message matrix, for i in [0, u-l).
    FMatrix symmetric_block(const FMatrix& m, uint32_t i) const {
        const auto& p = params();
        FMatrix s(field(), p.dbar, p.dbar);
        for (uint32_t r = 0; r < p.dbar; ++r)
            for (uint32_t a = 0; a < p.dbar; ++a) s.at(r, a) = m.at(block_row(i + 1, r), a);
        return s;
    }

    FMatrix encode(const FMatrix& m) const {
        if (m.rows() != khat_ || m.cols() != params().dbar)
            throw ParamError("message matrix has wrong shape");
        return lambda_.mul(m);
    }

    bool is_codeword(const FMatrix& c) const {
        if (c.rows() != params().n || c.cols() != params().dbar) return false;
        try {
            FMatrix m = top_solve(c);
            validate_message(m);
            return encode(m) == c;
        } catch (const InconsistentDataError&) {
            return false;
        }
    }

    /// Rack-level word w^(i): row e is
    /// u^-1 xi^(-e(l+i)) sum_g eta^(-(l+i)g) c_(e,g), which equals row e of
    /// Gamma * S_{i+1}.
    FMatrix rack_level(const FMatrix& c, uint32_t i) const {
        const auto& p = params();
        if (i >= p.u - p.l) throw ParamError("rack-level index i out of [0, u-l)");
        const Field& f = field();
        FMatrix w(f, derived().nbar, p.dbar);
        for (uint32_t e = 0; e < derived().nbar; ++e)
            for (uint32_t a = 0; a < p.dbar; ++a) {
                Fel acc(0);
                for (uint32_t g = 0; g < p.u; ++g)
                    acc = f.add(acc, f.mul(delta_[e].at(i, g), c.at(grid_.flat(e, g), a)));
                w.at(e, a) = acc;
            }
        return w;
    }

    /// Recovers a symmetric dbar x dbar matrix S from the upper triangle
    /// (incl. diagonal) of the first dbar rows of Gamma * S, column by column
    /// from right to left; each recovered column fills its mirror row, so the
    /// next column needs one equation fewer. Entries of `known` below the
    /// diagonal are ignored.
    FMatrix recover_symmetric_block(const FMatrix& known) const {
        const auto& p = params();
        const Field& f = field();
        if (known.rows() != p.dbar || known.cols() != p.dbar)
            throw ParamError("known block has wrong shape");
        FMatrix s(f, p.dbar, p.dbar);
        for (int32_t t = int32_t(p.dbar) - 1; t >= 0; --t) {
            std::vector<Fel> rhs(t + 1, Fel(0));
            for (int32_t e = 0; e <= t; ++e) {
                Fel acc = known.at(e, t);
                for (uint32_t j = t + 1; j < p.dbar; ++j)
                    acc = f.sub(acc, f.mul(gamma_.at(e, j), s.at(j, t)));
                rhs[e] = acc;
            }
            const FMatrix& tinv = tri_inv_[t];
            for (int32_t e = 0; e <= t; ++e) {
                Fel acc(0);
                for (int32_t j = 0; j <= t; ++j) acc = f.add(acc, f.mul(tinv.at(e, j), rhs[j]));
                s.at(e, t) = acc;
                s.at(t, e) = acc;
            }
        }
        return s;
    }

    /// Systematic encoding: data sits on the information set; each S_{i+1} is
    /// recovered from the triangular system column by column from the right
    /// using its symmetry, rack-level words follow as Gamma * S, the shadowed
    /// coordinates are solved through the Delta systems, and the tail racks
    /// come from reconstruction.
    FMatrix encode_systematic(std::span<const Fel> data) const {
        const auto& p = params();
        const auto& d = derived();
        if (data.size() != d.file_size) throw ParamError("data length != B");
        const Field& f = field();
        FMatrix c(f, p.n, p.dbar);
        for (size_t idx = 0; idx < X_.size(); ++idx)
            c.at(X_[idx] / p.dbar, X_[idx] % p.dbar) = data[idx];

        const uint32_t ul = p.u - p.l;
        std::vector<FMatrix> w(ul);  // per i: nbar x dbar rack-level words
        for (uint32_t i = 0; i < ul; ++i) {
            // known w entries: (e, a) with e <= a < dbar
            FMatrix known(f, p.dbar, p.dbar);
            for (uint32_t e = 0; e < p.dbar; ++e)
                for (uint32_t a = e; a < p.dbar; ++a) {
                    Fel acc(0);
                    for (uint32_t g = 0; g < p.u; ++g)
                        acc = f.add(acc, f.mul(delta_[e].at(i, g), c.at(grid_.flat(e, g), a)));
                    known.at(e, a) = acc;
                }
            w[i] = gamma_.mul(recover_symmetric_block(known));
        }

        // shadowed coordinates of racks [0, kbar)
        for (uint32_t e = 0; e < d.kbar; ++e)
            for (uint32_t a = 0; a < p.dbar; ++a) {
                if (e < p.dbar && a >= e) continue;  // information positions
                std::vector<Fel> rhs(ul, Fel(0));
                for (uint32_t i = 0; i < ul; ++i) {
                    Fel acc = w[i].at(e, a);
                    for (uint32_t g = 0; g < p.l; ++g)
                        acc = f.sub(acc, f.mul(delta_[e].at(i, g), c.at(grid_.flat(e, g), a)));
                    rhs[i] = acc;
                }
                const FMatrix& tinv = delta_tail_inv_[e];
                for (uint32_t j = 0; j < ul; ++j) {
                    Fel acc(0);
                    for (uint32_t i = 0; i < ul; ++i) acc = f.add(acc, f.mul(tinv.at(j, i), rhs[i]));
                    c.at(grid_.flat(e, p.l + j), a) = acc;
                }
            }

        // first khat node rows are complete; finish by reconstruction
        FMatrix m = top_solve(c);
        return encode(m);
    }

    std::vector<Fel> data_readback(const FMatrix& c) const {
        const auto& p = params();
        std::vector<Fel> out(X_.size());
        for (size_t i = 0; i < X_.size(); ++i) out[i] = c.at(X_[i] / p.dbar, X_[i] % p.dbar);
        return out;
    }

    FMatrix reconstruct(const std::map<uint32_t, std::vector<Fel>>& rows) const {
        std::vector<uint32_t> labels;
        std::vector<std::vector<Fel>> vals;
        labels.reserve(rows.size());
        for (const auto& [lbl, v] : rows) {
            labels.push_back(lbl);
            vals.push_back(v);
        }
        Decoder dec(*this, labels);
        return dec.apply(vals);
    }

    class Decoder {
    public:
        Decoder(const MbrrCode& code, std::vector<uint32_t> labels)
            : code_(&code), labels_(std::move(labels)) {
            std::sort(labels_.begin(), labels_.end());
            labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
            if (!labels_.empty() && labels_.back() >= code.params().n)
                throw ParamError("node label out of range");
            if (labels_.size() < code.khat_)
                throw InsufficientDataError(
                    "reconstruction needs at least " + std::to_string(code.khat_) +
                    " node rows, got " + std::to_string(labels_.size()));
            used_.assign(labels_.begin(), labels_.begin() + code.khat_);
            solve_ = inverse(code.lambda_.take_rows(used_));
        }

        /// `rows` aligned with the sorted unique label list; each a
        /// dbar-vector.
        FMatrix apply(std::span<const std::vector<Fel>> rows) const {
            const MbrrCode& code = *code_;
            const auto& p = code.params();
            if (rows.size() != labels_.size())
                throw ParamError("row count does not match label count");
            FMatrix cr(code.field(), code.khat_, p.dbar);
            for (uint32_t i = 0; i < code.khat_; ++i) {
                if (rows[i].size() != p.dbar) throw ParamError("node row has wrong length");
                for (uint32_t a = 0; a < p.dbar; ++a) cr.at(i, a) = rows[i][a];
            }
            FMatrix m = solve_.mul(cr);
            code.validate_message(m);
            for (size_t i = code.khat_; i < labels_.size(); ++i) {
                if (rows[i].size() != p.dbar) throw ParamError("node row has wrong length");
                for (uint32_t a = 0; a < p.dbar; ++a) {
                    Fel acc(0);
                    for (uint32_t j = 0; j < code.khat_; ++j)
                        acc = code.field().add(acc,
                                               code.field().mul(code.lambda_.at(labels_[i], j),
                                                                m.at(j, a)));
                    if (!(acc == rows[i][a]))
                        throw InconsistentDataError("supplied node row " +
                                                    std::to_string(labels_[i]) +
                                                    " disagrees with the solved message");
                }
            }
            return m;
        }

        std::span<const uint32_t> labels() const { return labels_; }

    private:
        const MbrrCode* code_;
        std::vector<uint32_t> labels_, used_;
        FMatrix solve_;
    };

    MbrrRepairPlan repair_plan(uint32_t host, std::vector<uint32_t> failed,
                               std::vector<uint32_t> locals,
                               std::vector<uint32_t> helper_racks) const {
        const auto& p = params();
        const auto& d = derived();
        MbrrRepairPlan plan;
        plan.host = host;
        plan.failed = sorted_unique(std::move(failed), "failed");
        plan.locals = sorted_unique(std::move(locals), "local helpers");
        plan.helper_racks = sorted_unique(std::move(helper_racks), "helper racks");
        if (host >= d.nbar) throw ParamError("host rack out of range");
        const uint32_t h = uint32_t(plan.failed.size());
        if (h == 0 || h > p.u - p.l) throw ParamError("failed set size must be in [1, u-l]");
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

        plan.astar = partial_identity_transform(delta_[host], plan.failed, plan.zeros);
        plan.combined = plan.astar.mul(delta_[host]);
        plan.gamma_solve = inverse(gamma_.take_rows(plan.helper_racks));
        plan.gamma_host = gamma_.row(host);
        return plan;
    }

    /// h scalars from helper rack `rack`: for each transformed index, the MBR
    /// repair symbol v_rack^(i) . Gamma_host.
    std::vector<Fel> helper_contribution(const MbrrRepairPlan& plan, uint32_t rack,
                                         std::span<const std::vector<Fel>> rack_rows) const {
        const auto& p = params();
        if (!std::binary_search(plan.helper_racks.begin(), plan.helper_racks.end(), rack))
            throw ParamError("rack is not part of the repair plan");
        if (rack_rows.size() != p.u) throw ParamError("need the rack's u node rows");
        const Field& f = field();
        const uint32_t ul = p.u - p.l;
        // W = Delta_rack * C_rack, then V = A* W, then V . Gamma_host per row
        std::vector<Fel> out(plan.h(), Fel(0));
        FMatrix w(f, ul, p.dbar);
        for (uint32_t i = 0; i < ul; ++i)
            for (uint32_t a = 0; a < p.dbar; ++a) {
                Fel acc(0);
                for (uint32_t g = 0; g < p.u; ++g)
                    acc = f.add(acc, f.mul(delta_[rack].at(i, g), rack_rows[g][a]));
                w.at(i, a) = acc;
            }
        for (uint32_t i = 0; i < plan.h(); ++i) {
            Fel acc(0);
            for (uint32_t a = 0; a < p.dbar; ++a) {
                Fel va(0);
                for (uint32_t j = 0; j < ul; ++j)
                    va = f.add(va, f.mul(plan.astar.at(i, j), w.at(j, a)));
                acc = f.add(acc, f.mul(va, plan.gamma_host[a]));
            }
            out[i] = acc;
        }
        return out;
    }

    /// Recovers the failed node rows (aligned with plan.failed). Solves the
    /// helper Gamma system for S~ Gamma_host^T, flips it by symmetry into the
    /// host rack-level values, and eliminates the local rows.
    std::vector<std::vector<Fel>> repair(const MbrrRepairPlan& plan,
                                         const std::map<uint32_t, std::vector<Fel>>& contributions,
                                         std::span<const std::vector<Fel>> local_rows) const {
        const auto& p = params();
        const Field& f = field();
        if (local_rows.size() != plan.locals.size())
            throw ParamError("local row count must equal l");
        if (contributions.size() != plan.helper_racks.size())
            throw ParamError("need a contribution from every helper rack");
        for (uint32_t e : plan.helper_racks) {
            auto it = contributions.find(e);
            if (it == contributions.end())
                throw ParamError("missing contribution from helper rack " + std::to_string(e));
            if (it->second.size() != plan.h())
                throw ParamError("helper contribution has wrong size");
        }
        std::vector<std::vector<Fel>> out(plan.h(), std::vector<Fel>(p.dbar, Fel(0)));
        for (uint32_t i = 0; i < plan.h(); ++i) {
            std::vector<Fel> t(p.dbar, Fel(0));
            for (uint32_t j = 0; j < p.dbar; ++j)
                t[j] = contributions.at(plan.helper_racks[j])[i];
            std::vector<Fel> v = plan.gamma_solve.mul_vec(t);  // = S~ Gamma_host^T = v_host^T
            for (uint32_t a = 0; a < p.dbar; ++a) {
                Fel acc = v[a];
                for (size_t g = 0; g < plan.locals.size(); ++g)
                    acc = f.sub(acc, f.mul(plan.combined.at(i, plan.locals[g]),
                                           local_rows[g][a]));
                out[i][a] = acc;
            }
        }
        return out;
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

    FMatrix make_delta(uint32_t e) const {
        const auto& p = params();
        const Field& f = field();
        FMatrix d(f, p.u - p.l, p.u);
        for (uint32_t i = 0; i < p.u - p.l; ++i)
            for (uint32_t g = 0; g < p.u; ++g)
                d.at(i, g) = f.mul(u_inv_,
                                   f.pow(grid_.node_locator(e, g), -int64_t(p.l) - int64_t(i)));
        return d;
    }

    /// M from the first khat node rows of C.
    FMatrix top_solve(const FMatrix& c) const {
        const auto& p = params();
        FMatrix top(field(), khat_, p.dbar);
        for (uint32_t r = 0; r < khat_; ++r)
            for (uint32_t a = 0; a < p.dbar; ++a) top.at(r, a) = c.at(r, a);
        return lambda_top_inv_.mul(top);
    }

    void build_solvers() {
        const auto& p = params();
        const Field& f = field();
        std::vector<uint32_t> top(khat_);
        for (uint32_t i = 0; i < khat_; ++i) top[i] = i;
        lambda_top_inv_ = inverse(lambda_.take_rows(top));
        for (uint32_t t = 0; t < p.dbar; ++t) {
            FMatrix g(f, t + 1, t + 1);
            for (uint32_t e = 0; e <= t; ++e)
                for (uint32_t j = 0; j <= t; ++j) g.at(e, j) = gamma_.at(e, j);
            tri_inv_.push_back(inverse(g));
        }
        std::vector<uint32_t> tail_cols;
        for (uint32_t g = p.l; g < p.u; ++g) tail_cols.push_back(g);
        for (uint32_t e = 0; e < derived().kbar; ++e)
            delta_tail_inv_.push_back(inverse(delta_[e].take_cols(tail_cols)));
    }

    LocatorGrid grid_;
    uint32_t khat_ = 0;
    Fel u_inv_;
    FMatrix lambda_;   // n x khat
    FMatrix gamma_;    // nbar x dbar
    std::vector<FMatrix> delta_;  // per rack, (u-l) x u
    std::vector<uint32_t> row_block_, row_pos_;
    std::vector<uint32_t> X_;
    FMatrix lambda_top_inv_;
    std::vector<FMatrix> tri_inv_;
    std::vector<FMatrix> delta_tail_inv_;
};

}  // namespace metrrc
