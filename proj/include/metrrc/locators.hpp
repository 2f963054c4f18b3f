/**************************************************************************
 * locators.hpp
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
#include <span>
#include <vector>

#include "gf.hpp"
#include "linalg.hpp"
#include "params.hpp"

namespace metrrc {

/// Fewer coordinates supplied than the reconstruction threshold needs.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Supplied coordinates are not jointly consistent with any codeword.
class InconsistentDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation-point layout shared by both code families. Node (e, g) of rack
/// e gets locator xi^e * eta^g with xi primitive and eta of order u; rack e
/// itself gets locator xi^(e*u). Requires |F| > n and u | (|F|-1), which
/// makes all n node locators pairwise distinct.
class LocatorGrid {
public:
    LocatorGrid(const CodeParams& p, CodeMode mode, const Field& f)
        : field_(f), params_(p), derived_(derive(p, mode)) {
        if (f.order() <= p.n)
            throw FieldError("field order " + std::to_string(f.order()) +
                             " must exceed code length " + std::to_string(p.n));
        if ((f.order() - 1) % p.u != 0)
            throw FieldError("u = " + std::to_string(p.u) + " must divide q-1 = " +
                             std::to_string(f.order() - 1));
        xi_ = f.primitive();
        eta_ = unity_root(f, p.u);
        node_locators_.reserve(p.n);
        for (uint32_t e = 0; e < derived_.nbar; ++e)
            for (uint32_t g = 0; g < p.u; ++g)
                node_locators_.push_back(f.mul(f.pow(xi_, e), f.pow(eta_, g)));
        rack_locators_.reserve(derived_.nbar);
        for (uint32_t e = 0; e < derived_.nbar; ++e)
            rack_locators_.push_back(f.pow(xi_, int64_t(e) * p.u));
        // multipliers of the dual GRS description of the rack-level code
        dual_mult_.assign(derived_.nbar, f.one());
        for (uint32_t e = 0; e < derived_.nbar; ++e) {
            Fel prod = f.one();
            for (uint32_t e2 = 0; e2 < derived_.nbar; ++e2)
                if (e2 != e) prod = f.mul(prod, f.sub(rack_locators_[e], rack_locators_[e2]));
            dual_mult_[e] = f.inv(prod);
        }
    }

    LocatorGrid(const LocatorGrid&) = delete;
    LocatorGrid& operator=(const LocatorGrid&) = delete;

    const Field& field() const { return field_; }
    const CodeParams& params() const { return params_; }
    const DerivedParams& derived() const { return derived_; }
    Fel xi() const { return xi_; }
    Fel eta() const { return eta_; }

    uint32_t flat(uint32_t e, uint32_t g) const { return e * params_.u + g; }
    Fel node_locator(uint32_t e, uint32_t g) const { return node_locators_[flat(e, g)]; }
    std::span<const Fel> node_locators() const { return node_locators_; }
    Fel rack_locator(uint32_t e) const { return rack_locators_[e]; }
    std::span<const Fel> rack_locators() const { return rack_locators_; }

    /// Whether a length-nbar word satisfies the rack-level parity equations
    /// sum_e (xi^(e*u))^j w_e = 0 for j in [0, nbar-dbar), i.e. membership in
    /// the [nbar, dbar] rack-level MDS code.
    bool rack_word_ok(std::span<const Fel> w) const {
        const Field& f = field_;
        for (uint32_t j = 0; j < derived_.nbar - params_.dbar; ++j) {
            Fel acc(0);
            for (uint32_t e = 0; e < derived_.nbar; ++e)
                acc = f.add(acc, f.mul(f.pow(rack_locators_[e], j), w[e]));
            if (!acc.is_zero()) return false;
        }
        return true;
    }

    /// Lagrange coefficients reading coordinate `target` of a rack-level
    /// codeword from its values at `sources` (dbar distinct racks). The
    /// rack-level code is the dual GRS code of dimension dbar, so
    /// w_target = sum_j coeff[j] * w_sources[j].
    std::vector<Fel> rack_interp_coeffs(std::span<const uint32_t> sources,
                                        uint32_t target) const {
        const Field& f = field_;
        std::vector<Fel> coeffs(sources.size(), Fel(0));
        for (size_t j = 0; j < sources.size(); ++j) {
            Fel lag = f.one();
            for (size_t j2 = 0; j2 < sources.size(); ++j2) {
                if (j2 == j) continue;
                lag = f.mul(lag, f.div(f.sub(rack_locators_[target], rack_locators_[sources[j2]]),
                                       f.sub(rack_locators_[sources[j]],
                                             rack_locators_[sources[j2]])));
            }
            coeffs[j] = f.mul(f.div(dual_mult_[target], dual_mult_[sources[j]]), lag);
        }
        return coeffs;
    }

private:
    Field field_;
    CodeParams params_;
    DerivedParams derived_;
    Fel xi_, eta_;
    std::vector<Fel> node_locators_;
    std::vector<Fel> rack_locators_;
    std::vector<Fel> dual_mult_;
};

}  // namespace metrrc
