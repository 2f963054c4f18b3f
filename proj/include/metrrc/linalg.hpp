/**************************************************************************
 * linalg.hpp
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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "gf.hpp"

namespace metrrc {

class LinalgError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix over a finite field. All instances reference the
/// field they were built with; the field must outlive the matrix.
class FMatrix {
public:
    FMatrix() = default;

    FMatrix(const Field& f, size_t rows, size_t cols)
        : f_(&f), rows_(rows), cols_(cols), a_(rows * cols, Fel(0)) {}

    static FMatrix identity(const Field& f, size_t n) {
        FMatrix m(f, n, n);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = f.one();
        return m;
    }

    static FMatrix from_rows(const Field& f, const std::vector<std::vector<Fel>>& rows) {
        FMatrix m(f, rows.size(), rows.empty() ? 0 : rows.front().size());
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) throw LinalgError("ragged row list");
            for (size_t j = 0; j < m.cols_; ++j) m.at(i, j) = rows[i][j];
        }
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    const Field& field() const { return *f_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Fel& at(size_t i, size_t j) { return a_[i * cols_ + j]; }
    Fel at(size_t i, size_t j) const { return a_[i * cols_ + j]; }

    std::vector<Fel> row(size_t i) const {
        return std::vector<Fel>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
    }

    FMatrix mul(const FMatrix& rhs) const {
        if (cols_ != rhs.rows_) throw LinalgError("shape mismatch in matrix product");
        const Field& f = *f_;
        FMatrix out(f, rows_, rhs.cols_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t t = 0; t < cols_; ++t) {
                Fel v = at(i, t);
                if (v.is_zero()) continue;
                for (size_t j = 0; j < rhs.cols_; ++j)
                    out.at(i, j) = f.add(out.at(i, j), f.mul(v, rhs.at(t, j)));
            }
        return out;
    }

    std::vector<Fel> mul_vec(std::span<const Fel> x) const {
        if (x.size() != cols_) throw LinalgError("shape mismatch in matrix-vector product");
        const Field& f = *f_;
        std::vector<Fel> out(rows_, Fel(0));
        for (size_t i = 0; i < rows_; ++i) {
            Fel acc(0);
            for (size_t j = 0; j < cols_; ++j) acc = f.add(acc, f.mul(at(i, j), x[j]));
            out[i] = acc;
        }
        return out;
    }

    FMatrix transpose() const {
        FMatrix out(*f_, cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
        return out;
    }

    FMatrix take_rows(std::span<const uint32_t> idx) const {
        FMatrix out(*f_, idx.size(), cols_);
        for (size_t i = 0; i < idx.size(); ++i)
            for (size_t j = 0; j < cols_; ++j) out.at(i, j) = at(idx[i], j);
        return out;
    }

    FMatrix take_cols(std::span<const uint32_t> idx) const {
        FMatrix out(*f_, rows_, idx.size());
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < idx.size(); ++j) out.at(i, j) = at(i, idx[j]);
        return out;
    }

    bool operator==(const FMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

private:
    const Field* f_ = nullptr;
    size_t rows_ = 0, cols_ = 0;
    std::vector<Fel> a_;
};

/// Matrix with entry (i, j) = locators[j] ^ exponents[i]. Locators must be
/// pairwise distinct.
inline FMatrix vandermonde(const Field& f, std::span<const Fel> locators,
                           std::span<const int64_t> exponents) {
    for (size_t i = 0; i < locators.size(); ++i)
        for (size_t j = i + 1; j < locators.size(); ++j)
            if (locators[i] == locators[j]) throw LinalgError("duplicate Vandermonde locators");
    FMatrix m(f, exponents.size(), locators.size());
    for (size_t i = 0; i < exponents.size(); ++i)
        for (size_t j = 0; j < locators.size(); ++j)
            m.at(i, j) = f.pow(locators[j], exponents[i]);
    return m;
}

/// In-place reduced row echelon form; first-nonzero pivoting in column order
/// (fields are exact, no pivot magnitude concerns). Returns the pivot column
/// list; rank is its size.
inline std::vector<size_t> rref_in_place(FMatrix& m) {
    const Field& f = m.field();
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        size_t p = r;
        while (p < m.rows() && m.at(p, c).is_zero()) ++p;
        if (p == m.rows()) continue;
        if (p != r)
            for (size_t j = 0; j < m.cols(); ++j) std::swap(m.at(p, j), m.at(r, j));
        Fel s = f.inv(m.at(r, c));
        for (size_t j = 0; j < m.cols(); ++j) m.at(r, j) = f.mul(m.at(r, j), s);
        for (size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m.at(i, c).is_zero()) continue;
            Fel v = m.at(i, c);
            for (size_t j = 0; j < m.cols(); ++j)
                m.at(i, j) = f.sub(m.at(i, j), f.mul(v, m.at(r, j)));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline size_t rank(FMatrix m) { return rref_in_place(m).size(); }

inline FMatrix inverse(const FMatrix& a) {
    if (a.rows() != a.cols()) throw LinalgError("inverse of non-square matrix");
    const Field& f = a.field();
    const size_t n = a.rows();
    FMatrix aug(f, n, 2 * n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, n + i) = f.one();
    }
    auto piv = rref_in_place(aug);
    if (piv.size() != n || piv.back() != n - 1) throw LinalgError("singular matrix");
    FMatrix out(f, n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) out.at(i, j) = aug.at(i, n + j);
    return out;
}

/// Solve A X = B by Gaussian elimination. A may be square invertible or an
/// overdetermined consistent system; anything else is rejected.
inline FMatrix solve(const FMatrix& a, const FMatrix& b) {
    if (a.rows() != b.rows()) throw LinalgError("shape mismatch in solve");
    if (a.rows() < a.cols()) throw LinalgError("underdetermined system");
    const Field& f = a.field();
    const size_t n = a.cols(), m = b.cols();
    FMatrix aug(f, a.rows(), n + m);
    for (size_t i = 0; i < a.rows(); ++i) {
        for (size_t j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
        for (size_t j = 0; j < m; ++j) aug.at(i, n + j) = b.at(i, j);
    }
    auto piv = rref_in_place(aug);
    size_t lead = 0;
    while (lead < piv.size() && piv[lead] < n) ++lead;
    if (lead != n) throw LinalgError("singular system");
    if (lead != piv.size()) throw LinalgError("inconsistent system");
    FMatrix x(f, n, m);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) x.at(i, j) = aug.at(i, n + j);
    return x;
}

inline std::vector<Fel> solve_vec(const FMatrix& a, std::span<const Fel> b) {
    FMatrix bm(a.field(), b.size(), 1);
    for (size_t i = 0; i < b.size(); ++i) bm.at(i, 0) = b[i];
    FMatrix x = solve(a, bm);
    std::vector<Fel> out(x.rows());
    for (size_t i = 0; i < x.rows(); ++i) out[i] = x.at(i, 0);
    return out;
}

/// Canonical nullspace basis: returns N (cols(A) x nullity) with A N = 0 and
/// an identity pattern on the RREF free columns. Deterministic.
inline FMatrix nullspace(const FMatrix& a) {
    const Field& f = a.field();
    FMatrix r = a;
    auto piv = rref_in_place(r);
    std::vector<size_t> free_cols;
    {
        size_t pi = 0;
        for (size_t c = 0; c < a.cols(); ++c) {
            if (pi < piv.size() && piv[pi] == c)
                ++pi;
            else
                free_cols.push_back(c);
        }
    }
    FMatrix n(f, a.cols(), free_cols.size());
    for (size_t j = 0; j < free_cols.size(); ++j) {
        n.at(free_cols[j], j) = f.one();
        for (size_t i = 0; i < piv.size(); ++i)
            n.at(piv[i], j) = f.neg(r.at(i, free_cols[j]));
    }
    return n;
}

/// Builds the h x rows(V) transform A with (A V) equal to the identity on
/// `target_cols` (in list order), zero on `zero_cols`, and unconstrained
/// elsewhere. Requires |target| + |zero| = rows(V) and the corresponding
/// column submatrix of V to be invertible.
inline FMatrix partial_identity_transform(const FMatrix& v,
                                          std::span<const uint32_t> target_cols,
                                          std::span<const uint32_t> zero_cols) {
    const size_t h = target_cols.size();
    if (h + zero_cols.size() != v.rows())
        throw LinalgError("target and zero columns must jointly index rows(V) columns");
    std::vector<uint32_t> sel(target_cols.begin(), target_cols.end());
    sel.insert(sel.end(), zero_cols.begin(), zero_cols.end());
    FMatrix w = v.take_cols(sel);
    FMatrix winv;
    try {
        winv = inverse(w);
    } catch (const LinalgError&) {
        throw LinalgError("selected column submatrix is rank deficient");
    }
    FMatrix out(v.field(), h, v.rows());
    for (size_t i = 0; i < h; ++i)
        for (size_t j = 0; j < v.rows(); ++j) out.at(i, j) = winv.at(i, j);
    return out;
}

/// Minimum Hamming weight of the row space of `gen` (excluding the zero
/// word), by exhaustive message enumeration. Test oracle; refuses instances
/// with more than `cap` codewords.
inline uint64_t min_hamming_weight(const FMatrix& gen, uint64_t cap = 10'000'000) {
    const Field& f = gen.field();
    const size_t dim = gen.rows(), n = gen.cols();
    const uint64_t q = f.order();
    uint64_t total = 1;
    for (size_t i = 0; i < dim; ++i) {
        if (total > cap / q + 1) throw LinalgError("instance too large to enumerate");
        total *= q;
    }
    if (total > cap) throw LinalgError("instance too large to enumerate");
    std::vector<uint32_t> msg(dim, 0);
    std::vector<Fel> word(n, Fel(0));
    uint64_t best = n + 1;
    for (uint64_t it = 1; it < total; ++it) {
        // odometer increment; word updated incrementally per changed digit
        size_t d = 0;
        while (true) {
            uint32_t old = msg[d];
            msg[d] = (msg[d] + 1) % q;
            Fel delta = f.sub(Fel(msg[d]), Fel(old));
            for (size_t j = 0; j < n; ++j)
                word[j] = f.add(word[j], f.mul(delta, gen.at(d, j)));
            if (msg[d] != 0) break;
            ++d;
        }
        uint64_t wt = 0;
        for (size_t j = 0; j < n; ++j) wt += !word[j].is_zero();
        if (wt && wt < best) best = wt;
    }
    if (best > n) throw LinalgError("zero row space has no minimum weight");
    return best;
}

}  // namespace metrrc
