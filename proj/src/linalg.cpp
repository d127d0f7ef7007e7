#include "stabfold/linalg.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace stabfold {

size_t SparseMatrix::nnz() const
{
    size_t s = 0;
    for (auto& r : row) s += r.size();
    return s;
}

DenseMatrix DenseMatrix::identity(size_t n)
{
    DenseMatrix I(n, n);
    for (size_t k = 0; k < n; ++k) I.at(k, k) = 1;
    return I;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& s)
{
    DenseMatrix D(s.rows, s.cols);
    for (size_t i = 0; i < s.rows; ++i)
        for (auto& [c, v] : s.row[i]) D.at(i, c) = v;
    return D;
}

DenseMatrix mat_mul(const Field& F, const DenseMatrix& A, const DenseMatrix& B)
{
    if (A.cols != B.rows) throw std::invalid_argument("mat_mul shape mismatch");
    DenseMatrix C(A.rows, B.cols);
    for (size_t i = 0; i < A.rows; ++i)
        for (size_t k = 0; k < A.cols; ++k) {
            Elt a = A.at(i, k);
            if (!a) continue;
            for (size_t j = 0; j < B.cols; ++j) {
                Elt b = B.at(k, j);
                if (b) C.at(i, j) = F.add(C.at(i, j), F.mul(a, b));
            }
        }
    return C;
}

DenseMatrix mat_add(const Field& F, const DenseMatrix& A, const DenseMatrix& B)
{
    DenseMatrix C = A;
    for (size_t k = 0; k < C.a.size(); ++k) C.a[k] = F.add(A.a[k], B.a[k]);
    return C;
}

DenseMatrix mat_sub(const Field& F, const DenseMatrix& A, const DenseMatrix& B)
{
    DenseMatrix C = A;
    for (size_t k = 0; k < C.a.size(); ++k) C.a[k] = F.sub(A.a[k], B.a[k]);
    return C;
}

DenseMatrix mat_pow(const Field& F, const DenseMatrix& A, uint64_t e)
{
    DenseMatrix R = DenseMatrix::identity(A.rows), B = A;
    while (e) {
        if (e & 1) R = mat_mul(F, R, B);
        e >>= 1;
        if (e) B = mat_mul(F, B, B);
    }
    return R;
}

std::vector<size_t> rref(const Field& F, DenseMatrix& A)
{
    std::vector<size_t> piv;
    size_t r = 0;
    for (size_t c = 0; c < A.cols && r < A.rows; ++c) {
        size_t sel = A.rows;
        for (size_t i = r; i < A.rows; ++i)
            if (A.at(i, c)) {
                sel = i;
                break;
            }
        if (sel == A.rows) continue;
        if (sel != r)
            for (size_t j = 0; j < A.cols; ++j) std::swap(A.at(sel, j), A.at(r, j));
        Elt inv = F.inv(A.at(r, c));
        for (size_t j = c; j < A.cols; ++j) A.at(r, j) = F.mul(A.at(r, j), inv);
        for (size_t i = 0; i < A.rows; ++i) {
            if (i == r) continue;
            Elt f = A.at(i, c);
            if (!f) continue;
            Elt nf = F.neg(f);
            for (size_t j = c; j < A.cols; ++j) {
                Elt v = A.at(r, j);
                if (v) A.at(i, j) = F.add(A.at(i, j), F.mul(nf, v));
            }
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

size_t rank_dense(const Field& F, DenseMatrix A)
{
    // Forward elimination only.
    size_t r = 0;
    for (size_t c = 0; c < A.cols && r < A.rows; ++c) {
        size_t sel = A.rows;
        for (size_t i = r; i < A.rows; ++i)
            if (A.at(i, c)) {
                sel = i;
                break;
            }
        if (sel == A.rows) continue;
        if (sel != r)
            for (size_t j = c; j < A.cols; ++j) std::swap(A.at(sel, j), A.at(r, j));
        Elt inv = F.inv(A.at(r, c));
        for (size_t i = r + 1; i < A.rows; ++i) {
            Elt f = A.at(i, c);
            if (!f) continue;
            Elt nf = F.neg(F.mul(f, inv));
            for (size_t j = c; j < A.cols; ++j) {
                Elt v = A.at(r, j);
                if (v) A.at(i, j) = F.add(A.at(i, j), F.mul(nf, v));
            }
        }
        ++r;
    }
    return r;
}

size_t rank_sparse(const Field& F, SparseMatrix A)
{
    const size_t R = A.rows;
    std::vector<uint32_t> colcount(A.cols, 0);
    std::vector<std::vector<uint32_t>> colrows(A.cols);
    std::vector<char> active(R, 1);
    for (size_t i = 0; i < R; ++i)
        for (auto& [c, v] : A.row[i]) {
            ++colcount[c];
            colrows[c].push_back(static_cast<uint32_t>(i));
        }
    size_t rank = 0;
    SparseRow merged;
    for (;;) {
        size_t best = R, bw = std::numeric_limits<size_t>::max();
        for (size_t i = 0; i < R; ++i) {
            if (!active[i]) continue;
            size_t w = A.row[i].size();
            if (w == 0) {
                active[i] = 0;
                continue;
            }
            if (w < bw) {
                bw = w;
                best = i;
            }
        }
        if (best == R) break;
        const SparseRow& prow = A.row[best];
        uint32_t pc = prow[0].first;
        uint32_t pcnt = std::numeric_limits<uint32_t>::max();
        Elt pv = 0;
        for (auto& [c, v] : prow)
            if (colcount[c] < pcnt) {
                pcnt = colcount[c];
                pc = c;
                pv = v;
            }
        active[best] = 0;
        for (auto& [c, v] : prow) --colcount[c];
        Elt pinv = F.inv(pv);
        std::vector<uint32_t> targets;
        targets.swap(colrows[pc]);
        for (uint32_t i : targets) {
            if (!active[i]) continue;
            SparseRow& row = A.row[i];
            auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(pc, Elt(0)),
                                       [](auto& a, auto& b) { return a.first < b.first; });
            if (it == row.end() || it->first != pc) continue;
            Elt f = F.neg(F.mul(it->second, pinv));
            merged.clear();
            size_t a = 0, b = 0;
            while (a < row.size() || b < prow.size()) {
                if (b == prow.size() || (a < row.size() && row[a].first < prow[b].first)) {
                    merged.push_back(row[a++]);
                } else if (a == row.size() || prow[b].first < row[a].first) {
                    uint32_t c = prow[b].first;
                    merged.emplace_back(c, F.mul(f, prow[b].second));
                    ++colcount[c];
                    colrows[c].push_back(i);
                    ++b;
                } else {
                    uint32_t c = row[a].first;
                    Elt v = F.add(row[a].second, F.mul(f, prow[b].second));
                    if (v)
                        merged.emplace_back(c, v);
                    else
                        --colcount[c];
                    ++a;
                    ++b;
                }
            }
            row.swap(merged);
        }
        ++rank;
    }
    return rank;
}

size_t rank(const Field& F, const SparseMatrix& A, RankMethod method)
{
    if (A.rows == 0 || A.cols == 0) return 0;
    if (method == RankMethod::dense || (method == RankMethod::automatic && A.cols < kDenseCutoff))
        return rank_dense(F, DenseMatrix::from_sparse(A));
    return rank_sparse(F, A);
}

DenseMatrix transpose(const DenseMatrix& A)
{
    DenseMatrix T(A.cols, A.rows);
    for (size_t i = 0; i < A.rows; ++i)
        for (size_t j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
    return T;
}

DenseMatrix right_kernel(const Field& F, const DenseMatrix& A)
{
    DenseMatrix R = A;
    std::vector<size_t> piv = rref(F, R);
    std::vector<char> is_piv(A.cols, 0);
    for (size_t c : piv) is_piv[c] = 1;
    DenseMatrix K(A.cols - piv.size(), A.cols);
    size_t k = 0;
    for (size_t f = 0; f < A.cols; ++f) {
        if (is_piv[f]) continue;
        K.at(k, f) = 1;
        for (size_t r = 0; r < piv.size(); ++r) K.at(k, piv[r]) = F.neg(R.at(r, f));
        ++k;
    }
    return K;
}

DenseMatrix left_kernel(const Field& F, const DenseMatrix& A) { return right_kernel(F, transpose(A)); }

DenseMatrix vstack(const DenseMatrix& A, const DenseMatrix& B)
{
    size_t cols = A.rows ? A.cols : B.cols;
    if (A.rows && B.rows && A.cols != B.cols) throw std::invalid_argument("vstack shape mismatch");
    DenseMatrix C(A.rows + B.rows, cols);
    std::copy(A.a.begin(), A.a.end(), C.a.begin());
    std::copy(B.a.begin(), B.a.end(), C.a.begin() + A.a.size());
    return C;
}

DenseMatrix select_columns(const DenseMatrix& A, const std::vector<size_t>& cols)
{
    DenseMatrix C(A.rows, cols.size());
    for (size_t i = 0; i < A.rows; ++i)
        for (size_t j = 0; j < cols.size(); ++j) C.at(i, j) = A.at(i, cols[j]);
    return C;
}

DenseMatrix row_basis(const Field& F, DenseMatrix A)
{
    std::vector<size_t> piv = rref(F, A);
    DenseMatrix B(piv.size(), A.cols);
    std::copy(A.a.begin(), A.a.begin() + piv.size() * A.cols, B.a.begin());
    return B;
}

Poly charpoly(const FieldPtr& Fp, const DenseMatrix& A0)
{
    const Field& F = *Fp;
    size_t n = A0.rows;
    if (A0.cols != n) throw std::invalid_argument("charpoly of non-square matrix");
    DenseMatrix H = A0;
    for (size_t j = 0; j + 2 < n; ++j) {
        size_t i = j + 1;
        while (i < n && H.at(i, j) == 0) ++i;
        if (i == n) continue;
        if (i != j + 1) {
            for (size_t c = 0; c < n; ++c) std::swap(H.at(i, c), H.at(j + 1, c));
            for (size_t r = 0; r < n; ++r) std::swap(H.at(r, i), H.at(r, j + 1));
        }
        Elt inv = F.inv(H.at(j + 1, j));
        for (size_t k = j + 2; k < n; ++k) {
            Elt u = F.mul(H.at(k, j), inv);
            if (!u) continue;
            for (size_t c = 0; c < n; ++c) H.at(k, c) = F.sub(H.at(k, c), F.mul(u, H.at(j + 1, c)));
            for (size_t r = 0; r < n; ++r) H.at(r, j + 1) = F.add(H.at(r, j + 1), F.mul(u, H.at(r, k)));
        }
    }
    std::vector<Poly> P;
    P.push_back(Poly::constant(Fp, 1));
    Poly X = Poly::x(Fp);
    for (size_t m = 0; m < n; ++m) {
        Poly next = (X - Poly::constant(Fp, H.at(m, m))) * P[m];
        Elt prod = 1;
        for (size_t i = m; i-- > 0;) {
            prod = F.mul(prod, H.at(i + 1, i));
            Elt c = F.mul(H.at(i, m), prod);
            if (c) next = next - P[i].scaled(c);
        }
        P.push_back(next);
    }
    return P[n];
}

Poly minpoly(const FieldPtr& Fp, const DenseMatrix& A)
{
    const Field& F = *Fp;
    size_t n = A.rows;
    Poly acc = Poly::constant(Fp, 1);
    for (size_t e = 0; e < n; ++e) {
        // Krylov sequence of e_e with incremental elimination; each stored row
        // carries the polynomial that produced it.
        std::vector<std::vector<Elt>> rows;
        std::vector<Poly> polys;
        std::vector<size_t> pivots;
        std::vector<Elt> v(n, 0);
        v[e] = 1;
        Poly pv = Poly::constant(Fp, 1);
        for (;;) {
            std::vector<Elt> w = v;
            Poly pw = pv;
            for (size_t r = 0; r < rows.size(); ++r) {
                Elt f = w[pivots[r]];
                if (!f) continue;
                for (size_t k = 0; k < n; ++k) w[k] = F.sub(w[k], F.mul(f, rows[r][k]));
                pw = pw - polys[r].scaled(f);
            }
            size_t pc = n;
            for (size_t k = 0; k < n; ++k)
                if (w[k]) {
                    pc = k;
                    break;
                }
            if (pc == n) {
                acc = poly_lcm(acc, pw.monic());
                break;
            }
            Elt inv = F.inv(w[pc]);
            for (auto& x : w) x = F.mul(x, inv);
            rows.push_back(w);
            polys.push_back(pw.scaled(inv));
            pivots.push_back(pc);
            std::vector<Elt> nv(n, 0);
            for (size_t i = 0; i < n; ++i)
                for (size_t k = 0; k < n; ++k)
                    if (A.at(i, k) && v[k]) nv[i] = F.add(nv[i], F.mul(A.at(i, k), v[k]));
            v = nv;
            pv = pv.shifted(1);
        }
    }
    return acc;
}

} // namespace stabfold
