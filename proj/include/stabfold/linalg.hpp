#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "stabfold/gf.hpp"

namespace stabfold {

using SparseRow = std::vector<std::pair<uint32_t, Elt>>; // sorted by column

// Row-major sparse matrix; rows index source basis elements.
struct SparseMatrix {
    size_t rows = 0, cols = 0;
    std::vector<SparseRow> row;
    SparseMatrix() = default;
    SparseMatrix(size_t r, size_t c) : rows(r), cols(c), row(r) {}
    size_t nnz() const;
};

struct DenseMatrix {
    size_t rows = 0, cols = 0;
    std::vector<Elt> a;
    DenseMatrix() = default;
    DenseMatrix(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0) {}
    Elt& at(size_t i, size_t j) { return a[i * cols + j]; }
    Elt at(size_t i, size_t j) const { return a[i * cols + j]; }
    static DenseMatrix identity(size_t n);
    static DenseMatrix from_sparse(const SparseMatrix& s);
    bool operator==(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

DenseMatrix mat_mul(const Field& F, const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix mat_add(const Field& F, const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix mat_sub(const Field& F, const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix mat_pow(const Field& F, const DenseMatrix& A, uint64_t e);

enum class RankMethod { automatic, dense, sparse };
constexpr size_t kDenseCutoff = 512;

// Reduced row echelon form in place; returns pivot columns.
std::vector<size_t> rref(const Field& F, DenseMatrix& A);
size_t rank_dense(const Field& F, DenseMatrix A);
// Markowitz-style elimination: pivot row of least weight, then the column of
// least count inside it; ties broken by row weight then column index.
size_t rank_sparse(const Field& F, SparseMatrix A);
size_t rank(const Field& F, const SparseMatrix& A, RankMethod method = RankMethod::automatic);

// Rows form a basis of the left kernel {v : v A = 0}.
DenseMatrix left_kernel(const Field& F, const DenseMatrix& A);
// Basis of the right kernel {v : A v = 0}, as rows.
DenseMatrix right_kernel(const Field& F, const DenseMatrix& A);
DenseMatrix transpose(const DenseMatrix& A);
// Rows of A stacked on rows of B.
DenseMatrix vstack(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix select_columns(const DenseMatrix& A, const std::vector<size_t>& cols);
// Row-space basis (echelon rows only).
DenseMatrix row_basis(const Field& F, DenseMatrix A);

Poly charpoly(const FieldPtr& F, const DenseMatrix& A);
Poly minpoly(const FieldPtr& F, const DenseMatrix& A);

} // namespace stabfold
