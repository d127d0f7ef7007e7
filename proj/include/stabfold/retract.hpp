#pragma once

#include <functional>
#include <vector>

#include "stabfold/homology.hpp"
#include "stabfold/linalg.hpp"
#include "stabfold/ravenel.hpp"

namespace stabfold {

// A linear operator on a complex given on basis monomials; shift is the
// change in cohomological degree (-1 for h, 0 for D).
struct Derivation {
    const Complex* c = nullptr;
    int shift = 0;
    std::function<Cochain(Mono)> apply;
    Cochain operator()(const Cochain& z) const;
};

// Graded derivation of degree -1 with h(h_s) = values[s] and h(1) = 0.
Derivation extend_functional(const Complex& c, std::vector<Elt> slot_values);
// D = dh + hd.
Derivation laplacian(const Complex& c, const Derivation& h);

// Matrix of D on one block, rows are images of basis elements. Throws if D leaves the block.
DenseMatrix block_operator(const Derivation& D, const BlockKey& k);
// Matrix of D on degree 1 in slot order.
DenseMatrix degree_one_operator(const Derivation& D);

struct UProperty {
    bool diagonalizable = false;
    std::vector<Elt> eigenvalues; // distinct roots in F, ascending code
    bool all_in_k_u = false;
};
UProperty u_property_check(const FieldPtr& F, const DenseMatrix& M);
UProperty u_property_check(const Derivation& D);

// Smallest N >= 1 with M^N idempotent. Throws std::domain_error when the
// minimal polynomial does not split over F.
uint64_t idempotent_exponent(const FieldPtr& F, const DenseMatrix& M);
uint64_t idempotent_exponent(const Derivation& D);

// Sub-DGA on which every D in the list vanishes. Requires each D to be
// diagonalizable with a kernel spanned by basis monomials.
Complex kernel_model(const Complex& c, const std::vector<Derivation>& Ds);
// dim image(1 - D^N) per block, N the idempotent exponent; the replacement
// model for non-diagonalizable D.
std::map<BlockKey, uint64_t> iterated_model_dims(const Derivation& D);

// D1 (x) 1 + 1 (x) D2 in the Kronecker basis.
DenseMatrix circledast(const Field& F, const DenseMatrix& D1, const DenseMatrix& D2);

// h^omega on CE(gl_n): h(h_{n,j}) = omega^j omega / (1 - omega), zero otherwise.
Derivation h_omega(const Complex& gl, Elt omega);
// lambda^omega(h_{i,j}) = sum_{l=1}^{i} omega^(j+l).
Elt lambda_omega(const Field& F, Elt omega, int i, int j);

// Integer coefficients of the d-th cyclotomic polynomial, lowest first.
std::vector<int64_t> cyclotomic(unsigned d);
// Least m with n | p^m - 1.
unsigned splitting_degree(uint64_t p, unsigned n);
// One root of each cyclotomic factor of (x^n - 1)/(x - 1), ascending d.
std::vector<Elt> model_roots(const Field& F, unsigned n);

} // namespace stabfold
