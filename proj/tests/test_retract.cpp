#include <random>

#include "doctest.h"
#include "stabfold/homology.hpp"
#include "stabfold/retract.hpp"

using namespace stabfold;

namespace {

std::vector<Elt> roots_with_multiplicity(const FieldPtr& F, Poly f)
{
    std::vector<Elt> out;
    for (Elt e = 0; e < F->size() && f.degree() > 0; ++e)
        while (f.degree() > 0 && f.evaluate(e) == 0) {
            Poly q, r;
            f.divmod(Poly(F, {F->neg(e), 1}), q, r);
            f = q;
            out.push_back(e);
        }
    return out;
}

DenseMatrix random_matrix(std::mt19937_64& rng, size_t n, Elt bound)
{
    DenseMatrix M(n, n);
    for (auto& x : M.a) x = static_cast<Elt>(rng() % bound);
    return M;
}

} // namespace

TEST_CASE("circledast eigenvalues are pairwise sums, sampled over F_3 inside F_729")
{
    FieldPtr F = Field::create(3, 6);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 30; ++k) {
        DenseMatrix A = random_matrix(rng, 3, 3), B = random_matrix(rng, 3, 3);
        auto ra = roots_with_multiplicity(F, charpoly(F, A)), rb = roots_with_multiplicity(F, charpoly(F, B));
        REQUIRE(ra.size() == 3);
        REQUIRE(rb.size() == 3);
        Poly want = Poly::constant(F, 1);
        for (Elt a : ra)
            for (Elt b : rb) want = want * Poly(F, {F->neg(F->add(a, b)), 1});
        CHECK(charpoly(F, circledast(*F, A, B)) == want);
    }
}

TEST_CASE("idempotent iterates")
{
    FieldPtr F = Field::create(3, 6);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 30; ++k) {
        DenseMatrix M = random_matrix(rng, 3, 3);
        uint64_t N = idempotent_exponent(F, M);
        DenseMatrix P = mat_pow(*F, M, N);
        CHECK(mat_mul(*F, P, P) == P);
        for (uint64_t j = 1; j < N && j < 50; ++j) {
            DenseMatrix Q = mat_pow(*F, M, j);
            CHECK(!(mat_mul(*F, Q, Q) == Q));
        }
    }
    // x^2 + 1 does not split over F_3.
    DenseMatrix C(2, 2);
    C.at(0, 1) = 1;
    C.at(1, 0) = 2;
    CHECK_THROWS_AS(idempotent_exponent(Field::create(3), C), std::domain_error);
}

TEST_CASE("odd derivations extended from functionals square to zero")
{
    FieldPtr F = Field::create(7);
    Complex gl = build_gl(2, F, 7);
    std::mt19937_64 rng(1);
    std::vector<Elt> vals(4);
    for (auto& v : vals) v = static_cast<Elt>(rng() % 7);
    Derivation h = extend_functional(gl, vals);
    for (Mono m : gl.all_monomials()) CHECK(h(h(Cochain::of(F, m))).is_zero());
}

TEST_CASE("D = dh + hd multiplies generators by lambda and has a monomial kernel")
{
    for (auto [n, p, m] : std::vector<std::tuple<int, uint64_t, unsigned>>{{2, 5, 1}, {3, 7, 1}, {2, 11, 1}, {3, 19, 1}}) {
        FieldPtr F = Field::create(p, m);
        Complex gl = build_gl(n, F, p);
        Elt w = primitive_root_of_unity(*F, n);
        Derivation h = h_omega(gl, w), D = laplacian(gl, h);
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                CHECK(D.apply(gen(i, j, n)) == Cochain::of(F, gen(i, j, n), lambda_omega(*F, w, i, j)));
        UProperty u = u_property_check(D);
        CHECK(u.diagonalizable);
        Complex K = kernel_model(gl, {D});
        CHECK(K.all_monomials() == subcomplex(gl, Label::critical).all_monomials());
    }
}

TEST_CASE("model roots and splitting degrees")
{
    CHECK(splitting_degree(13, 4) == 1);
    CHECK(splitting_degree(7, 4) == 2);
    CHECK(splitting_degree(3, 2) == 1);
    CHECK(cyclotomic(4) == std::vector<int64_t>{1, 0, 1});
    FieldPtr F = Field::create(13, 2);
    auto r = model_roots(*F, 4);
    REQUIRE(r.size() == 2);
    CHECK(F->order(r[0]) == 2);
    CHECK(F->order(r[1]) == 4);
}
