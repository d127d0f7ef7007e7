#include <algorithm>
#include <random>

#include "doctest.h"
#include "stabfold/exterior.hpp"
#include "stabfold/gf.hpp"

using namespace stabfold;

TEST_CASE("prime helpers")
{
    CHECK(next_prime_above(8) == 11);
    CHECK(next_prime_above(18) == 19);
    CHECK(next_prime_above(32) == 37);
    CHECK(next_prime_above(50) == 53);
    CHECK(!is_prime(1));
    CHECK(is_prime(2));
    CHECK(prime_factors(360) == std::vector<uint64_t>{2, 3, 5});
    CHECK_THROWS_AS(Field::create(9), std::invalid_argument);
    CHECK_THROWS_AS(Field::create(5, 0), std::invalid_argument);
}

TEST_CASE("field axioms, exhaustive on small fields")
{
    for (auto [p, m] : std::vector<std::pair<uint64_t, unsigned>>{{2, 1}, {3, 1}, {7, 1}, {2, 2}, {2, 3}, {3, 2}, {5, 2}, {3, 3}}) {
        FieldPtr F = Field::create(p, m);
        const Elt q = static_cast<Elt>(F->size());
        CAPTURE(p);
        CAPTURE(m);
        CHECK(F->size() == ipow(p, m));
        uint64_t bad = 0;
        for (Elt a = 0; a < q; ++a) {
            if (F->add(a, F->neg(a)) != 0 || F->mul(a, 1) != a || F->add(a, 0) != a) ++bad;
            if (a && F->mul(a, F->inv(a)) != 1) ++bad;
            if (F->frobenius(a) != F->pow(a, p)) ++bad;
            if (F->frobenius(a, m) != a) ++bad;
            for (Elt b = 0; b < q; ++b) {
                if (F->add(a, b) != F->add(b, a) || F->mul(a, b) != F->mul(b, a)) ++bad;
                for (Elt c = 0; c < q; ++c) {
                    if (F->mul(a, F->add(b, c)) != F->add(F->mul(a, b), F->mul(a, c))) ++bad;
                    if (F->mul(F->mul(a, b), c) != F->mul(a, F->mul(b, c))) ++bad;
                    if (F->add(F->add(a, b), c) != F->add(a, F->add(b, c))) ++bad;
                }
            }
        }
        CHECK(bad == 0);
        CHECK(F->order(F->primitive_element()) == q - 1);
    }
}

TEST_CASE("roots of unity and n-th roots")
{
    FieldPtr F = Field::create(13, 2);
    Elt w = primitive_root_of_unity(*F, 8);
    CHECK(F->order(w) == 8);
    CHECK_THROWS_AS(primitive_root_of_unity(*Field::create(13), 8), std::domain_error);
    FieldPtr G = Field::create(19);
    for (Elt a = 1; a < 19; ++a) {
        auto r = nth_roots(*G, a, 3);
        uint64_t brute = 0;
        for (Elt z = 1; z < 19; ++z) brute += G->pow(z, 3) == a;
        CHECK(r.size() == brute);
        for (Elt z : r) CHECK(G->pow(z, 3) == a);
    }
}

TEST_CASE("polynomials: evaluation is a ring map and valuations add")
{
    FieldPtr F = Field::create(3, 2);
    std::mt19937_64 rng(7);
    auto rnd = [&](int deg) {
        std::vector<Elt> c(deg + 1);
        for (auto& x : c) x = static_cast<Elt>(rng() % F->size());
        return Poly(F, c);
    };
    for (int k = 0; k < 40; ++k) {
        Poly f = rnd(static_cast<int>(rng() % 5)).shifted(rng() % 3), g = rnd(static_cast<int>(rng() % 5)).shifted(rng() % 3);
        if (!f.is_zero()) CHECK(f.lead() != 0);
        for (Elt e = 0; e < F->size(); ++e) {
            CHECK((f * g).evaluate(e) == F->mul(f.evaluate(e), g.evaluate(e)));
            CHECK((f + g).evaluate(e) == F->add(f.evaluate(e), g.evaluate(e)));
        }
        if (!f.is_zero() && !g.is_zero()) CHECK((f * g).valuation() == f.valuation() + g.valuation());
        if (!g.is_zero()) {
            Poly q, r;
            f.divmod(g, q, r);
            CHECK(q * g + r == f);
            CHECK(r.degree() < g.degree());
        }
    }
}

TEST_CASE("wedge sign is the permutation parity of the concatenated slots")
{
    std::mt19937_64 rng(11);
    for (int k = 0; k < 2000; ++k) {
        Mono a = rng() & 0xffff, b = rng() & 0xffff;
        b &= ~a;
        if (k % 5 == 0) b |= a & (~a + 1); // sometimes overlap
        std::vector<int> seq;
        for (int s = 0; s < 16; ++s)
            if (a >> s & 1) seq.push_back(s);
        for (int s = 0; s < 16; ++s)
            if (b >> s & 1) seq.push_back(s);
        Wedge w = wedge(a, b);
        if (a & b) {
            CHECK(w.sign == 0);
            continue;
        }
        int inv = 0;
        for (size_t i = 0; i < seq.size(); ++i)
            for (size_t j = i + 1; j < seq.size(); ++j) inv += seq[i] > seq[j];
        CHECK(w.sign == (inv % 2 ? -1 : 1));
        CHECK(w.mono == (a | b));
    }
}

TEST_CASE("cochain products are associative and graded commutative")
{
    FieldPtr F = Field::create(7);
    std::mt19937_64 rng(3);
    auto rnd = [&](int deg) {
        Cochain z(F);
        for (int k = 0; k < 4; ++k) {
            Mono m = 0;
            while (std::popcount(m) < deg) m |= Mono(1) << (rng() % 9);
            z.add_term(m, static_cast<Elt>(1 + rng() % 6));
        }
        return z;
    };
    for (int k = 0; k < 200; ++k) {
        int da = 1 + static_cast<int>(rng() % 3), db = 1 + static_cast<int>(rng() % 3);
        Cochain a = rnd(da), b = rnd(db), c = rnd(1);
        CHECK(a.wedge(b).wedge(c) == a.wedge(b.wedge(c)));
        Cochain ba = b.wedge(a);
        CHECK(a.wedge(b) == ((da * db) % 2 ? ba.scaled(F->neg(1)) : ba));
    }
}

TEST_CASE("indices, gradings and text forms")
{
    CHECK(normalize_j(0, 3) == 3);
    CHECK(normalize_j(4, 3) == 1);
    CHECK(gen(1, 0, 2) == gen(1, 2, 2));
    Mono m = parse_mono("h[2,1]h[1,2]", 2);
    CHECK(format_mono(m, 2) == "h[1,2]h[2,1]");
    CHECK(parse_mono_signed("h[2,1]h[1,2]", 2).sign == -1);
    CHECK(format_mono(0, 2) == "1");
    for (uint64_t p : {3ull, 11ull, 19ull})
        for (int n = 1; n <= 4; ++n)
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= n; ++j) {
                    uint64_t mod = 2 * (ipow(p, n) - 1);
                    uint64_t want = 2 * (ipow(p, i) - 1) % mod * (ipow(p, j) % mod) % mod;
                    CHECK(internal_degree(gen(i, j, n), n, p) == want);
                    uint64_t rmod = (ipow(p, n) - 1) / (p - 1);
                    uint64_t rwant = (ipow(p, i) - 1) / (p - 1) % rmod * (ipow(p, j) % rmod) % rmod;
                    CHECK(reduced_internal_degree(gen(i, j, n), n, p) == rwant);
                }
    CHECK(first_subscript_weight(gen(1, 1, 3) | gen(2, 2, 3), 3) == 3);
    CHECK(first_subscript_sum(gen(1, 1, 3) | gen(2, 2, 3), 3) == 0);
}
