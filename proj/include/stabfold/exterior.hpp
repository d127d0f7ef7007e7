#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stabfold/gf.hpp"

namespace stabfold {

// A square-free product of generators h_{i,j}, 1 <= i, j <= n, stored as a
// bitmask over slots (i-1)*n + (j-1). Bit order is the canonical order.
using Mono = uint64_t;

constexpr int kMaxHeight = 8;

inline int normalize_j(int j, int n)
{
    int r = ((j - 1) % n + n) % n;
    return r + 1;
}
inline int slot_of(int i, int j, int n) { return (i - 1) * n + (normalize_j(j, n) - 1); }
inline int slot_i(int slot, int n) { return slot / n + 1; }
inline int slot_j(int slot, int n) { return slot % n + 1; }
inline Mono gen(int i, int j, int n) { return Mono(1) << slot_of(i, j, n); }
inline int degree(Mono m) { return std::popcount(m); }

struct Wedge {
    int sign; // 0 when the product vanishes
    Mono mono;
};

// Product a*b in canonical order.
inline Wedge wedge(Mono a, Mono b)
{
    if (a & b) return {0, 0};
    int inv = 0;
    Mono bb = b;
    while (bb) {
        int s = std::countr_zero(bb);
        bb &= bb - 1;
        inv += std::popcount(a >> s >> 1);
    }
    return {(inv & 1) ? -1 : 1, a | b};
}

// Slot-wise grading values summed modulo a fixed modulus.
struct Grading {
    std::vector<uint64_t> slot_value;
    uint64_t modulus = 1;
    uint64_t of(Mono m) const
    {
        unsigned __int128 s = 0;
        while (m) {
            s += slot_value[std::countr_zero(m)];
            m &= m - 1;
        }
        return static_cast<uint64_t>(s % modulus);
    }
};

// |h_{i,j}| = 2(p^i - 1)p^j modulo 2(p^n - 1).
Grading internal_grading(int n, uint64_t p);
// ||h_{i,j}|| = p^j (p^i - 1)/(p - 1) modulo (p^n - 1)/(p - 1).
Grading reduced_grading(int n, uint64_t p);

uint64_t internal_degree(Mono m, int n, uint64_t p);
uint64_t reduced_internal_degree(Mono m, int n, uint64_t p);
std::vector<int> angle_bracket(Mono m, int n);
int first_subscript_sum(Mono m, int n);
// Sum of first subscripts as integers in 1..n.
int first_subscript_weight(Mono m, int n);

// Textual form: juxtaposed h[i,j]; "1" for the empty monomial.
std::string format_mono(Mono m, int n);
Mono parse_mono(const std::string& text, int n);
// Sign of the reordering needed to bring the written product into canonical order.
Wedge parse_mono_signed(const std::string& text, int n);

// Finite linear combination of monomials with field coefficients.
class Cochain {
public:
    Cochain() = default;
    explicit Cochain(FieldPtr F) : F_(std::move(F)) {}
    static Cochain of(FieldPtr F, Mono m, Elt c = 1);

    const FieldPtr& field() const { return F_; }
    const std::map<Mono, Elt>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Elt coeff(Mono m) const;

    void add_term(Mono m, Elt c);
    Cochain& operator+=(const Cochain& o);
    Cochain operator+(const Cochain& o) const;
    Cochain operator-(const Cochain& o) const;
    Cochain scaled(Elt s) const;
    Cochain wedge(const Cochain& o) const;
    bool operator==(const Cochain& o) const { return terms_ == o.terms_; }

    std::string to_string(int n) const;

private:
    FieldPtr F_;
    std::map<Mono, Elt> terms_;
};

// Linear combination with coefficients in F[x].
class PolyCochain {
public:
    PolyCochain() = default;
    explicit PolyCochain(FieldPtr F) : F_(std::move(F)) {}
    static PolyCochain of(FieldPtr F, Mono m, Elt c = 1, unsigned xpow = 0);

    const FieldPtr& field() const { return F_; }
    const std::map<Mono, Poly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Poly coeff(Mono m) const;

    void add_term(Mono m, const Poly& c);
    PolyCochain operator+(const PolyCochain& o) const;
    PolyCochain operator-(const PolyCochain& o) const;
    PolyCochain scaled(const Poly& s) const;
    PolyCochain wedge(const PolyCochain& o) const;
    bool operator==(const PolyCochain& o) const { return terms_ == o.terms_; }
    Cochain evaluate(Elt e) const;

    std::string to_string(int n) const;

private:
    FieldPtr F_;
    std::map<Mono, Poly> terms_;
};

} // namespace stabfold
